/* Copyright 2026 The lstmocr Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "lstmocr/harness.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "lstmocr/checkpoint.h"
#include "lstmocr/errors.h"
#include "lstmocr/random.h"

namespace lstmocr {

namespace fs = std::filesystem;
using nlohmann::json;

std::string ToString(Preset p) { return p == Preset::kPaper ? "paper" : "desk"; }

Preset ParsePreset(const std::string& s) {
  if (s == "paper") return Preset::kPaper;
  if (s == "desk") return Preset::kDesk;
  throw DataError("unknown preset '" + s + "' (paper | desk)");
}

void ExperimentConfig::Validate() const {
  if (preset == Preset::kPaper && fonts.size() != 6) {
    throw DataError("the paper preset needs exactly six fonts, got " +
                    std::to_string(fonts.size()));
  }
  if (preset == Preset::kPaper && seeds.size() != 5) {
    throw DataError("the paper preset needs exactly five seeds, got " +
                    std::to_string(seeds.size()));
  }
  if (fonts.empty()) throw DataError("no fonts configured");
  if (seeds.empty()) throw DataError("no seeds configured");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw DataError("repetition seeds must be distinct");
  }
  std::set<std::string> names;
  for (const auto& f : fonts) {
    if (f.name.empty() || f.name == kCombinedDatasetName) {
      throw DataError("invalid font name '" + f.name + "'");
    }
    if (!names.insert(f.name).second) throw DataError("duplicate font name " + f.name);
    if (!(f.size_pt > 0)) throw DataError("font size must be positive");
  }
  if (preprocess.height < 1) throw DataError("height must be positive");
  if (preprocess.segmentation.epsilon < 0) throw DataError("epsilon must be non-negative");
  if (preprocess.segmentation.gap_min < 0 || preprocess.segmentation.line_gap_min < 0) {
    throw DataError("gap thresholds must be non-negative");
  }
  if (sample_mode != "word" && sample_mode != "page") {
    throw DataError("sample_mode must be word or page");
  }
  if (net.hidden_size < 1) throw DataError("hidden_size must be positive");
  if (corpus_limit < 0) throw DataError("corpus_limit must be non-negative");
  if (jobs < 1) throw DataError("jobs must be at least 1");
  hp.Validate();
}

namespace {

// The six dataset labels mapped onto the bundled open fonts.
const std::vector<std::pair<std::string, std::string>> kFontSubstitutions = {
    {"Arial_14", "DejaVuSans.ttf"},        {"Calibri_14", "DejaVuSansMono.ttf"},
    {"Cambria_14", "DejaVuSerif.ttf"},     {"Georgia_14", "DejaVuSerif-Bold.ttf"},
    {"LucidaFax_14", "STIXGeneralBol.ttf"}, {"TNR_14", "STIXGeneral.ttf"},
};

FontSpec BundledFont(const fs::path& data_dir, const std::string& name) {
  for (const auto& [label, file] : kFontSubstitutions) {
    if (label == name) return {label, data_dir / "fonts" / file, 14.0};
  }
  throw DataError("no bundled font for " + name);
}

}  // namespace

ExperimentConfig PaperPreset(const fs::path& data_dir) {
  ExperimentConfig cfg;
  cfg.preset = Preset::kPaper;
  cfg.corpus_path = data_dir / "corpus" / "fr_top5000.txt";
  for (const auto& [label, file] : kFontSubstitutions) {
    cfg.fonts.push_back(BundledFont(data_dir, label));
  }
  cfg.net.hidden_size = 100;
  cfg.hp.max_epochs = 80;
  cfg.seeds = {1, 2, 3, 4, 5};
  cfg.output_dir = "runs/paper";
  return cfg;
}

ExperimentConfig DeskPreset(const fs::path& data_dir) {
  ExperimentConfig cfg = PaperPreset(data_dir);
  cfg.preset = Preset::kDesk;
  cfg.corpus_limit = 300;
  cfg.fonts = {BundledFont(data_dir, "Arial_14"), BundledFont(data_dir, "TNR_14")};
  cfg.net.hidden_size = 64;
  cfg.hp.max_epochs = 40;
  cfg.seeds = {1, 2, 3};
  cfg.output_dir = "runs/desk";
  return cfg;
}

json ToJson(const ExperimentConfig& cfg) {
  json fonts = json::array();
  for (const auto& f : cfg.fonts) {
    fonts.push_back({{"name", f.name}, {"file", f.face_file.string()}, {"size_pt", f.size_pt}});
  }
  const auto& pp = cfg.preprocess;
  const auto& hp = cfg.hp;
  return {{"preset", ToString(cfg.preset)},
          {"corpus", cfg.corpus_path.string()},
          {"corpus_limit", cfg.corpus_limit},
          {"fonts", fonts},
          {"height", pp.height},
          {"epsilon", pp.segmentation.epsilon},
          {"gap_min", pp.segmentation.gap_min},
          {"line_gap_min", pp.segmentation.line_gap_min},
          {"dpi", pp.dpi},
          {"margin", pp.margin},
          {"sample_mode", cfg.sample_mode},
          {"hidden_size", cfg.net.hidden_size},
          {"learning_rate", hp.learning_rate},
          {"learning_rate_schedule", "constant"},
          {"momentum", hp.momentum},
          {"max_epochs", hp.max_epochs},
          {"stop_policy", ToString(hp.stop_policy)},
          {"patience", hp.patience},
          {"clip_gradients", hp.clip_gradients},
          {"clip_value", hp.clip_value},
          {"batch_size", hp.batch_size},
          {"seeds", cfg.seeds},
          {"output_dir", cfg.output_dir.string()},
          {"jobs", cfg.jobs},
          {"rng", kRngAlgorithm}};
}

ExperimentConfig ConfigFromJson(const json& j, ExperimentConfig cfg,
                                const fs::path& base_dir) {
  auto resolve = [&base_dir](const std::string& p) {
    fs::path path(p);
    return (path.is_relative() && !base_dir.empty() ? base_dir / path : path).lexically_normal();
  };
  try {
    if (j.contains("preset")) cfg.preset = ParsePreset(j.at("preset").get<std::string>());
    if (j.contains("corpus")) cfg.corpus_path = resolve(j.at("corpus").get<std::string>());
    if (j.contains("corpus_limit")) cfg.corpus_limit = j.at("corpus_limit").get<int>();
    if (j.contains("fonts")) {
      cfg.fonts.clear();
      for (const auto& f : j.at("fonts")) {
        cfg.fonts.push_back({f.at("name").get<std::string>(),
                             resolve(f.at("file").get<std::string>()),
                             f.value("size_pt", 14.0)});
      }
    }
    auto& pp = cfg.preprocess;
    pp.height = j.value("height", pp.height);
    pp.segmentation.epsilon = j.value("epsilon", pp.segmentation.epsilon);
    pp.segmentation.gap_min = j.value("gap_min", pp.segmentation.gap_min);
    pp.segmentation.line_gap_min = j.value("line_gap_min", pp.segmentation.line_gap_min);
    pp.dpi = j.value("dpi", pp.dpi);
    pp.margin = j.value("margin", pp.margin);
    cfg.sample_mode = j.value("sample_mode", cfg.sample_mode);
    cfg.net.hidden_size = j.value("hidden_size", cfg.net.hidden_size);
    auto& hp = cfg.hp;
    hp.learning_rate = j.value("learning_rate", hp.learning_rate);
    hp.momentum = j.value("momentum", hp.momentum);
    hp.max_epochs = j.value("max_epochs", hp.max_epochs);
    if (j.contains("stop_policy")) {
      hp.stop_policy = ParseStopPolicy(j.at("stop_policy").get<std::string>());
    }
    hp.patience = j.value("patience", hp.patience);
    hp.clip_gradients = j.value("clip_gradients", hp.clip_gradients);
    hp.clip_value = j.value("clip_value", hp.clip_value);
    hp.batch_size = j.value("batch_size", hp.batch_size);
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    cfg.jobs = j.value("jobs", cfg.jobs);
  } catch (const json::exception& e) {
    throw DataError(std::string("bad config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig LoadConfig(const fs::path& path, const fs::path& data_dir) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("config is not valid JSON: " + std::string(e.what()));
  }
  const Preset preset = ParsePreset(j.value("preset", std::string("paper")));
  ExperimentConfig base = preset == Preset::kPaper ? PaperPreset(data_dir) : DeskPreset(data_dir);
  return ConfigFromJson(j, std::move(base), path.parent_path());
}

std::string ConfigHash(const ExperimentConfig& cfg) {
  json j = ToJson(cfg);
  j.erase("jobs");        // scheduling only
  j.erase("output_dir");  // location only
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Corpus LoadExperimentCorpus(const ExperimentConfig& cfg) {
  Corpus corpus = LoadCorpus(cfg.corpus_path);
  if (cfg.corpus_limit > 0 && corpus.words.size() > static_cast<std::size_t>(cfg.corpus_limit)) {
    corpus.words.resize(cfg.corpus_limit);
  }
  return corpus;
}

RenderedFonts RenderExperimentFonts(const Corpus& corpus, const ExperimentConfig& cfg) {
  if (cfg.sample_mode == "word") return RenderAllFonts(corpus, cfg.fonts, cfg.preprocess);
  RenderedFonts out;
  for (const auto& f : cfg.fonts) {
    out.font_names.push_back(f.name);
    out.by_font[f.name] = RenderFontSamplesViaPages(corpus, f, cfg.preprocess);
  }
  return out;
}

const ResultsRow& ResultsTable::Row(const std::string& dataset) const {
  for (const auto& r : rows) {
    if (r.dataset == dataset) return r;
  }
  throw DataError("results table has no row " + dataset);
}

std::string ResultsTable::ToCsv() const {
  std::ostringstream os;
  os << "Test datasets,best_ctc_labelError,best_ctc_seqError,best_label_labelError,"
        "best_label_seqError\n";
  for (const auto& r : rows) {
    os << r.dataset << ',' << FormatPercent(r.best_ctc_label_error) << ','
       << FormatPercent(r.best_ctc_seq_error) << ','
       << FormatPercent(r.best_label_label_error) << ','
       << FormatPercent(r.best_label_seq_error) << '\n';
  }
  return os.str();
}

std::string ResultsTable::ToText() const {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-14s %20s %18s %22s %20s\n", "Test datasets",
                "best_ctc_labelError", "best_ctc_seqError", "best_label_labelError",
                "best_label_seqError");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-14s %20s %18s %22s %20s\n", r.dataset.c_str(),
                  FormatPercent(r.best_ctc_label_error).c_str(),
                  FormatPercent(r.best_ctc_seq_error).c_str(),
                  FormatPercent(r.best_label_label_error).c_str(),
                  FormatPercent(r.best_label_seq_error).c_str());
    os << line;
  }
  return os.str();
}

fs::path CellDir(const fs::path& out, const std::string& dataset, std::uint64_t seed) {
  return out / "cells" / dataset / ("seed_" + std::to_string(seed));
}

namespace {

json TrackedToJson(const TrackedModel& m) {
  return {{"epoch", m.epoch}, {"test", ToJson(m.test)}};
}

void TrackedFromJson(const json& j, TrackedModel& m) {
  m.epoch = j.at("epoch").get<int>();
  m.test = EvalReportFromJson(j.at("test"));
}

CellResult ReadCellResult(const fs::path& dir) {
  std::ifstream in(dir / "result.json");
  if (!in) throw DataError("missing result.json in " + dir.string());
  try {
    const json j = json::parse(in);
    CellResult r;
    r.dataset = j.at("dataset").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.epochs_run = j.at("epochs_run").get<int>();
    r.stopped_early = j.at("stopped_early").get<bool>();
    TrackedFromJson(j.at("best_by_ctc"), r.tracker.mutable_best_by_ctc());
    TrackedFromJson(j.at("best_by_label"), r.tracker.mutable_best_by_label());
    return r;
  } catch (const json::exception& e) {
    throw DataError("malformed result.json in " + dir.string() + ": " + e.what());
  }
}

std::string RunName(const std::string& dataset, std::uint64_t seed) {
  return dataset + "/seed_" + std::to_string(seed);
}

}  // namespace

CellResult RunCell(const ExperimentConfig& cfg, const DatasetSplit& split,
                   const Alphabet& alphabet) {
  const fs::path dir = CellDir(cfg.output_dir, split.dataset_name, split.seed);
  if (fs::exists(dir / "result.json")) {
    CellResult r = ReadCellResult(dir);
    r.skipped = true;
    return r;
  }
  fs::create_directories(dir);

  Hyperparams hp = cfg.hp;
  hp.seed = split.seed;
  const json config = ToJson(cfg);

  FitOptions opts;
  opts.checkpoint_path = dir / "checkpoint.ckpt";
  opts.config_json = config.dump();
  if (fs::exists(*opts.checkpoint_path)) {
    Checkpoint ckpt = LoadCheckpoint(*opts.checkpoint_path);
    if (ckpt.training && ckpt.alphabet == alphabet && ckpt.seed == hp.seed) {
      opts.resume_from = std::move(ckpt.training);
    }
  }
  const FitResult fit = Fit(split, alphabet, hp, cfg.net, opts);
  const TrainerState& st = fit.state;

  for (const auto& [file, model] :
       {std::pair{"best_by_ctc.ckpt", &st.tracker.best_by_ctc()},
        std::pair{"best_by_label.ckpt", &st.tracker.best_by_label()}}) {
    Checkpoint ckpt;
    ckpt.params = model->params;
    ckpt.alphabet = alphabet;
    ckpt.seed = hp.seed;
    ckpt.config = config;
    ckpt.config["selected_epoch"] = model->epoch;
    SaveCheckpoint(dir / file, ckpt);
  }
  WriteEpochLogCsv(dir / "epochs.csv", st.logs);
  WriteFileAtomic(dir / "plot_data.csv", PlotDataCsv(RunName(split.dataset_name, split.seed), st.logs));

  CellResult r;
  r.dataset = split.dataset_name;
  r.seed = split.seed;
  r.tracker = st.tracker;
  r.epochs_run = st.epochs_completed;
  r.stopped_early = st.stopped_early;
  json result{{"dataset", r.dataset},
              {"seed", r.seed},
              {"epochs_run", r.epochs_run},
              {"stopped_early", r.stopped_early},
              {"config_hash", ConfigHash(cfg)},
              {"best_by_ctc", TrackedToJson(st.tracker.best_by_ctc())},
              {"best_by_label", TrackedToJson(st.tracker.best_by_label())}};
  WriteFileAtomic(dir / "result.json", result.dump(1));
  return r;
}

MatrixResult RunMatrix(const ExperimentConfig& cfg) {
  cfg.Validate();
  fs::create_directories(cfg.output_dir);
  json manifest{{"config", ToJson(cfg)},
                {"config_hash", ConfigHash(cfg)},
                {"checkpoint_version", kCheckpointVersion}};
  WriteFileAtomic(cfg.output_dir / "manifest.json", manifest.dump(1));

  const Corpus corpus = LoadExperimentCorpus(cfg);
  const Alphabet alphabet = BuildAlphabet(corpus);
  const RenderedFonts rendered = RenderExperimentFonts(corpus, cfg);
  const std::vector<DatasetSplit> splits = BuildExperimentDatasets(rendered, cfg.seeds);

  std::vector<CellResult> cells(splits.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  auto worker = [&]() {
    for (std::size_t i = next++; i < splits.size(); i = next++) {
      const auto& split = splits[i];
      try {
        cells[i] = RunCell(cfg, split, alphabet);
      } catch (const std::exception& e) {
        cells[i].dataset = split.dataset_name;
        cells[i].seed = split.seed;
        cells[i].error = e.what();
      }
      std::lock_guard lock(log_mu);
      const auto& c = cells[i];
      std::cerr << "[matrix] " << RunName(c.dataset, c.seed) << ": "
                << (!c.error.empty() ? "FAILED: " + c.error
                                     : c.skipped ? std::string("already complete")
                                                 : "done after " + std::to_string(c.epochs_run) +
                                                       " epochs")
                << '\n';
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < cfg.jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<std::string> datasets = rendered.font_names;
  datasets.insert(datasets.begin(), kCombinedDatasetName);
  MatrixResult result = BuildReport(cfg.output_dir, datasets, cfg.seeds);
  for (auto& c : cells) {
    if (!c.error.empty()) {
      result.failures.push_back(RunName(c.dataset, c.seed) + ": " + c.error);
    }
  }
  result.cells = std::move(cells);
  WriteReport(cfg.output_dir, result);
  return result;
}

MatrixResult BuildReport(const fs::path& out, const std::vector<std::string>& datasets,
                         std::span<const std::uint64_t> seeds) {
  MatrixResult result;
  for (const auto& dataset : datasets) {
    std::vector<BestModelTracker> trackers;
    for (std::uint64_t seed : seeds) {
      const fs::path dir = CellDir(out, dataset, seed);
      if (!fs::exists(dir / "result.json")) {
        result.failures.push_back(RunName(dataset, seed) + ": no result");
        continue;
      }
      CellResult c = ReadCellResult(dir);
      c.skipped = true;
      trackers.push_back(c.tracker);
      result.cells.push_back(std::move(c));
    }
    if (trackers.empty()) continue;
    const Selection sel = SelectBest(trackers);
    result.best.rows.push_back({dataset, sel.by_ctc.best.label_error, sel.by_ctc.best.seq_error,
                                sel.by_label.best.label_error, sel.by_label.best.seq_error});
    result.mean.rows.push_back({dataset, sel.by_ctc.mean.label_error, sel.by_ctc.mean.seq_error,
                                sel.by_label.mean.label_error, sel.by_label.mean.seq_error});
  }
  // Plot data for every completed cell, in table order.
  std::string plot = "run,epoch,metric,split,value\n";
  for (const auto& c : result.cells) {
    const fs::path csv = CellDir(out, c.dataset, c.seed) / "epochs.csv";
    if (fs::exists(csv)) plot += PlotDataCsv(RunName(c.dataset, c.seed), ReadEpochLogCsv(csv), false);
  }
  fs::create_directories(out);
  WriteFileAtomic(out / "plot_data.csv", plot);
  return result;
}

void WriteReport(const fs::path& out, const MatrixResult& result) {
  fs::create_directories(out);
  WriteFileAtomic(out / "table_best.csv", result.best.ToCsv());
  WriteFileAtomic(out / "table_mean.csv", result.mean.ToCsv());
  std::ostringstream text;
  text << "Best models (minimum over repetitions)\n" << result.best.ToText() << '\n'
       << "Averaged models (mean over repetitions)\n" << result.mean.ToText();

  // Combined-dataset effect, reported but not enforced.
  const ResultsRow* all = nullptr;
  double best_single = -1;
  for (const auto& r : result.best.rows) {
    if (r.dataset == kCombinedDatasetName) {
      all = &r;
    } else if (best_single < 0 || r.best_label_label_error < best_single) {
      best_single = r.best_label_label_error;
    }
  }
  if (all && best_single >= 0) {
    text << "\nCombined-dataset check: all=" << FormatPercent(all->best_label_label_error)
         << " best single font=" << FormatPercent(best_single)
         << (all->best_label_label_error <= best_single ? " (all <= single)\n"
                                                        : " (all > single)\n");
  }
  if (!result.failures.empty()) {
    text << "\nFailures:\n";
    for (const auto& f : result.failures) text << "  " << f << '\n';
  }
  WriteFileAtomic(out / "tables.txt", text.str());
}

std::string PlotDataCsv(const std::string& run, std::span<const EpochLog> logs, bool header) {
  std::ostringstream os;
  if (header) os << "run,epoch,metric,split,value\n";
  char num[40];
  for (const auto& log : logs) {
    for (const auto& [split, r] : {std::pair{"train", &log.train}, std::pair{"test", &log.test}}) {
      for (const auto& [metric, v] : {std::pair{"ctc_error", r->ctc_error},
                                      std::pair{"label_error", r->label_error},
                                      std::pair{"seq_error", r->seq_error}}) {
        std::snprintf(num, sizeof(num), "%.17g", v);
        os << run << ',' << log.epoch << ',' << metric << ',' << split << ',' << num << '\n';
      }
    }
  }
  return os.str();
}

std::vector<EpochLog> ReadEpochLogCsv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<EpochLog> logs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 13) throw DataError("malformed epoch log row in " + path.string());
    EpochLog log;
    log.epoch = std::stoi(f[0]);
    auto fill = [&f](EvalReport& r, std::size_t o, const char* name) {
      r.dataset_name = name;
      r.ctc_error = std::stod(f[o]);
      r.label_error = std::stod(f[o + 1]);
      r.seq_error = std::stod(f[o + 2]);
      r.insertions = std::stoll(f[o + 3]);
      r.deletions = std::stoll(f[o + 4]);
      r.substitutions = std::stoll(f[o + 5]);
    };
    fill(log.train, 1, "train");
    fill(log.test, 7, "test");
    logs.push_back(log);
  }
  return logs;
}

}  // namespace lstmocr
