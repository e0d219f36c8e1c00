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

// Command-line front end: dataset generation, preprocessing, training,
// evaluation, decoding and the full experiment matrix.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lstmocr/checkpoint.h"
#include "lstmocr/dataset.h"
#include "lstmocr/dataset_io.h"
#include "lstmocr/errors.h"
#include "lstmocr/harness.h"
#include "lstmocr/image_io.h"
#include "lstmocr/imaging.h"
#include "lstmocr/trainer.h"

namespace fs = std::filesystem;
using namespace lstmocr;

namespace {

fs::path DefaultDataDir() {
  if (const char* env = std::getenv("LSTMOCR_DATA_DIR")) return env;
  return LSTMOCR_DATA_DIR;
}

// Flags that override fields of an ExperimentConfig.
struct ConfigFlags {
  std::string config;
  std::string preset = "paper";
  std::string data_dir = DefaultDataDir().string();
  std::optional<std::string> corpus;
  std::optional<int> corpus_limit;
  std::optional<std::vector<std::string>> fonts;  // name=file
  std::optional<std::string> sample_mode;
  std::optional<int> height;
  std::optional<int> epsilon;
  std::optional<int> gap_min;
  std::optional<int> line_gap_min;
  std::optional<int> hidden;
  std::optional<double> lr;
  std::optional<double> momentum;
  std::optional<int> epochs;
  std::optional<std::string> stop_policy;
  std::optional<int> patience;
  std::optional<bool> clip;
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<std::string> out;
  std::optional<int> jobs;

  void Register(CLI::App* app, bool training) {
    app->add_option("--config", config, "JSON experiment config");
    app->add_option("--preset", preset, "paper | desk")->check(CLI::IsMember({"paper", "desk"}));
    app->add_option("--data-dir", data_dir, "Bundled corpus/fonts directory");
    app->add_option("--corpus", corpus, "Word list, one word per line");
    app->add_option("--corpus-limit", corpus_limit, "Use only the first N words (0 = all)");
    app->add_option("--font", fonts, "Font as NAME=FILE (repeatable)");
    app->add_option("--sample-mode", sample_mode, "word | page")
        ->check(CLI::IsMember({"word", "page"}));
    app->add_option("--height", height, "Normalized word height H");
    app->add_option("--epsilon", epsilon, "Projection noise threshold");
    app->add_option("--gap-min", gap_min, "Minimum blank columns between words");
    app->add_option("--line-gap-min", line_gap_min, "Minimum blank rows between lines");
    app->add_option("--seeds", seeds, "Repetition seeds");
    app->add_option("--out", out, "Output directory");
    if (!training) return;
    app->add_option("--hidden", hidden, "LSTM blocks per direction");
    app->add_option("--lr", lr, "Learning rate");
    app->add_option("--momentum", momentum, "Momentum");
    app->add_option("--epochs", epochs, "Maximum epochs");
    app->add_option("--stop-policy", stop_policy, "fixed | early_stop")
        ->check(CLI::IsMember({"fixed", "early_stop"}));
    app->add_option("--patience", patience, "Early-stopping patience");
    app->add_option("--clip", clip, "Clip gradients to +-1");
    app->add_option("--jobs", jobs, "Parallel matrix cells");
  }

  ExperimentConfig Build() const {
    ExperimentConfig cfg;
    if (!config.empty()) {
      cfg = LoadConfig(config, data_dir);
    } else {
      cfg = ParsePreset(preset) == Preset::kPaper ? PaperPreset(data_dir) : DeskPreset(data_dir);
    }
    if (corpus) cfg.corpus_path = *corpus;
    if (corpus_limit) cfg.corpus_limit = *corpus_limit;
    if (fonts) {
      cfg.fonts.clear();
      for (const auto& f : *fonts) {
        const auto eq = f.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--font", "expected NAME=FILE");
        cfg.fonts.push_back({f.substr(0, eq), f.substr(eq + 1), 14.0});
      }
    }
    if (sample_mode) cfg.sample_mode = *sample_mode;
    if (height) cfg.preprocess.height = *height;
    if (epsilon) cfg.preprocess.segmentation.epsilon = *epsilon;
    if (gap_min) cfg.preprocess.segmentation.gap_min = *gap_min;
    if (line_gap_min) cfg.preprocess.segmentation.line_gap_min = *line_gap_min;
    if (hidden) cfg.net.hidden_size = *hidden;
    if (lr) cfg.hp.learning_rate = *lr;
    if (momentum) cfg.hp.momentum = *momentum;
    if (epochs) cfg.hp.max_epochs = *epochs;
    if (stop_policy) cfg.hp.stop_policy = ParseStopPolicy(*stop_policy);
    if (patience) cfg.hp.patience = *patience;
    if (clip) cfg.hp.clip_gradients = *clip;
    if (seeds) cfg.seeds = *seeds;
    if (out) cfg.output_dir = *out;
    if (jobs) cfg.jobs = *jobs;
    return cfg;
  }
};

void PrintReport(const EvalReport& r) { std::cout << ToJson(r).dump(2) << '\n'; }

int Generate(const ConfigFlags& flags) {
  const ExperimentConfig cfg = flags.Build();
  cfg.Validate();
  const Corpus corpus = LoadExperimentCorpus(cfg);
  const Alphabet alphabet = BuildAlphabet(corpus);
  const RenderedFonts rendered = RenderExperimentFonts(corpus, cfg);
  const auto splits = BuildExperimentDatasets(rendered, cfg.seeds);
  const fs::path dir = cfg.output_dir / "dataset";
  WriteDataset(dir, rendered, splits, alphabet,
               {{"sample_mode", cfg.sample_mode},
                {"height", cfg.preprocess.height},
                {"config", ToJson(cfg)},
                {"config_hash", ConfigHash(cfg)}});
  std::cout << "wrote " << rendered.Combined().size() << " samples, " << splits.size()
            << " splits to " << dir << '\n';
  return 0;
}

int Preprocess(const std::string& image, const std::string& out, const std::string& mode,
               const ConfigFlags& flags) {
  const ExperimentConfig cfg = flags.Build();
  const GrayImage gray = ReadImage(image);
  fs::create_directories(out);
  if (mode == "word") {
    WriteImage(fs::path(out) / "word.pgm", PreprocessWord(gray, cfg.preprocess));
    std::cout << "1 word\n";
    return 0;
  }
  const BinaryImage page = BinarizeOtsu(gray);
  const auto& seg = cfg.preprocess.segmentation;
  const auto lines = SegmentLines(page, seg);
  int n_words = 0;
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const auto words = SegmentWords(lines[l], seg);
    for (std::size_t w = 0; w < words.size(); ++w) {
      char name[64];
      std::snprintf(name, sizeof(name), "line%03zu_word%03zu.pgm", l, w);
      WriteImage(fs::path(out) / name,
                 NormalizeHeight(TightCropUnitPad(words[w]), cfg.preprocess.height));
      ++n_words;
    }
    std::cout << "line " << l << ": " << words.size() << " words\n";
  }
  std::cout << lines.size() << " lines, " << n_words << " words\n";
  return 0;
}

int Train(const ConfigFlags& flags, const std::string& data, const std::string& dataset,
          std::uint64_t seed) {
  ExperimentConfig cfg = flags.Build();
  cfg.seeds = {seed};
  cfg.hp.Validate();
  if (!data.empty()) {
    const DatasetOnDisk ds = ReadDataset(data);
    const CellResult r = RunCell(cfg, ds.Find(dataset, seed), ds.alphabet());
    std::cout << (r.skipped ? "already complete: " : "trained: ") << dataset << " seed " << seed
              << ", " << r.epochs_run << " epochs\n";
    PrintReport(r.tracker.best_by_label().test);
    return 0;
  }
  const Corpus corpus = LoadExperimentCorpus(cfg);
  const Alphabet alphabet = BuildAlphabet(corpus);
  const RenderedFonts rendered = RenderExperimentFonts(corpus, cfg);
  const DatasetSplit split = Split8020(rendered.Source(dataset), seed, dataset);
  const CellResult r = RunCell(cfg, split, alphabet);
  std::cout << (r.skipped ? "already complete: " : "trained: ") << dataset << " seed " << seed
            << ", " << r.epochs_run << " epochs\n";
  PrintReport(r.tracker.best_by_label().test);
  return 0;
}

int Evaluate(const std::string& checkpoint, const std::string& data, const std::string& dataset,
             std::uint64_t seed, const std::string& part) {
  const Checkpoint ckpt = LoadCheckpoint(checkpoint);
  const DatasetOnDisk ds = ReadDataset(data);
  const DatasetSplit& split = ds.Find(dataset, seed);
  const auto& samples = part == "train" ? split.train : split.test;
  PrintReport(EvaluateModel(ckpt.params, PrepareSamples(samples, ckpt.alphabet),
                            dataset + "/" + part));
  return 0;
}

int Decode(const std::string& checkpoint, const std::vector<std::string>& images, bool raw) {
  const Checkpoint ckpt = LoadCheckpoint(checkpoint);
  PreprocessOptions opts;
  opts.height = ckpt.config.value("height", opts.height);
  for (const auto& path : images) {
    GrayImage img = ReadImage(path);
    if (!raw) img = PreprocessWord(img, opts);
    if (img.height() != ckpt.params.dims().input_size) {
      throw DataError("image height " + std::to_string(img.height()) +
                      " does not match the network input size " +
                      std::to_string(ckpt.params.dims().input_size));
    }
    std::cout << path << '\t' << Recognize(ckpt.params, ckpt.alphabet, img) << '\n';
  }
  return 0;
}

int RunMatrixCommand(const ConfigFlags& flags) {
  const MatrixResult r = RunMatrix(flags.Build());
  std::cout << "Best models\n" << r.best.ToText() << "\nAveraged models\n" << r.mean.ToText();
  for (const auto& f : r.failures) std::cerr << "failed: " << f << '\n';
  return r.failures.empty() ? 0 : 2;
}

int Report(const std::string& out) {
  std::ifstream in(fs::path(out) / "manifest.json");
  if (!in) throw DataError("no manifest.json in " + out);
  const nlohmann::json manifest = nlohmann::json::parse(in);
  const ExperimentConfig cfg = ConfigFromJson(manifest.at("config"), ExperimentConfig{}, {});
  std::vector<std::string> datasets{kCombinedDatasetName};
  for (const auto& f : cfg.fonts) datasets.push_back(f.name);
  const MatrixResult r = BuildReport(out, datasets, cfg.seeds);
  WriteReport(out, r);
  std::cout << "Best models\n" << r.best.ToText() << "\nAveraged models\n" << r.mean.ToText();
  for (const auto& f : r.failures) std::cerr << "missing: " << f << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Word-level OCR with a bidirectional LSTM and CTC"};
  app.require_subcommand(1);

  ConfigFlags gen_flags, pre_flags, train_flags, matrix_flags;

  auto* generate = app.add_subcommand("generate", "Render the corpus and write datasets");
  gen_flags.Register(generate, false);

  std::string pre_image, pre_out = "preprocessed", pre_mode = "page";
  auto* preprocess = app.add_subcommand("preprocess", "Segment and normalize an external image");
  pre_flags.Register(preprocess, false);
  preprocess->add_option("--image", pre_image, "Input image (.pgm or .png)")->required();
  preprocess->add_option("--words-out", pre_out, "Directory for word images");
  preprocess->add_option("--mode", pre_mode, "page | word")->check(CLI::IsMember({"page", "word"}));

  std::string train_data, train_dataset = kCombinedDatasetName;
  std::uint64_t train_seed = 1;
  auto* train = app.add_subcommand("train", "Train one (dataset, seed) cell");
  train_flags.Register(train, true);
  train->add_option("--data", train_data, "Dataset directory from `generate`");
  train->add_option("--dataset", train_dataset, "Font name or all");
  train->add_option("--seed", train_seed, "Split and initialization seed");

  std::string eval_ckpt, eval_data, eval_dataset = kCombinedDatasetName, eval_part = "test";
  std::uint64_t eval_seed = 1;
  auto* evaluate = app.add_subcommand("evaluate", "Score a checkpoint on a dataset split");
  evaluate->add_option("--checkpoint", eval_ckpt)->required();
  evaluate->add_option("--data", eval_data, "Dataset directory from `generate`")->required();
  evaluate->add_option("--dataset", eval_dataset, "Font name or all");
  evaluate->add_option("--seed", eval_seed);
  evaluate->add_option("--split", eval_part)->check(CLI::IsMember({"train", "test"}));

  std::string dec_ckpt;
  std::vector<std::string> dec_images;
  bool dec_raw = false;
  auto* decode = app.add_subcommand("decode", "Transcribe word images");
  decode->add_option("--checkpoint", dec_ckpt)->required();
  decode->add_option("--image", dec_images, "Word image(s)")->required();
  decode->add_flag("--raw", dec_raw, "Image is already binarized and height-normalized");

  auto* matrix = app.add_subcommand("matrix", "Train every (dataset, seed) cell and report");
  matrix_flags.Register(matrix, true);

  std::string report_out = "runs/paper";
  auto* report = app.add_subcommand("report", "Rebuild tables and plot data from a run directory");
  report->add_option("--out", report_out, "Matrix output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*generate) return Generate(gen_flags);
    if (*preprocess) return Preprocess(pre_image, pre_out, pre_mode, pre_flags);
    if (*train) return Train(train_flags, train_data, train_dataset, train_seed);
    if (*evaluate) return Evaluate(eval_ckpt, eval_data, eval_dataset, eval_seed, eval_part);
    if (*decode) return Decode(dec_ckpt, dec_images, dec_raw);
    if (*matrix) return RunMatrixCommand(matrix_flags);
    if (*report) return Report(report_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
