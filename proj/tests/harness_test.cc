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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lstmocr/errors.h"

namespace lstmocr {
namespace {

namespace fs = std::filesystem;

const fs::path kData = LSTMOCR_DATA_DIR;

std::vector<EpochLog> SyntheticLogs(int n) {
  std::vector<EpochLog> logs;
  for (int e = 1; e <= n; ++e) {
    EpochLog log;
    log.epoch = e;
    log.train = {"train", 10, 10.0 / e, 0.5 / e, 0.9 / e, e, 2 * e, 3 * e};
    log.test = {"test", 5, 12.0 / e, 0.6 / e, 1.0 / e, e, e, e};
    logs.push_back(log);
  }
  return logs;
}

std::vector<std::string> Lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(PlotDataTest, RowCountOrderAndValues) {
  const auto logs = SyntheticLogs(80);
  const auto lines = Lines(PlotDataCsv("all/seed_1", logs));
  ASSERT_EQ(lines.size(), 481u);
  EXPECT_EQ(lines[0], "run,epoch,metric,split,value");
  int prev_epoch = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> f;
    std::stringstream ss(lines[i]);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    ASSERT_EQ(f.size(), 5u);
    EXPECT_EQ(f[0], "all/seed_1");
    const int epoch = std::stoi(f[1]);
    EXPECT_GE(epoch, prev_epoch);
    prev_epoch = epoch;
    const EvalReport& r = f[3] == "train" ? logs[epoch - 1].train : logs[epoch - 1].test;
    const double expected = f[2] == "ctc_error"     ? r.ctc_error
                            : f[2] == "label_error" ? r.label_error
                                                    : r.seq_error;
    EXPECT_EQ(std::stod(f[4]), expected) << lines[i];
  }
}

TEST(EpochCsvTest, RoundTrip) {
  const auto logs = SyntheticLogs(7);
  const fs::path path = fs::temp_directory_path() / "lstmocr_epochs_test.csv";
  WriteEpochLogCsv(path, logs);
  const auto back = ReadEpochLogCsv(path);
  ASSERT_EQ(back.size(), logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    EXPECT_EQ(back[i].epoch, logs[i].epoch);
    EXPECT_EQ(back[i].test.label_error, logs[i].test.label_error);
    EXPECT_EQ(back[i].train.substitutions, logs[i].train.substitutions);
  }
  fs::remove(path);
}

TEST(ResultsTableTest, Schema) {
  ResultsTable t;
  t.rows.push_back({"all", 0.0000650, 0.0004444, 0.0000650, 0.0004444});
  t.rows.push_back({"Arial_14", 0.01, 0.02, 0.03, 0.04});
  const auto lines = Lines(t.ToCsv());
  EXPECT_EQ(lines[0],
            "Test datasets,best_ctc_labelError,best_ctc_seqError,best_label_labelError,"
            "best_label_seqError");
  EXPECT_EQ(lines[1], "all,0.00650%,0.04444%,0.00650%,0.04444%");
  EXPECT_EQ(t.Row("Arial_14").best_label_seq_error, 0.04);
  EXPECT_THROW(t.Row("Comic_14"), DataError);
}

TEST(ConfigTest, PresetsAndJsonRoundTrip) {
  const ExperimentConfig paper = PaperPreset(kData);
  EXPECT_NO_THROW(paper.Validate());
  EXPECT_EQ(paper.fonts.size(), 6u);
  EXPECT_EQ(paper.seeds.size(), 5u);
  EXPECT_EQ(paper.hp.learning_rate, 1e-4);
  EXPECT_EQ(paper.hp.momentum, 0.9);
  EXPECT_EQ(paper.hp.max_epochs, 80);
  const ExperimentConfig desk = DeskPreset(kData);
  EXPECT_NO_THROW(desk.Validate());
  EXPECT_EQ(desk.corpus_limit, 300);
  EXPECT_EQ(desk.fonts.size(), 2u);
  EXPECT_EQ(desk.net.hidden_size, 64);
  EXPECT_EQ(desk.hp.max_epochs, 40);

  const ExperimentConfig back = ConfigFromJson(ToJson(desk), PaperPreset(kData), {});
  EXPECT_EQ(ToJson(back), ToJson(desk));
  EXPECT_EQ(ConfigHash(back), ConfigHash(desk));
  ExperimentConfig other = desk;
  other.hp.learning_rate = 1e-3;
  EXPECT_NE(ConfigHash(other), ConfigHash(desk));
  other = desk;
  other.jobs = 4;
  EXPECT_EQ(ConfigHash(other), ConfigHash(desk));
}

TEST(ConfigTest, BundledConfigFilesMatchPresets) {
  const fs::path dir = kData.parent_path() / "configs";
  EXPECT_EQ(ToJson(LoadConfig(dir / "paper.json", kData)), ToJson(PaperPreset(kData)));
  EXPECT_EQ(ToJson(LoadConfig(dir / "desk.json", kData)), ToJson(DeskPreset(kData)));
}

TEST(ConfigTest, Validation) {
  ExperimentConfig c = PaperPreset(kData);
  c.fonts.pop_back();
  EXPECT_THROW(c.Validate(), DataError);
  c = PaperPreset(kData);
  c.seeds = {1, 2, 3, 4, 4};
  EXPECT_THROW(c.Validate(), DataError);
  c = DeskPreset(kData);
  c.sample_mode = "line";
  EXPECT_THROW(c.Validate(), DataError);
  EXPECT_THROW(ConfigFromJson({{"stop_policy", "sometimes"}}, c, {}), DataError);
}

// The full protocol shape on a tiny problem: 6 fonts x 5 seeds + "all".
TEST(MatrixTest, TablesAndResumability) {
  ExperimentConfig cfg = PaperPreset(kData);
  cfg.corpus_limit = 10;
  cfg.preprocess.height = 16;
  cfg.net.hidden_size = 3;
  cfg.hp.max_epochs = 2;
  cfg.hp.learning_rate = 1e-3;
  cfg.output_dir = fs::temp_directory_path() / "lstmocr_matrix_test";
  fs::remove_all(cfg.output_dir);

  const MatrixResult first = RunMatrix(cfg);
  EXPECT_TRUE(first.failures.empty());
  ASSERT_EQ(first.best.rows.size(), 7u);
  ASSERT_EQ(first.mean.rows.size(), 7u);
  EXPECT_EQ(first.best.rows[0].dataset, "all");
  EXPECT_EQ(first.cells.size(), 35u);
  for (const auto& c : first.cells) EXPECT_FALSE(c.skipped);
  for (const auto& r : first.best.rows) {
    EXPECT_GE(r.best_ctc_label_error, 0.0);
    EXPECT_GE(r.best_label_seq_error, 0.0);
    EXPECT_LE(r.best_label_label_error, first.mean.Row(r.dataset).best_label_label_error);
  }
  for (const char* f : {"table_best.csv", "table_mean.csv", "tables.txt", "plot_data.csv",
                        "manifest.json"}) {
    EXPECT_TRUE(fs::exists(cfg.output_dir / f)) << f;
  }
  const auto plot = Lines([&] {
    std::ifstream in(cfg.output_dir / "plot_data.csv");
    return std::string(std::istreambuf_iterator<char>(in), {});
  }());
  EXPECT_EQ(plot.size(), 1u + 35u * 2u * 3u * 2u);

  const std::string table_before = first.best.ToCsv();
  fs::remove_all(CellDir(cfg.output_dir, "Cambria_14", 3));
  const MatrixResult second = RunMatrix(cfg);
  int retrained = 0;
  for (const auto& c : second.cells) {
    if (!c.skipped) {
      ++retrained;
      EXPECT_EQ(c.dataset, "Cambria_14");
      EXPECT_EQ(c.seed, 3u);
    }
  }
  EXPECT_EQ(retrained, 1);
  EXPECT_EQ(second.best.ToCsv(), table_before);
  EXPECT_EQ(second.mean.ToCsv(), first.mean.ToCsv());
  fs::remove_all(cfg.output_dir);
}

}  // namespace
}  // namespace lstmocr
