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

// Experiment orchestration: configuration and presets, the dataset x seed
// training matrix, result tables and plot data.

#ifndef LSTMOCR_HARNESS_H_
#define LSTMOCR_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lstmocr/dataset.h"
#include "lstmocr/trainer.h"

namespace lstmocr {

enum class Preset { kPaper, kDesk };

std::string ToString(Preset p);
Preset ParsePreset(const std::string& s);

struct ExperimentConfig {
  Preset preset = Preset::kPaper;
  std::filesystem::path corpus_path;
  int corpus_limit = 0;  // first N corpus words; 0 keeps all
  std::vector<FontSpec> fonts;
  PreprocessOptions preprocess;
  std::string sample_mode = "word";  // "word" or "page"
  NetConfig net;
  Hyperparams hp;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir = "runs";
  int jobs = 1;

  // The paper preset needs exactly six fonts and five seeds; the desk preset
  // accepts fewer. Seeds must be distinct. Throws DataError.
  void Validate() const;
};

// Full protocol: 5,000-word corpus, six fonts, 80 epochs, 5 seeds.
ExperimentConfig PaperPreset(const std::filesystem::path& data_dir);
// Reduced protocol: 300 words, two fonts, N = 64, 40 epochs, 3 seeds.
ExperimentConfig DeskPreset(const std::filesystem::path& data_dir);

nlohmann::json ToJson(const ExperimentConfig& cfg);
// Fields missing from `j` keep the values of `base`. Relative font and
// corpus paths resolve against `base_dir`.
ExperimentConfig ConfigFromJson(const nlohmann::json& j, ExperimentConfig base,
                                const std::filesystem::path& base_dir = {});
ExperimentConfig LoadConfig(const std::filesystem::path& path,
                            const std::filesystem::path& data_dir);

// Hex FNV-1a of the canonical JSON form.
std::string ConfigHash(const ExperimentConfig& cfg);

// Corpus truncated to corpus_limit.
Corpus LoadExperimentCorpus(const ExperimentConfig& cfg);

RenderedFonts RenderExperimentFonts(const Corpus& corpus, const ExperimentConfig& cfg);

struct ResultsRow {
  std::string dataset;
  double best_ctc_label_error = 0.0;
  double best_ctc_seq_error = 0.0;
  double best_label_label_error = 0.0;
  double best_label_seq_error = 0.0;
};

struct ResultsTable {
  std::vector<ResultsRow> rows;  // "all" first, then fonts in config order

  const ResultsRow& Row(const std::string& dataset) const;
  // Header "Test datasets,best_ctc_labelError,..." with percent cells.
  std::string ToCsv() const;
  std::string ToText() const;
};

// Outcome of one (dataset, seed) cell.
struct CellResult {
  std::string dataset;
  std::uint64_t seed = 0;
  BestModelTracker tracker;  // test reports only; parameters live on disk
  int epochs_run = 0;
  bool stopped_early = false;
  bool skipped = false;  // loaded from a previous run
  std::string error;     // non-empty when the cell failed
};

struct MatrixResult {
  ResultsTable best;
  ResultsTable mean;
  std::vector<CellResult> cells;
  std::vector<std::string> failures;
};

// Cell output directory: <out>/cells/<dataset>/seed_<seed>.
std::filesystem::path CellDir(const std::filesystem::path& out,
                              const std::string& dataset, std::uint64_t seed);

// Trains (or resumes) one cell and writes its artifacts.
CellResult RunCell(const ExperimentConfig& cfg, const DatasetSplit& split,
                   const Alphabet& alphabet);

// Every dataset x seed cell on a `cfg.jobs`-thread work queue. Completed
// cells are skipped; failed cells are recorded and the rest continue.
MatrixResult RunMatrix(const ExperimentConfig& cfg);

// Rebuilds tables and plot data from the cell directories under `out`.
MatrixResult BuildReport(const std::filesystem::path& out,
                         const std::vector<std::string>& datasets,
                         std::span<const std::uint64_t> seeds);

// Writes best/mean tables, combined plot data and the summary to `out`.
void WriteReport(const std::filesystem::path& out, const MatrixResult& result);

// Long format: run,epoch,metric,split,value; metrics ctc_error,
// label_error, seq_error; splits train, test.
std::string PlotDataCsv(const std::string& run, std::span<const EpochLog> logs,
                        bool header = true);

// Read back an epoch CSV written by WriteEpochLogCsv.
std::vector<EpochLog> ReadEpochLogCsv(const std::filesystem::path& path);

}  // namespace lstmocr

#endif  // LSTMOCR_HARNESS_H_
