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

// Online steepest descent with momentum over BLSTM + CTC, per-epoch
// evaluation, best-model tracking and stopping policies.

#ifndef LSTMOCR_TRAINER_H_
#define LSTMOCR_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lstmocr/dataset.h"
#include "lstmocr/metrics.h"
#include "lstmocr/network.h"

namespace lstmocr {

enum class StopPolicy { kFixed, kEarlyStop };

std::string ToString(StopPolicy p);
StopPolicy ParseStopPolicy(const std::string& s);

struct Hyperparams {
  double learning_rate = 1e-4;
  double momentum = 0.9;
  int max_epochs = 80;
  StopPolicy stop_policy = StopPolicy::kFixed;
  int patience = 20;
  std::uint64_t seed = 0;
  // Element-wise gradient clipping at +-clip_value; off by default.
  bool clip_gradients = false;
  double clip_value = 1.0;
  // Samples per update. 1 is online training.
  int batch_size = 1;

  // Throws DataError on out-of-range values.
  void Validate() const;
};

struct NetConfig {
  int hidden_size = 100;
};

// velocity = momentum * velocity - learning_rate * grads; params += velocity.
// Throws NumericError if an update is non-finite.
void SgdMomentumStep(std::span<double> params, std::span<const double> grads,
                     std::span<double> velocity, const Hyperparams& hp);

struct EpochLog {
  int epoch = 0;
  EvalReport train;
  EvalReport test;
  double wall_seconds = 0.0;
};

struct TrackedModel {
  int epoch = 0;  // 0 until the first update
  NetworkParams params;
  EvalReport test;
};

// Keeps the lowest-test-CTC-error and lowest-test-label-error models.
// Ties keep the earlier epoch.
class BestModelTracker {
 public:
  void Update(int epoch, const NetworkParams& params, const EvalReport& test);

  const TrackedModel& best_by_ctc() const { return by_ctc_; }
  const TrackedModel& best_by_label() const { return by_label_; }
  TrackedModel& mutable_best_by_ctc() { return by_ctc_; }
  TrackedModel& mutable_best_by_label() { return by_label_; }

 private:
  TrackedModel by_ctc_;
  TrackedModel by_label_;
};

// Stops once `patience` epochs pass without a strict improvement of the
// observed error.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience = 20) : patience_(patience) {}

  // Returns true when training should stop after `epoch`.
  bool Observe(int epoch, double error);

  int patience() const { return patience_; }
  double best() const { return best_; }
  int last_improvement() const { return last_improvement_; }
  void Restore(double best, int last_improvement) {
    best_ = best;
    last_improvement_ = last_improvement;
  }

 private:
  int patience_;
  double best_ = std::numeric_limits<double>::infinity();
  int last_improvement_ = 0;
};

// Everything needed to continue a run after the last completed epoch.
struct TrainerState {
  int epochs_completed = 0;
  NetworkParams params;
  NetworkParams velocity;
  BestModelTracker tracker;
  EarlyStopper stopper;
  std::vector<EpochLog> logs;
  bool stopped_early = false;
};

// One epoch of work: updates `state.params`/`state.velocity` in place and
// returns the epoch's train and test reports.
using EpochFn = std::function<EpochLog(int epoch, TrainerState& state)>;
using EpochCallback = std::function<void(const TrainerState& state)>;

// Runs epochs state.epochs_completed + 1 .. max_epochs, updating the
// tracker and applying the stop policy after each one.
void RunTrainingLoop(const Hyperparams& hp, const EpochFn& run_epoch,
                     TrainerState& state,
                     const EpochCallback& on_epoch = nullptr);

// A sample prepared for the network: column frames plus encoded labels.
struct PreparedSample {
  FrameSequence frames;
  std::vector<int> labels;
};

// Encodes transcripts and checks CTC feasibility. Throws DataError.
std::vector<PreparedSample> PrepareSamples(std::span<const SamplePtr> samples,
                                           const Alphabet& alphabet);

// Forward, CTC and best-path decoding over `samples` in order.
EvalReport EvaluateModel(const NetworkParams& params,
                         std::span<const PreparedSample> samples,
                         const std::string& dataset_name);

// Decodes a single image to text.
std::string Recognize(const NetworkParams& params, const Alphabet& alphabet,
                      const GrayImage& image);

struct FitOptions {
  // Written after every epoch when set.
  std::optional<std::filesystem::path> checkpoint_path;
  // Continue from this state instead of fresh parameters.
  std::optional<TrainerState> resume_from;
  EpochCallback on_epoch;
  // Stored in checkpoints.
  std::string config_json;
};

struct FitResult {
  TrainerState state;
};

FitResult Fit(const DatasetSplit& split, const Alphabet& alphabet,
              const Hyperparams& hp, const NetConfig& net,
              const FitOptions& options = {});

// Epoch CSV: epoch, then ctc_error, label_error, seq_error, ins, del, sub
// for train and for test. Floats use round-trip precision.
std::string EpochLogCsv(std::span<const EpochLog> logs);
void WriteEpochLogCsv(const std::filesystem::path& path,
                      std::span<const EpochLog> logs);

// Per-criterion summary over repetitions.
struct CriterionSummary {
  EvalReport best;  // repetition with the lowest criterion value
  EvalReport mean;  // arithmetic mean of each repetition's tracked best
  int best_repetition = 0;
};

struct Selection {
  CriterionSummary by_ctc;
  CriterionSummary by_label;
};

// `runs[i]` is the tracker of repetition i. Throws DataError when empty.
Selection SelectBest(std::span<const BestModelTracker> runs);

// Element-wise mean of reports (integer tallies are averaged and rounded).
EvalReport MeanReport(std::span<const EvalReport> reports);

}  // namespace lstmocr

#endif  // LSTMOCR_TRAINER_H_
