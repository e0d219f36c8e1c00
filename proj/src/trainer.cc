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

#include "lstmocr/trainer.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "lstmocr/checkpoint.h"
#include "lstmocr/ctc.h"
#include "lstmocr/errors.h"
#include "lstmocr/random.h"

namespace lstmocr {

std::string ToString(StopPolicy p) {
  return p == StopPolicy::kFixed ? "fixed" : "early_stop";
}

StopPolicy ParseStopPolicy(const std::string& s) {
  if (s == "fixed") return StopPolicy::kFixed;
  if (s == "early_stop") return StopPolicy::kEarlyStop;
  throw DataError("unknown stop policy '" + s + "' (fixed | early_stop)");
}

void Hyperparams::Validate() const {
  if (!(learning_rate > 0)) throw DataError("learning_rate must be positive");
  if (!(momentum >= 0 && momentum < 1)) throw DataError("momentum must be in [0, 1)");
  if (max_epochs < 1) throw DataError("max_epochs must be at least 1");
  if (patience < 1) throw DataError("patience must be at least 1");
  if (batch_size < 1) throw DataError("batch_size must be at least 1");
  if (clip_gradients && !(clip_value > 0)) throw DataError("clip_value must be positive");
}

void SgdMomentumStep(std::span<double> params, std::span<const double> grads,
                     std::span<double> velocity, const Hyperparams& hp) {
  if (params.size() != grads.size() || params.size() != velocity.size()) {
    throw DataError("parameter, gradient and velocity sizes differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    double g = grads[i];
    if (hp.clip_gradients) g = std::clamp(g, -hp.clip_value, hp.clip_value);
    const double v = hp.momentum * velocity[i] - hp.learning_rate * g;
    const double p = params[i] + v;
    if (!std::isfinite(v) || !std::isfinite(p)) {
      throw NumericError("non-finite update at parameter " + std::to_string(i) +
                         " (gradient " + std::to_string(grads[i]) + ")");
    }
    velocity[i] = v;
    params[i] = p;
  }
}

void BestModelTracker::Update(int epoch, const NetworkParams& params,
                              const EvalReport& test) {
  if (by_ctc_.epoch == 0 || test.ctc_error < by_ctc_.test.ctc_error) {
    by_ctc_ = {epoch, params, test};
  }
  if (by_label_.epoch == 0 || test.label_error < by_label_.test.label_error) {
    by_label_ = {epoch, params, test};
  }
}

bool EarlyStopper::Observe(int epoch, double error) {
  if (error < best_) {
    best_ = error;
    last_improvement_ = epoch;
  }
  return epoch - last_improvement_ >= patience_;
}

void RunTrainingLoop(const Hyperparams& hp, const EpochFn& run_epoch,
                     TrainerState& state, const EpochCallback& on_epoch) {
  hp.Validate();
  if (state.stopped_early) return;
  for (int epoch = state.epochs_completed + 1; epoch <= hp.max_epochs; ++epoch) {
    EpochLog log = run_epoch(epoch, state);
    log.epoch = epoch;
    state.tracker.Update(epoch, state.params, log.test);
    const bool stop = state.stopper.Observe(epoch, log.test.label_error);
    state.logs.push_back(std::move(log));
    state.epochs_completed = epoch;
    if (hp.stop_policy == StopPolicy::kEarlyStop && stop) state.stopped_early = true;
    if (on_epoch) on_epoch(state);
    if (state.stopped_early) break;
  }
}

std::vector<PreparedSample> PrepareSamples(std::span<const SamplePtr> samples,
                                           const Alphabet& alphabet) {
  std::vector<PreparedSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    if (s->transcript.empty()) throw DataError("sample has an empty transcript");
    PreparedSample p{FrameSequence::FromImage(s->image), alphabet.Encode(s->transcript)};
    if (p.frames.length() < RequiredFrames(p.labels)) {
      throw DataError("infeasible label length: '" + s->transcript + "' needs " +
                      std::to_string(RequiredFrames(p.labels)) + " columns, image has " +
                      std::to_string(p.frames.length()));
    }
    out.push_back(std::move(p));
  }
  return out;
}

EvalReport EvaluateModel(const NetworkParams& params,
                         std::span<const PreparedSample> samples,
                         const std::string& dataset_name) {
  std::vector<ScoredSequence> scored;
  scored.reserve(samples.size());
  for (const auto& s : samples) {
    const NetworkState st = BlstmForward(params, s.frames);
    const CtcResult ctc = CtcLossFromLogits(st.logits, s.labels);
    scored.push_back({BestPathDecode(st.probs), s.labels, ctc.loss});
  }
  return Evaluate(dataset_name, scored);
}

std::string Recognize(const NetworkParams& params, const Alphabet& alphabet,
                      const GrayImage& image) {
  const NetworkState st = BlstmForward(params, FrameSequence::FromImage(image));
  return alphabet.Decode(BestPathDecode(st.probs));
}

FitResult Fit(const DatasetSplit& split, const Alphabet& alphabet,
              const Hyperparams& hp, const NetConfig& net,
              const FitOptions& options) {
  hp.Validate();
  if (split.train.empty() || split.test.empty()) {
    throw DataError("split must have non-empty train and test sets");
  }
  const auto train = PrepareSamples(split.train, alphabet);
  const auto test = PrepareSamples(split.test, alphabet);
  const NetworkDims dims{train.front().frames.frame_size(), net.hidden_size,
                         alphabet.num_classes()};
  for (const auto* set : {&train, &test}) {
    for (const auto& s : *set) {
      if (s.frames.frame_size() != dims.input_size) {
        throw DataError("samples have inconsistent image heights");
      }
    }
  }

  FitResult result;
  TrainerState& state = result.state;
  if (options.resume_from) {
    state = *options.resume_from;
    if (state.params.dims() != dims) throw DataError("resume state has mismatched dims");
  } else {
    state.params = InitParams(dims, hp.seed);
    state.velocity = NetworkParams(dims);
    state.stopper = EarlyStopper(hp.patience);
  }

  const std::string train_name = split.dataset_name + "/train";
  const std::string test_name = split.dataset_name + "/test";
  NetworkParams batch_grad(dims);

  auto run_epoch = [&](int epoch, TrainerState& st) {
    const auto started = std::chrono::steady_clock::now();
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(DeriveSeed(hp.seed, static_cast<std::uint64_t>(epoch)));
    rng.Shuffle(std::span<std::size_t>(order));

    int in_batch = 0;
    batch_grad.SetZero();
    for (std::size_t idx : order) {
      const auto& s = train[idx];
      const NetworkState fwd = BlstmForward(st.params, s.frames);
      const CtcResult ctc = CtcLossFromLogits(fwd.logits, s.labels);
      const NetworkParams grad = NetworkBackward(st.params, fwd, ctc.grad_logits);
      auto acc = batch_grad.values();
      const auto g = grad.values();
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
      if (++in_batch == hp.batch_size) {
        SgdMomentumStep(st.params.values(), batch_grad.values(), st.velocity.values(), hp);
        batch_grad.SetZero();
        in_batch = 0;
      }
    }
    if (in_batch > 0) {
      SgdMomentumStep(st.params.values(), batch_grad.values(), st.velocity.values(), hp);
    }

    EpochLog log;
    log.epoch = epoch;
    log.train = EvaluateModel(st.params, train, train_name);
    log.test = EvaluateModel(st.params, test, test_name);
    log.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return log;
  };

  auto on_epoch = [&](const TrainerState& st) {
    if (options.checkpoint_path) {
      Checkpoint ckpt;
      ckpt.params = st.params;
      ckpt.alphabet = alphabet;
      ckpt.seed = hp.seed;
      if (!options.config_json.empty()) {
        ckpt.config = nlohmann::json::parse(options.config_json);
      }
      ckpt.training = st;
      SaveCheckpoint(*options.checkpoint_path, ckpt);
    }
    if (options.on_epoch) options.on_epoch(st);
  };

  RunTrainingLoop(hp, run_epoch, state, on_epoch);
  return result;
}

namespace {

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void AppendReport(std::ostringstream& os, const EvalReport& r) {
  os << ',' << Num(r.ctc_error) << ',' << Num(r.label_error) << ','
     << Num(r.seq_error) << ',' << r.insertions << ',' << r.deletions << ','
     << r.substitutions;
}

}  // namespace

std::string EpochLogCsv(std::span<const EpochLog> logs) {
  std::ostringstream os;
  os << "epoch,train_ctc_error,train_label_error,train_seq_error,train_ins,"
        "train_del,train_sub,test_ctc_error,test_label_error,test_seq_error,"
        "test_ins,test_del,test_sub\n";
  for (const auto& log : logs) {
    os << log.epoch;
    AppendReport(os, log.train);
    AppendReport(os, log.test);
    os << '\n';
  }
  return os.str();
}

void WriteEpochLogCsv(const std::filesystem::path& path,
                      std::span<const EpochLog> logs) {
  WriteFileAtomic(path, EpochLogCsv(logs));
}

EvalReport MeanReport(std::span<const EvalReport> reports) {
  if (reports.empty()) throw DataError("cannot average zero reports");
  EvalReport m;
  m.dataset_name = reports.front().dataset_name;
  double n_seq = 0, ctc = 0, ler = 0, seq = 0, ins = 0, del = 0, sub = 0;
  for (const auto& r : reports) {
    n_seq += r.n_sequences;
    ctc += r.ctc_error;
    ler += r.label_error;
    seq += r.seq_error;
    ins += static_cast<double>(r.insertions);
    del += static_cast<double>(r.deletions);
    sub += static_cast<double>(r.substitutions);
  }
  const double n = static_cast<double>(reports.size());
  m.n_sequences = static_cast<int>(std::lround(n_seq / n));
  m.ctc_error = ctc / n;
  m.label_error = ler / n;
  m.seq_error = seq / n;
  m.insertions = std::llround(ins / n);
  m.deletions = std::llround(del / n);
  m.substitutions = std::llround(sub / n);
  return m;
}

Selection SelectBest(std::span<const BestModelTracker> runs) {
  if (runs.empty()) throw DataError("selection needs at least one run");
  Selection sel;
  std::vector<EvalReport> ctc_reports, label_reports;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& c = runs[i].best_by_ctc().test;
    const auto& l = runs[i].best_by_label().test;
    if (i == 0 || c.ctc_error < sel.by_ctc.best.ctc_error) {
      sel.by_ctc.best = c;
      sel.by_ctc.best_repetition = static_cast<int>(i);
    }
    if (i == 0 || l.label_error < sel.by_label.best.label_error) {
      sel.by_label.best = l;
      sel.by_label.best_repetition = static_cast<int>(i);
    }
    ctc_reports.push_back(c);
    label_reports.push_back(l);
  }
  sel.by_ctc.mean = MeanReport(ctc_reports);
  sel.by_label.mean = MeanReport(label_reports);
  return sel;
}

}  // namespace lstmocr
