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

#include "lstmocr/ctc.h"

#include <cmath>
#include <limits>
#include <string>

#include "lstmocr/errors.h"

namespace lstmocr {

namespace {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

double LogSumExp(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

std::vector<int> AugmentLabels(std::span<const int> labels) {
  std::vector<int> aug(2 * labels.size() + 1, kBlankLabel);
  for (std::size_t i = 0; i < labels.size(); ++i) aug[2 * i + 1] = labels[i];
  return aug;
}

int RequiredFrames(std::span<const int> labels) {
  int frames = static_cast<int>(labels.size());
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i] == labels[i - 1]) ++frames;
  }
  return frames;
}

CtcResult CtcLossFromLogProbs(const Eigen::Ref<const Matrix>& log_probs,
                              std::span<const int> labels) {
  const int num_classes = static_cast<int>(log_probs.rows());
  const int t_len = static_cast<int>(log_probs.cols());
  if (t_len < 1) throw DataError("CTC needs at least one frame");
  if (num_classes < 2) throw DataError("CTC needs at least two classes");
  if (labels.empty()) throw DataError("CTC target must be non-empty");
  for (int l : labels) {
    if (l < 1 || l >= num_classes) {
      throw DataError("label " + std::to_string(l) + " out of range [1, " +
                      std::to_string(num_classes) + ")");
    }
  }
  if (t_len < RequiredFrames(labels)) {
    throw DataError("infeasible label length: " + std::to_string(labels.size()) +
                    " labels need " + std::to_string(RequiredFrames(labels)) +
                    " frames, got " + std::to_string(t_len));
  }

  const std::vector<int> aug = AugmentLabels(labels);
  const int s_len = static_cast<int>(aug.size());
  // Skipping from s-2 to s is allowed onto a label that differs from the
  // label two positions back.
  auto can_skip = [&aug](int s) {
    return s >= 2 && aug[s] != kBlankLabel && aug[s] != aug[s - 2];
  };

  // alpha(s, t) includes the emission at t; beta(s, t) covers t+1 .. T-1.
  Matrix alpha = Matrix::Constant(s_len, t_len, kLogZero);
  Matrix beta = Matrix::Constant(s_len, t_len, kLogZero);

  alpha(0, 0) = log_probs(aug[0], 0);
  alpha(1, 0) = log_probs(aug[1], 0);
  for (int t = 1; t < t_len; ++t) {
    for (int s = 0; s < s_len; ++s) {
      double a = alpha(s, t - 1);
      if (s >= 1) a = LogSumExp(a, alpha(s - 1, t - 1));
      if (can_skip(s)) a = LogSumExp(a, alpha(s - 2, t - 1));
      if (a != kLogZero) alpha(s, t) = a + log_probs(aug[s], t);
    }
  }

  beta(s_len - 1, t_len - 1) = 0.0;
  beta(s_len - 2, t_len - 1) = 0.0;
  for (int t = t_len - 2; t >= 0; --t) {
    for (int s = 0; s < s_len; ++s) {
      double b = beta(s, t + 1) + log_probs(aug[s], t + 1);
      if (s + 1 < s_len) {
        b = LogSumExp(b, beta(s + 1, t + 1) + log_probs(aug[s + 1], t + 1));
      }
      if (s + 2 < s_len && can_skip(s + 2)) {
        b = LogSumExp(b, beta(s + 2, t + 1) + log_probs(aug[s + 2], t + 1));
      }
      beta(s, t) = b;
    }
  }

  const double log_p = LogSumExp(alpha(s_len - 1, t_len - 1), alpha(s_len - 2, t_len - 1));
  if (!std::isfinite(log_p)) {
    throw NumericError("CTC path probability underflowed to zero");
  }

  CtcResult result;
  result.loss = -log_p;
  result.grad_logits = log_probs.array().exp().matrix();
  Eigen::VectorXd occupancy(num_classes);
  for (int t = 0; t < t_len; ++t) {
    occupancy.setConstant(kLogZero);
    for (int s = 0; s < s_len; ++s) {
      occupancy(aug[s]) = LogSumExp(occupancy(aug[s]), alpha(s, t) + beta(s, t));
    }
    for (int k = 0; k < num_classes; ++k) {
      if (occupancy(k) != kLogZero) {
        result.grad_logits(k, t) -= std::exp(occupancy(k) - log_p);
      }
    }
  }
  return result;
}

CtcResult CtcLossFromLogits(const Eigen::Ref<const Matrix>& logits,
                            std::span<const int> labels) {
  Matrix log_probs(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.cols(); ++t) {
    const double m = logits.col(t).maxCoeff();
    const double lse = m + std::log((logits.col(t).array() - m).exp().sum());
    log_probs.col(t) = logits.col(t).array() - lse;
  }
  return CtcLossFromLogProbs(log_probs, labels);
}

CtcResult CtcLossFromProbs(const Eigen::Ref<const Matrix>& probs,
                           std::span<const int> labels) {
  return CtcLossFromLogProbs(probs.array().log().matrix(), labels);
}

std::vector<int> CollapsePath(std::span<const int> path) {
  std::vector<int> out;
  int prev = -1;
  for (int l : path) {
    if (l != prev && l != kBlankLabel) out.push_back(l);
    prev = l;
  }
  return out;
}

std::vector<int> BestPathDecode(const Eigen::Ref<const Matrix>& probs) {
  std::vector<int> path(probs.cols());
  for (Eigen::Index t = 0; t < probs.cols(); ++t) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < probs.rows(); ++k) {
      if (probs(k, t) > probs(best, t)) best = k;
    }
    path[t] = static_cast<int>(best);
  }
  return CollapsePath(path);
}

}  // namespace lstmocr
