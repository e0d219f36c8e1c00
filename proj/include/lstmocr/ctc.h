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

// Connectionist temporal classification: loss and gradient by log-space
// forward-backward over the blank-augmented label sequence, and best-path
// decoding.

#ifndef LSTMOCR_CTC_H_
#define LSTMOCR_CTC_H_

#include <span>
#include <vector>

#include "lstmocr/network.h"

namespace lstmocr {

inline constexpr int kBlankLabel = 0;

struct CtcResult {
  double loss = 0.0;   // -ln p(z | x), nats
  Matrix grad_logits;  // K x T, dloss/dlogits under a softmax output layer
};

// blank, z1, blank, z2, ..., blank (length 2|z| + 1).
std::vector<int> AugmentLabels(std::span<const int> labels);

// Fewest frames that can emit `labels`: |z| plus one per adjacent repeat.
int RequiredFrames(std::span<const int> labels);

// `logits` is K x T. Labels must lie in [1, K). Throws
// DataError("infeasible label length ...") when T < RequiredFrames(labels).
CtcResult CtcLossFromLogits(const Eigen::Ref<const Matrix>& logits,
                            std::span<const int> labels);

// Same, from per-frame distributions. The gradient is still with respect to
// the logits that produced `probs` through a softmax.
CtcResult CtcLossFromProbs(const Eigen::Ref<const Matrix>& probs,
                           std::span<const int> labels);

// Core routine on log-probabilities (K x T).
CtcResult CtcLossFromLogProbs(const Eigen::Ref<const Matrix>& log_probs,
                              std::span<const int> labels);

// Merge adjacent repeats, then drop blanks.
std::vector<int> CollapsePath(std::span<const int> path);

// Per-frame argmax (lowest label on ties), then CollapsePath.
std::vector<int> BestPathDecode(const Eigen::Ref<const Matrix>& probs);

}  // namespace lstmocr

#endif  // LSTMOCR_CTC_H_
