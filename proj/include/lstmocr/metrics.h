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

// Edit distance with operation tallies, label error rate and sequence error.

#ifndef LSTMOCR_METRICS_H_
#define LSTMOCR_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lstmocr {

// Unit-cost Levenshtein alignment turning p into q. Insertions add symbols
// of q, deletions remove symbols of p.
struct EditOps {
  int distance = 0;
  int insertions = 0;
  int deletions = 0;
  int substitutions = 0;

  friend bool operator==(const EditOps&, const EditOps&) = default;
};

// Backtrace prefers substitution (or match), then deletion, then insertion.
EditOps EditDistance(std::span<const int> p, std::span<const int> q);
EditOps EditDistance(std::u32string_view p, std::u32string_view q);

struct EvalReport {
  std::string dataset_name;
  int n_sequences = 0;
  double ctc_error = 0.0;    // mean nats per sequence
  double label_error = 0.0;  // mean of ED / |target|, a fraction
  double seq_error = 0.0;    // fraction of inexact predictions
  std::int64_t insertions = 0;
  std::int64_t deletions = 0;
  std::int64_t substitutions = 0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct ScoredSequence {
  std::vector<int> prediction;
  std::vector<int> target;
  double ctc_loss = 0.0;
};

// Sums run in input order. Throws DataError("zero-length target") and on an
// empty input.
EvalReport Evaluate(std::string dataset_name,
                    std::span<const ScoredSequence> items);

// "0.00650%": a fraction rendered as a percentage with five decimals.
std::string FormatPercent(double fraction);

}  // namespace lstmocr

#endif  // LSTMOCR_METRICS_H_
