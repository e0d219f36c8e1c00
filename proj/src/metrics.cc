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

#include "lstmocr/metrics.h"

#include <algorithm>
#include <cstdio>

#include "lstmocr/errors.h"

namespace lstmocr {

namespace {

template <typename Seq>
EditOps Levenshtein(const Seq& p, const Seq& q) {
  const std::size_t n = p.size();
  const std::size_t m = q.size();
  std::vector<int> d((n + 1) * (m + 1));
  auto at = [m, &d](std::size_t i, std::size_t j) -> int& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const int sub = at(i - 1, j - 1) + (p[i - 1] != q[j - 1]);
      at(i, j) = std::min({sub, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  EditOps ops;
  ops.distance = at(n, m);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (p[i - 1] != q[j - 1])) {
      ops.substitutions += p[i - 1] != q[j - 1];
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++ops.deletions;
      --i;
    } else {
      ++ops.insertions;
      --j;
    }
  }
  return ops;
}

}  // namespace

EditOps EditDistance(std::span<const int> p, std::span<const int> q) {
  return Levenshtein(p, q);
}

EditOps EditDistance(std::u32string_view p, std::u32string_view q) {
  return Levenshtein(p, q);
}

EvalReport Evaluate(std::string dataset_name,
                    std::span<const ScoredSequence> items) {
  if (items.empty()) throw DataError("evaluation needs at least one sequence");
  EvalReport r;
  r.dataset_name = std::move(dataset_name);
  r.n_sequences = static_cast<int>(items.size());
  double ler_sum = 0.0;
  double loss_sum = 0.0;
  std::int64_t wrong = 0;
  for (const auto& item : items) {
    if (item.target.empty()) throw DataError("zero-length target");
    const EditOps ops = EditDistance(item.prediction, item.target);
    ler_sum += static_cast<double>(ops.distance) / static_cast<double>(item.target.size());
    loss_sum += item.ctc_loss;
    wrong += ops.distance != 0;
    r.insertions += ops.insertions;
    r.deletions += ops.deletions;
    r.substitutions += ops.substitutions;
  }
  const double n = static_cast<double>(items.size());
  r.label_error = ler_sum / n;
  r.seq_error = static_cast<double>(wrong) / n;
  r.ctc_error = loss_sum / n;
  return r;
}

std::string FormatPercent(double fraction) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.5f%%", fraction * 100.0);
  return buf;
}

}  // namespace lstmocr
