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

#include <gtest/gtest.h>

#include <cmath>

#include "lstmocr/errors.h"
#include "lstmocr/random.h"
#include "oracles.h"

namespace lstmocr {
namespace {

std::vector<int> Ids(std::u32string_view s) { return {s.begin(), s.end()}; }

TEST(EditDistanceTest, Examples) {
  EXPECT_EQ(EditDistance(U"abc", U"abc"), EditOps{});
  const EditOps empty = EditDistance(U"", U"abc");
  EXPECT_EQ(empty.distance, 3);
  EXPECT_EQ(empty.insertions, 3);
  EXPECT_EQ(EditDistance(U"abc", U"").deletions, 3);
  EXPECT_EQ(EditDistance(U"kitten", U"sitting").distance, 3);
  EXPECT_EQ(EditDistance(U"ac", U"ab").substitutions, 1);
}

TEST(EditDistanceTest, MatchesMemoizedOracle) {
  Rng rng(2);
  for (int i = 0; i < 2000; ++i) {
    std::vector<int> p(rng.Below(7)), q(rng.Below(7));
    for (int& v : p) v = static_cast<int>(rng.Below(3));
    for (int& v : q) v = static_cast<int>(rng.Below(3));
    const EditOps ops = EditDistance(p, q);
    EXPECT_EQ(ops.distance, oracle::EditDistanceMemo(p, q));
    EXPECT_EQ(ops.distance, ops.insertions + ops.deletions + ops.substitutions);
    EXPECT_EQ(static_cast<int>(q.size()) - static_cast<int>(p.size()),
              ops.insertions - ops.deletions);
  }
}

TEST(EvaluateTest, Examples) {
  const ScoredSequence exact{Ids(U"ab"), Ids(U"ab"), 0.5};
  const ScoredSequence wrong{Ids(U"ac"), Ids(U"ab"), 1.5};
  const EvalReport all_exact = Evaluate("d", std::vector{exact, exact});
  EXPECT_EQ(all_exact.label_error, 0.0);
  EXPECT_EQ(all_exact.seq_error, 0.0);
  const EvalReport one = Evaluate("d", std::vector{wrong});
  EXPECT_DOUBLE_EQ(one.label_error, 0.5);
  EXPECT_DOUBLE_EQ(one.seq_error, 1.0);
  EXPECT_EQ(one.substitutions, 1);
  const EvalReport two = Evaluate("d", std::vector{exact, wrong});
  EXPECT_DOUBLE_EQ(two.label_error, 0.25);
  EXPECT_DOUBLE_EQ(two.seq_error, 0.5);
  EXPECT_DOUBLE_EQ(two.ctc_error, 1.0);
  EXPECT_EQ(two.n_sequences, 2);
}

TEST(EvaluateTest, Errors) {
  EXPECT_THROW(Evaluate("d", std::vector<ScoredSequence>{}), DataError);
  EXPECT_THROW(Evaluate("d", std::vector{ScoredSequence{Ids(U"a"), {}, 0}}), DataError);
}

TEST(FormatPercentTest, FiveDecimals) {
  EXPECT_EQ(FormatPercent(0.0000650), "0.00650%");
  EXPECT_EQ(FormatPercent(0.25), "25.00000%");
}

}  // namespace
}  // namespace lstmocr
