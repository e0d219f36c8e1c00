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

#include <gtest/gtest.h>

#include <cmath>

#include "lstmocr/errors.h"
#include "lstmocr/random.h"
#include "oracles.h"

namespace lstmocr {
namespace {

Matrix OneHotProbs(const std::vector<int>& path, int k) {
  Matrix y = Matrix::Constant(k, static_cast<int>(path.size()), 0.01);
  for (std::size_t t = 0; t < path.size(); ++t) y(path[t], t) = 1.0;
  for (int t = 0; t < y.cols(); ++t) y.col(t) /= y.col(t).sum();
  return y;
}

TEST(CtcTest, SingleFrame) {
  Matrix y(3, 1);
  y << 0.2, 0.5, 0.3;
  const std::vector<int> z{2};
  EXPECT_NEAR(CtcLossFromProbs(y, z).loss, -std::log(0.3), 1e-12);
}

TEST(CtcTest, TwoFrameEnumeration) {
  const Matrix y = Matrix::Constant(2, 2, 0.5);
  const std::vector<int> z{1};
  EXPECT_NEAR(CtcLossFromProbs(y, z).loss, -std::log(0.75), 1e-12);
  EXPECT_NEAR(oracle::CtcPathSum(y, z), 0.75, 1e-15);
}

TEST(CtcTest, MatchesPathEnumeration) {
  Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    const int k = 2 + static_cast<int>(rng.Below(3));
    const int t = 1 + static_cast<int>(rng.Below(6));
    std::vector<int> z(1 + rng.Below(3));
    for (int& l : z) l = 1 + static_cast<int>(rng.Below(k - 1));
    const Matrix logits = oracle::RandomMatrix(rng, k, t, -2, 2);
    const Matrix y = Softmax(logits);
    const double p = oracle::CtcPathSum(y, z);
    if (t < RequiredFrames(z)) {
      EXPECT_EQ(p, 0.0);
      EXPECT_THROW(CtcLossFromLogits(logits, z), DataError);
      continue;
    }
    EXPECT_NEAR(std::exp(-CtcLossFromLogits(logits, z).loss), p, 1e-10);
  }
}

TEST(CtcTest, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  for (int i = 0; i < 30; ++i) {
    const int k = 2 + static_cast<int>(rng.Below(3));
    const int t = 3 + static_cast<int>(rng.Below(4));
    std::vector<int> z(1 + rng.Below(2));
    for (int& l : z) l = 1 + static_cast<int>(rng.Below(k - 1));
    Matrix logits = oracle::RandomMatrix(rng, k, t, -2, 2);
    const CtcResult r = CtcLossFromLogits(logits, z);
    std::span<double> x(logits.data(), logits.size());
    const auto numeric =
        oracle::NumericGradient([&] { return CtcLossFromLogits(logits, z).loss; }, x);
    std::span<const double> analytic(r.grad_logits.data(), r.grad_logits.size());
    EXPECT_LT(oracle::MaxRelativeError(analytic, numeric), 1e-6);
    for (int c = 0; c < t; ++c) EXPECT_NEAR(r.grad_logits.col(c).sum(), 0.0, 1e-9);
  }
}

TEST(CtcTest, InfeasibleLength) {
  const Matrix logits = Matrix::Zero(3, 2);
  EXPECT_THROW(CtcLossFromLogits(logits, std::vector<int>{1, 1}), DataError);
  EXPECT_NO_THROW(CtcLossFromLogits(logits, std::vector<int>{1, 2}));
  EXPECT_EQ(RequiredFrames(std::vector<int>{1, 1, 2, 2, 2}), 8);
  EXPECT_THROW(CtcLossFromLogits(logits, std::vector<int>{}), DataError);
  EXPECT_THROW(CtcLossFromLogits(logits, std::vector<int>{3}), DataError);
}

TEST(CtcTest, StableForTinyProbabilities) {
  // The target path has probability 1e-300 per frame.
  const int t = 4;
  Matrix log_probs = Matrix::Constant(3, t, std::log(1e-300));
  log_probs.row(0).setConstant(std::log1p(-2e-300));
  const CtcResult r = CtcLossFromLogProbs(log_probs, std::vector<int>{1, 2, 1});
  EXPECT_TRUE(std::isfinite(r.loss));
  EXPECT_GT(r.loss, 2000.0);
  EXPECT_TRUE(r.grad_logits.allFinite());
}

TEST(CtcTest, PermutationInvariance) {
  Rng rng(17);
  const Matrix logits = oracle::RandomMatrix(rng, 4, 6);
  const std::vector<int> z{1, 3, 3};
  // Swap classes 1 and 3 in both the outputs and the target.
  Matrix permuted = logits;
  permuted.row(1) = logits.row(3);
  permuted.row(3) = logits.row(1);
  EXPECT_NEAR(CtcLossFromLogits(logits, z).loss,
              CtcLossFromLogits(permuted, std::vector<int>{3, 1, 1}).loss, 1e-12);
}

TEST(CtcTest, AugmentLabels) {
  EXPECT_EQ(AugmentLabels(std::vector<int>{3, 1}), (std::vector<int>{0, 3, 0, 1, 0}));
  EXPECT_EQ(AugmentLabels(std::vector<int>{}), (std::vector<int>{0}));
}

TEST(CollapseTest, Examples) {
  EXPECT_EQ(CollapsePath(std::vector<int>{1, 1, 0, 1}), (std::vector<int>{1, 1}));
  EXPECT_TRUE(CollapsePath(std::vector<int>{0, 0}).empty());
  EXPECT_EQ(CollapsePath(std::vector<int>{1, 0, 2, 2}), (std::vector<int>{1, 2}));
}

TEST(DecodeTest, BestPath) {
  EXPECT_EQ(BestPathDecode(OneHotProbs({1, 1, 0, 2}, 3)), (std::vector<int>{1, 2}));
  EXPECT_TRUE(BestPathDecode(OneHotProbs({0, 0, 0}, 3)).empty());
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    std::vector<int> path(1 + rng.Below(8));
    for (int& s : path) s = static_cast<int>(rng.Below(4));
    EXPECT_EQ(BestPathDecode(OneHotProbs(path, 4)), CollapsePath(path));
  }
  // Ties go to the lowest label.
  EXPECT_TRUE(BestPathDecode(Matrix::Constant(3, 2, 1.0 / 3)).empty());
}

}  // namespace
}  // namespace lstmocr
