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

#include "lstmocr/network.h"

#include <gtest/gtest.h>

#include <cmath>
#include <utility>

#include "lstmocr/ctc.h"
#include "lstmocr/random.h"
#include "oracles.h"

namespace lstmocr {
namespace {

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

FrameSequence RandomFrames(Rng& rng, int h, int t) {
  return {oracle::RandomMatrix(rng, h, t, 0.0, 1.0)};
}

// Random values for every parameter, biases included.
NetworkParams RandomParams(Rng& rng, const NetworkDims& dims, double scale = 0.5) {
  NetworkParams p(dims);
  for (double& v : p.values()) v = rng.Uniform(-scale, scale);
  return p;
}

TEST(InitTest, DeterministicAndBounded) {
  const NetworkDims dims{5, 3, 4};
  const NetworkParams a = InitParams(dims, 1);
  EXPECT_EQ(a, InitParams(dims, 1));
  EXPECT_FALSE(a == InitParams(dims, 2));
  for (double v : a.values()) {
    EXPECT_GE(v, -0.1);
    EXPECT_LE(v, 0.1);
  }
  for (std::size_t i : a.BiasIndices()) EXPECT_EQ(a.values()[i], 0.0);
  EXPECT_EQ(a.values().size(), NetworkParams::Size(dims));
}

TEST(CellTest, ZeroParamsGiveZeroState) {
  const NetworkParams p(NetworkDims{3, 2, 3});
  const Vector x = Vector::Ones(3);
  const CellOutput out = LstmCellStep(p.block(Direction::kForward), x, Vector::Zero(2),
                                      Vector::Zero(2));
  EXPECT_EQ(out.h, Vector::Zero(2));
  EXPECT_EQ(out.c, Vector::Zero(2));
}

TEST(CellTest, ClosedInputOpenForgetKeepsCell) {
  Rng rng(1);
  NetworkParams p = RandomParams(rng, NetworkDims{3, 2, 3});
  auto block = p.block(Direction::kForward);
  block.bias.segment(kInputGate * 2, 2).setConstant(-20.0);
  block.bias.segment(kForgetGate * 2, 2).setConstant(20.0);
  const Vector c_prev = (Vector(2) << 0.7, -0.4).finished();
  const Vector x = Vector::Constant(3, 0.3);
  const CellOutput out =
      LstmCellStep(std::as_const(p).block(Direction::kForward), x, Vector::Zero(2), c_prev);
  EXPECT_LT((out.c - c_prev).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(CellTest, ScalarOracle) {
  NetworkParams p(NetworkDims{1, 1, 2});
  auto b = p.block(Direction::kForward);
  // Rows: g, i, f, o.
  b.input_weights << 0.5, -0.3, 0.8, 0.2;
  b.recurrent_weights << 0.1, 0.4, -0.6, 0.7;
  b.bias << 0.05, -0.1, 0.2, 0.3;
  b.peep_input << 0.25;
  b.peep_forget << -0.35;
  b.peep_output << 0.45;
  const double x = 0.9, h0 = -0.2, c0 = 0.6;
  const double g = std::tanh(0.5 * x + 0.1 * h0 + 0.05);
  const double i = Sigmoid(-0.3 * x + 0.4 * h0 - 0.1 + 0.25 * c0);
  const double f = Sigmoid(0.8 * x - 0.6 * h0 + 0.2 - 0.35 * c0);
  const double c = f * c0 + i * g;
  const double o = Sigmoid(0.2 * x + 0.7 * h0 + 0.3 + 0.45 * c);
  const double h = o * std::tanh(c);
  const CellOutput out = LstmCellStep(std::as_const(p).block(Direction::kForward),
                                      Vector::Constant(1, x), Vector::Constant(1, h0),
                                      Vector::Constant(1, c0));
  EXPECT_NEAR(out.c(0), c, 1e-15);
  EXPECT_NEAR(out.h(0), h, 1e-15);
}

TEST(ForwardTest, ProbabilitiesNormalized) {
  Rng rng(3);
  const NetworkParams p = RandomParams(rng, NetworkDims{4, 3, 5});
  const NetworkState s = BlstmForward(p, RandomFrames(rng, 4, 9));
  ASSERT_EQ(s.probs.cols(), 9);
  for (int t = 0; t < 9; ++t) EXPECT_NEAR(s.probs.col(t).sum(), 1.0, 1e-9);
  const NetworkState one = BlstmForward(p, RandomFrames(rng, 4, 1));
  EXPECT_EQ(one.forward.outputs.cols(), 1);
  EXPECT_EQ(one.backward.outputs.cols(), 1);
}

TEST(ForwardTest, TimeReversalSymmetry) {
  Rng rng(8);
  const NetworkDims dims{3, 4, 3};
  const NetworkParams p = RandomParams(rng, dims);
  // Swap the two directions and the matching halves of the output weights.
  NetworkParams q = p;
  {
    auto qf = q.block(Direction::kForward);
    auto qb = q.block(Direction::kBackward);
    const auto pf = p.block(Direction::kForward);
    const auto pb = p.block(Direction::kBackward);
    qf.input_weights = pb.input_weights;
    qf.recurrent_weights = pb.recurrent_weights;
    qf.bias = pb.bias;
    qf.peep_input = pb.peep_input;
    qf.peep_forget = pb.peep_forget;
    qf.peep_output = pb.peep_output;
    qb.input_weights = pf.input_weights;
    qb.recurrent_weights = pf.recurrent_weights;
    qb.bias = pf.bias;
    qb.peep_input = pf.peep_input;
    qb.peep_forget = pf.peep_forget;
    qb.peep_output = pf.peep_output;
    const int n = dims.hidden_size;
    q.output_weights().leftCols(n) = p.output_weights().rightCols(n);
    q.output_weights().rightCols(n) = p.output_weights().leftCols(n);
  }
  const FrameSequence x = RandomFrames(rng, 3, 7);
  const FrameSequence reversed{x.frames.rowwise().reverse()};
  const NetworkState a = BlstmForward(p, x);
  const NetworkState b = BlstmForward(q, reversed);
  EXPECT_LT((a.probs - b.probs.rowwise().reverse()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BackwardTest, ZeroUpstreamGivesZeroGradient) {
  Rng rng(5);
  const NetworkParams p = RandomParams(rng, NetworkDims{3, 4, 3});
  const NetworkState s = BlstmForward(p, RandomFrames(rng, 3, 5));
  const NetworkParams g = NetworkBackward(p, s, Matrix::Zero(3, 5));
  for (double v : g.values()) EXPECT_EQ(v, 0.0);
}

TEST(BackwardTest, FrozenDirectionHasZeroGradient) {
  Rng rng(6);
  const NetworkDims dims{3, 4, 3};
  NetworkParams p = RandomParams(rng, dims);
  // Zero output weights from the backward direction: nothing flows into it.
  p.output_weights().rightCols(dims.hidden_size).setZero();
  const NetworkState s = BlstmForward(p, RandomFrames(rng, 3, 5));
  const NetworkParams g = NetworkBackward(p, s, oracle::RandomMatrix(rng, 3, 5));
  const auto b = g.block(Direction::kBackward);
  EXPECT_EQ(b.input_weights.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(b.recurrent_weights.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(b.bias.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(b.peep_output.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(g.block(Direction::kForward).input_weights.cwiseAbs().maxCoeff(), 0.0);
}

TEST(BackwardTest, MatchesFiniteDifferencesThroughCtc) {
  Rng rng(12);
  const NetworkDims dims{3, 4, 3};
  for (int trial = 0; trial < 5; ++trial) {
    NetworkParams p = RandomParams(rng, dims);
    const FrameSequence x = RandomFrames(rng, 3, 5);
    const std::vector<int> z{1, 2};
    const NetworkState s = BlstmForward(p, x);
    const CtcResult r = CtcLossFromLogits(s.logits, z);
    const NetworkParams g = NetworkBackward(p, s, r.grad_logits);
    const auto numeric = oracle::NumericGradient(
        [&] { return CtcLossFromLogits(BlstmForward(p, x).logits, z).loss; }, p.values());
    EXPECT_LT(oracle::MaxRelativeError(g.values(), numeric), 1e-4);
  }
}

}  // namespace
}  // namespace lstmocr
