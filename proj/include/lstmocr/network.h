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

// Bidirectional peephole LSTM with a per-frame softmax output layer.
//
// Each direction is one layer of N memory blocks with one cell each:
//
//   g_t = tanh(Wg x_t + Rg h_{t-1} + bg)
//   i_t = sigmoid(Wi x_t + Ri h_{t-1} + pi * c_{t-1} + bi)
//   f_t = sigmoid(Wf x_t + Rf h_{t-1} + pf * c_{t-1} + bf)
//   c_t = f_t * c_{t-1} + i_t * g_t
//   o_t = sigmoid(Wo x_t + Ro h_{t-1} + po * c_t + bo)
//   h_t = o_t * tanh(c_t)
//
// where "previous" means t-1 for the forward direction and t+1 for the
// backward one. The output layer sees [h_fwd_t; h_bwd_t].

#ifndef LSTMOCR_NETWORK_H_
#define LSTMOCR_NETWORK_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lstmocr/imaging.h"

namespace lstmocr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;
using VectorMap = Eigen::Map<Vector>;
using ConstVectorMap = Eigen::Map<const Vector>;

struct NetworkDims {
  int input_size = 0;   // H_in, pixels per column
  int hidden_size = 0;  // N, blocks per direction
  int num_classes = 0;  // K, alphabet size + blank

  friend bool operator==(const NetworkDims&, const NetworkDims&) = default;
};

// Gate rows inside the stacked 4N pre-activation vector.
enum Gate : int { kCellInput = 0, kInputGate = 1, kForgetGate = 2, kOutputGate = 3 };

enum class Direction { kForward = 0, kBackward = 1 };

template <typename MatT, typename VecT>
struct BlockView {
  MatT input_weights;      // 4N x H_in
  MatT recurrent_weights;  // 4N x N
  VecT bias;               // 4N
  VecT peep_input;         // N
  VecT peep_forget;        // N
  VecT peep_output;        // N
};
using LstmBlockParams = BlockView<MatrixMap, VectorMap>;
using ConstLstmBlockParams = BlockView<ConstMatrixMap, ConstVectorMap>;

// All trainable values in one contiguous buffer:
// [forward block][backward block][output weights K x 2N][output bias K].
// Gradients use the same type.
class NetworkParams {
 public:
  NetworkParams() = default;
  explicit NetworkParams(const NetworkDims& dims);  // zero-filled

  static std::size_t Size(const NetworkDims& dims);

  const NetworkDims& dims() const { return dims_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  LstmBlockParams block(Direction d);
  ConstLstmBlockParams block(Direction d) const;
  MatrixMap output_weights();
  ConstMatrixMap output_weights() const;
  VectorMap output_bias();
  ConstVectorMap output_bias() const;

  // Flat indices of every bias entry (excluded from random init).
  std::vector<std::size_t> BiasIndices() const;

  void SetZero();

  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;

 private:
  std::size_t BlockSize() const;
  std::size_t BlockOffset(Direction d) const;

  NetworkDims dims_;
  std::vector<double> values_;
};

// Weights uniform on [-0.1, 0.1], biases zero.
NetworkParams InitParams(const NetworkDims& dims, std::uint64_t seed);

// Columns of a height-normalized image, intensities scaled to [0, 1].
struct FrameSequence {
  Matrix frames;  // H_in x T

  int length() const { return static_cast<int>(frames.cols()); }
  int frame_size() const { return static_cast<int>(frames.rows()); }

  static FrameSequence FromImage(const GrayImage& img);
};

struct CellOutput {
  Vector h;
  Vector c;
};

CellOutput LstmCellStep(const ConstLstmBlockParams& block,
                        const Eigen::Ref<const Vector>& x,
                        const Eigen::Ref<const Vector>& h_prev,
                        const Eigen::Ref<const Vector>& c_prev);

// Per-direction activations, indexed by time (not processing order).
struct DirectionTrace {
  Matrix activations;  // 4N x T: g, i, f, o after their nonlinearities
  Matrix cells;        // N x T
  Matrix tanh_cells;   // N x T
  Matrix outputs;      // N x T
};

struct NetworkState {
  Matrix inputs;  // H_in x T
  DirectionTrace forward;
  DirectionTrace backward;
  Matrix logits;  // K x T
  Matrix probs;   // K x T, softmax over each column

  int length() const { return static_cast<int>(inputs.cols()); }
};

// Throws NumericError("numeric overflow ...") on non-finite activations.
NetworkState BlstmForward(const NetworkParams& params,
                          const FrameSequence& seq);

// Exact gradient with respect to every parameter given dL/dlogits (K x T).
NetworkParams NetworkBackward(const NetworkParams& params,
                              const NetworkState& state,
                              const Eigen::Ref<const Matrix>& dlogits);

// Column-wise softmax with max subtraction.
Matrix Softmax(const Eigen::Ref<const Matrix>& logits);

}  // namespace lstmocr

#endif  // LSTMOCR_NETWORK_H_
