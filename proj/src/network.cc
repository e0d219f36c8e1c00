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

#include <cmath>
#include <string>

#include "lstmocr/errors.h"
#include "lstmocr/random.h"

namespace lstmocr {

namespace {

template <typename View, typename Ptr>
View MakeBlockView(Ptr p, const NetworkDims& d) {
  const int n = d.hidden_size;
  const int h = d.input_size;
  Ptr wx = p;
  Ptr wh = wx + 4 * n * h;
  Ptr b = wh + 4 * n * n;
  Ptr pi = b + 4 * n;
  Ptr pf = pi + n;
  Ptr po = pf + n;
  return View{{wx, 4 * n, h}, {wh, 4 * n, n}, {b, 4 * n},
              {pi, n},        {pf, n},        {po, n}};
}

Eigen::ArrayXd Sigmoid(const Eigen::Ref<const Eigen::ArrayXd>& x) {
  return 1.0 / (1.0 + (-x).exp());
}

// One cell update given the summed pre-activation pre = W x + R h_prev + b.
// Writes the four gate activations, the cell state and the output.
void CellCore(const ConstLstmBlockParams& blk, const Eigen::Ref<const Vector>& pre,
              const Eigen::Ref<const Vector>& c_prev, Eigen::Ref<Vector> act,
              Eigen::Ref<Vector> c, Eigen::Ref<Vector> tanh_c,
              Eigen::Ref<Vector> h) {
  const Eigen::Index n = c.size();
  const auto cp = c_prev.array();
  act.segment(kCellInput * n, n) = pre.segment(kCellInput * n, n).array().tanh().matrix();
  act.segment(kInputGate * n, n) =
      Sigmoid(pre.segment(kInputGate * n, n).array() + blk.peep_input.array() * cp).matrix();
  act.segment(kForgetGate * n, n) =
      Sigmoid(pre.segment(kForgetGate * n, n).array() + blk.peep_forget.array() * cp).matrix();
  c = (act.segment(kForgetGate * n, n).array() * cp +
       act.segment(kInputGate * n, n).array() * act.segment(kCellInput * n, n).array())
          .matrix();
  act.segment(kOutputGate * n, n) =
      Sigmoid(pre.segment(kOutputGate * n, n).array() + blk.peep_output.array() * c.array())
          .matrix();
  tanh_c = c.array().tanh().matrix();
  h = (act.segment(kOutputGate * n, n).array() * tanh_c.array()).matrix();
}

void RunDirection(const ConstLstmBlockParams& blk, const Matrix& inputs,
                  bool reverse, DirectionTrace& tr) {
  const Eigen::Index n = blk.peep_input.size();
  const Eigen::Index t_len = inputs.cols();
  Matrix projected = blk.input_weights * inputs;
  projected.colwise() += blk.bias;
  tr.activations.resize(4 * n, t_len);
  tr.cells.resize(n, t_len);
  tr.tanh_cells.resize(n, t_len);
  tr.outputs.resize(n, t_len);
  Vector h_prev = Vector::Zero(n);
  Vector c_prev = Vector::Zero(n);
  Vector pre(4 * n);
  for (Eigen::Index s = 0; s < t_len; ++s) {
    const Eigen::Index t = reverse ? t_len - 1 - s : s;
    pre = projected.col(t);
    pre.noalias() += blk.recurrent_weights * h_prev;
    CellCore(blk, pre, c_prev, tr.activations.col(t), tr.cells.col(t),
             tr.tanh_cells.col(t), tr.outputs.col(t));
    if (!tr.cells.col(t).allFinite() || !tr.outputs.col(t).allFinite()) {
      throw NumericError("numeric overflow at step " + std::to_string(t) +
                         (reverse ? " (backward direction)" : " (forward direction)"));
    }
    h_prev = tr.outputs.col(t);
    c_prev = tr.cells.col(t);
  }
}

// Backpropagation through one direction. `dh` is dL/dh from the output
// layer (N x T). Accumulates into `grad`.
void BackpropDirection(const ConstLstmBlockParams& blk, const Matrix& inputs,
                       const DirectionTrace& tr, const Matrix& dh_out,
                       bool reverse, LstmBlockParams grad) {
  const Eigen::Index n = blk.peep_input.size();
  const Eigen::Index t_len = inputs.cols();
  Matrix dpre(4 * n, t_len);
  Matrix h_prev_all = Matrix::Zero(n, t_len);

  Vector da_next = Vector::Zero(4 * n);
  Vector carry = Vector::Zero(n);  // dL/dc_t arriving from the next step
  Vector dh(n), dc(n);
  const Vector zero = Vector::Zero(n);

  for (Eigen::Index s = t_len - 1; s >= 0; --s) {
    const Eigen::Index t = reverse ? t_len - 1 - s : s;
    const bool first = s == 0;
    const Eigen::Index t_prev = reverse ? t + 1 : t - 1;
    const Vector c_prev_v = first ? zero : Vector(tr.cells.col(t_prev));
    const auto c_prev = c_prev_v.array();
    if (!first) h_prev_all.col(t) = tr.outputs.col(t_prev);

    const auto act = tr.activations.col(t);
    const auto g = act.segment(kCellInput * n, n).array();
    const auto i = act.segment(kInputGate * n, n).array();
    const auto f = act.segment(kForgetGate * n, n).array();
    const auto o = act.segment(kOutputGate * n, n).array();
    const auto tc = tr.tanh_cells.col(t).array();

    dh = dh_out.col(t);
    dh.noalias() += blk.recurrent_weights.transpose() * da_next;

    auto da = dpre.col(t);
    da.segment(kOutputGate * n, n) = (dh.array() * tc * o * (1.0 - o)).matrix();
    dc = (dh.array() * o * (1.0 - tc * tc) +
          da.segment(kOutputGate * n, n).array() * blk.peep_output.array() +
          carry.array())
             .matrix();
    da.segment(kInputGate * n, n) = (dc.array() * g * i * (1.0 - i)).matrix();
    da.segment(kForgetGate * n, n) = (dc.array() * c_prev * f * (1.0 - f)).matrix();
    da.segment(kCellInput * n, n) = (dc.array() * i * (1.0 - g * g)).matrix();

    grad.peep_input.array() += da.segment(kInputGate * n, n).array() * c_prev;
    grad.peep_forget.array() += da.segment(kForgetGate * n, n).array() * c_prev;
    grad.peep_output.array() +=
        da.segment(kOutputGate * n, n).array() * tr.cells.col(t).array();

    carry = (dc.array() * f +
             da.segment(kInputGate * n, n).array() * blk.peep_input.array() +
             da.segment(kForgetGate * n, n).array() * blk.peep_forget.array())
                .matrix();
    da_next = da;
  }
  grad.input_weights.noalias() += dpre * inputs.transpose();
  grad.recurrent_weights.noalias() += dpre * h_prev_all.transpose();
  grad.bias += dpre.rowwise().sum();
}

}  // namespace

NetworkParams::NetworkParams(const NetworkDims& dims) : dims_(dims) {
  if (dims.input_size <= 0 || dims.hidden_size <= 0 || dims.num_classes < 2) {
    throw DataError("network dimensions must be positive with at least 2 classes");
  }
  values_.assign(Size(dims), 0.0);
}

std::size_t NetworkParams::Size(const NetworkDims& d) {
  const std::size_t n = d.hidden_size;
  const std::size_t block = 4 * n * d.input_size + 4 * n * n + 4 * n + 3 * n;
  return 2 * block + static_cast<std::size_t>(d.num_classes) * 2 * n + d.num_classes;
}

std::size_t NetworkParams::BlockSize() const {
  const std::size_t n = dims_.hidden_size;
  return 4 * n * dims_.input_size + 4 * n * n + 4 * n + 3 * n;
}

std::size_t NetworkParams::BlockOffset(Direction d) const {
  return d == Direction::kForward ? 0 : BlockSize();
}

LstmBlockParams NetworkParams::block(Direction d) {
  return MakeBlockView<LstmBlockParams>(values_.data() + BlockOffset(d), dims_);
}

ConstLstmBlockParams NetworkParams::block(Direction d) const {
  return MakeBlockView<ConstLstmBlockParams>(
      static_cast<const double*>(values_.data() + BlockOffset(d)), dims_);
}

MatrixMap NetworkParams::output_weights() {
  return {values_.data() + 2 * BlockSize(), dims_.num_classes, 2 * dims_.hidden_size};
}

ConstMatrixMap NetworkParams::output_weights() const {
  return {values_.data() + 2 * BlockSize(), dims_.num_classes, 2 * dims_.hidden_size};
}

VectorMap NetworkParams::output_bias() {
  return {values_.data() + values_.size() - dims_.num_classes, dims_.num_classes};
}

ConstVectorMap NetworkParams::output_bias() const {
  return {values_.data() + values_.size() - dims_.num_classes, dims_.num_classes};
}

std::vector<std::size_t> NetworkParams::BiasIndices() const {
  std::vector<std::size_t> idx;
  const std::size_t n = dims_.hidden_size;
  for (Direction d : {Direction::kForward, Direction::kBackward}) {
    const std::size_t start = BlockOffset(d) + 4 * n * dims_.input_size + 4 * n * n;
    for (std::size_t k = 0; k < 4 * n; ++k) idx.push_back(start + k);
  }
  for (std::size_t k = values_.size() - dims_.num_classes; k < values_.size(); ++k) {
    idx.push_back(k);
  }
  return idx;
}

void NetworkParams::SetZero() { std::fill(values_.begin(), values_.end(), 0.0); }

NetworkParams InitParams(const NetworkDims& dims, std::uint64_t seed) {
  NetworkParams p(dims);
  std::vector<bool> is_bias(p.values().size(), false);
  for (auto i : p.BiasIndices()) is_bias[i] = true;
  Rng rng(seed);
  auto v = p.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = is_bias[i] ? 0.0 : rng.Uniform(-0.1, 0.1);
  }
  return p;
}

FrameSequence FrameSequence::FromImage(const GrayImage& img) {
  if (img.empty()) throw DataError("empty input");
  FrameSequence seq;
  seq.frames.resize(img.height(), img.width());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) seq.frames(r, c) = img.at(r, c) / 255.0;
  }
  return seq;
}

CellOutput LstmCellStep(const ConstLstmBlockParams& block,
                        const Eigen::Ref<const Vector>& x,
                        const Eigen::Ref<const Vector>& h_prev,
                        const Eigen::Ref<const Vector>& c_prev) {
  const Eigen::Index n = block.peep_input.size();
  if (x.size() != block.input_weights.cols() || h_prev.size() != n ||
      c_prev.size() != n) {
    throw DataError("LSTM step shape mismatch");
  }
  Vector pre = block.input_weights * x + block.recurrent_weights * h_prev + block.bias;
  Vector act(4 * n);
  CellOutput out{Vector(n), Vector(n)};
  Vector tanh_c(n);
  CellCore(block, pre, c_prev, act, out.c, tanh_c, out.h);
  if (!out.c.allFinite() || !out.h.allFinite()) {
    throw NumericError("numeric overflow at step 0");
  }
  return out;
}

Matrix Softmax(const Eigen::Ref<const Matrix>& logits) {
  Matrix y(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.cols(); ++t) {
    const double m = logits.col(t).maxCoeff();
    y.col(t) = (logits.col(t).array() - m).exp().matrix();
    y.col(t) /= y.col(t).sum();
  }
  return y;
}

NetworkState BlstmForward(const NetworkParams& params, const FrameSequence& seq) {
  const auto& d = params.dims();
  if (seq.length() < 1) throw DataError("frame sequence must be non-empty");
  if (seq.frame_size() != d.input_size) {
    throw DataError("frame size " + std::to_string(seq.frame_size()) +
                    " does not match network input size " +
                    std::to_string(d.input_size));
  }
  NetworkState st;
  st.inputs = seq.frames;
  RunDirection(params.block(Direction::kForward), st.inputs, false, st.forward);
  RunDirection(params.block(Direction::kBackward), st.inputs, true, st.backward);
  const Eigen::Index n = d.hidden_size;
  const auto wy = params.output_weights();
  st.logits = wy.leftCols(n) * st.forward.outputs;
  st.logits.noalias() += wy.rightCols(n) * st.backward.outputs;
  st.logits.colwise() += params.output_bias();
  if (!st.logits.allFinite()) throw NumericError("numeric overflow in output layer");
  st.probs = Softmax(st.logits);
  return st;
}

NetworkParams NetworkBackward(const NetworkParams& params,
                              const NetworkState& state,
                              const Eigen::Ref<const Matrix>& dlogits) {
  const auto& d = params.dims();
  if (dlogits.rows() != d.num_classes || dlogits.cols() != state.length() ||
      state.forward.outputs.rows() != d.hidden_size) {
    throw DataError("backward pass shape mismatch");
  }
  NetworkParams grad(d);
  const Eigen::Index n = d.hidden_size;
  const auto wy = params.output_weights();
  grad.output_weights().leftCols(n).noalias() =
      dlogits * state.forward.outputs.transpose();
  grad.output_weights().rightCols(n).noalias() =
      dlogits * state.backward.outputs.transpose();
  grad.output_bias() = dlogits.rowwise().sum();

  const Matrix dh_fwd = wy.leftCols(n).transpose() * dlogits;
  const Matrix dh_bwd = wy.rightCols(n).transpose() * dlogits;
  BackpropDirection(params.block(Direction::kForward), state.inputs, state.forward,
                    dh_fwd, false, grad.block(Direction::kForward));
  BackpropDirection(params.block(Direction::kBackward), state.inputs, state.backward,
                    dh_bwd, true, grad.block(Direction::kBackward));
  return grad;
}

}  // namespace lstmocr
