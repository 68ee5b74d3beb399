// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/numerics/layers.hpp"

#include "cannedbot/error.hpp"
#include "cannedbot/numerics/ops.hpp"

#include <algorithm>
#include <cmath>

namespace cannedbot::numerics {

Tensor uniform_tensor(Eigen::Index rows, Eigen::Index cols, Real bound, Rng& rng) {
  Tensor t(rows, cols);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(-bound, bound);
  return t;
}

Linear Linear::create(ParameterStore& store, const std::string& prefix, Eigen::Index in,
                      Eigen::Index out, Rng& rng, bool with_bias) {
  const Real bound = std::sqrt(6.0 / static_cast<Real>(in + out));
  Linear l;
  l.weight = store.add(prefix + ".weight", uniform_tensor(in, out, bound, rng));
  if (with_bias) l.bias = store.add(prefix + ".bias", Tensor::Zero(1, out));
  return l;
}

Var Linear::apply(Binder& bind, Var x) const {
  Graph& g = bind.graph();
  Var y = matmul(g, x, bind(weight));
  if (bias) y = add_row(g, y, bind(*bias));
  return y;
}

LstmWeights LstmWeights::create(ParameterStore& store, const std::string& prefix,
                                Eigen::Index in, Eigen::Index hidden, Rng& rng) {
  LstmWeights w;
  w.hidden = hidden;
  w.input_weights = store.add(prefix + ".wx", uniform_tensor(in, 4 * hidden, kRecurrentInitBound, rng));
  w.recurrent_weights =
      store.add(prefix + ".wh", uniform_tensor(hidden, 4 * hidden, kRecurrentInitBound, rng));
  Tensor b = Tensor::Zero(1, 4 * hidden);
  b.middleCols(hidden, hidden).setConstant(kForgetBias);
  w.bias = store.add(prefix + ".b", std::move(b));
  return w;
}

LstmState lstm_cell(Graph& g, Var x, const LstmState& prev, Var wx, Var wh, Var b) {
  const Eigen::Index h = g.value(prev.h).cols();
  if (g.value(wx).cols() != 4 * h || g.value(wh).rows() != h || g.value(wh).cols() != 4 * h ||
      g.value(prev.c).cols() != h || g.value(x).cols() != g.value(wx).rows()) {
    throw Error(ErrorCode::kShapeMismatch, "lstm_cell: inconsistent shapes");
  }
  Var pre = add_row(g, add(g, matmul(g, x, wx), matmul(g, prev.h, wh)), b);
  Var i = sigmoid(g, slice_cols(g, pre, 0, h));
  Var f = sigmoid(g, slice_cols(g, pre, h, h));
  Var cand = tanh(g, slice_cols(g, pre, 2 * h, h));
  Var o = sigmoid(g, slice_cols(g, pre, 3 * h, h));
  Var c_next = add(g, mul(g, f, prev.c), mul(g, i, cand));
  Var h_next = mul(g, o, tanh(g, c_next));
  return {h_next, c_next};
}

StackedLstm StackedLstm::create(ParameterStore& store, const std::string& prefix,
                                Eigen::Index input, Eigen::Index hidden, int layers,
                                bool residual, Rng& rng) {
  if (layers < 1 || hidden < 1 || input < 1) {
    throw Error(ErrorCode::kInvalidArgument, "StackedLstm dims must be >= 1");
  }
  StackedLstm s;
  s.hidden_ = hidden;
  s.residual_ = residual;
  Eigen::Index in = input;
  for (int l = 0; l < layers; ++l) {
    const std::string name = prefix + ".layer" + std::to_string(l);
    s.layers_.push_back(LstmWeights::create(store, name, in, hidden, rng));
    if (residual && in != hidden) {
      const Real bound = std::sqrt(6.0 / static_cast<Real>(in + hidden));
      s.shims_.push_back(store.add(name + ".shim", uniform_tensor(in, hidden, bound, rng)));
    } else {
      s.shims_.push_back(std::nullopt);
    }
    s.residual_identity_.push_back(residual && in == hidden);
    in = hidden;
  }
  return s;
}

SequenceOutput StackedLstm::run(Binder& bind, std::span<const Var> steps,
                                std::span<const int> lengths, std::optional<Var> initial_h) const {
  Graph& g = bind.graph();
  if (steps.empty()) throw Error(ErrorCode::kInvalidArgument, "StackedLstm::run: no steps");
  const Eigen::Index batch = g.value(steps[0]).rows();
  if (static_cast<Eigen::Index>(lengths.size()) != batch) {
    throw Error(ErrorCode::kShapeMismatch, "StackedLstm::run: lengths");
  }
  for (int len : lengths) {
    if (len < 1 || len > static_cast<int>(steps.size())) {
      throw Error(ErrorCode::kInvalidArgument, "StackedLstm::run: length out of range");
    }
  }
  const int max_len = *std::max_element(lengths.begin(), lengths.end());

  std::vector<std::vector<bool>> active(static_cast<std::size_t>(max_len));
  std::vector<bool> all_active(static_cast<std::size_t>(max_len), true);
  for (int t = 0; t < max_len; ++t) {
    auto& a = active[static_cast<std::size_t>(t)];
    a.resize(static_cast<std::size_t>(batch));
    for (Eigen::Index r = 0; r < batch; ++r) {
      a[static_cast<std::size_t>(r)] = t < lengths[static_cast<std::size_t>(r)];
      if (!a[static_cast<std::size_t>(r)]) all_active[static_cast<std::size_t>(t)] = false;
    }
  }

  std::vector<Var> inputs(steps.begin(), steps.begin() + max_len);
  SequenceOutput result;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LstmWeights& w = layers_[l];
    Var wx = bind(w.input_weights);
    Var wh = bind(w.recurrent_weights);
    Var b = bind(w.bias);
    LstmState state{g.constant(Tensor::Zero(batch, hidden_)), g.constant(Tensor::Zero(batch, hidden_))};
    if (l == 0 && initial_h) {
      require_shape(g.value(*initial_h), batch, hidden_, "StackedLstm initial state");
      state.h = *initial_h;
    }
    std::vector<Var> outputs;
    outputs.reserve(inputs.size());
    Var last;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
      LstmState next = lstm_cell(g, inputs[t], state, wx, wh, b);
      Var out = next.h;
      if (shims_[l]) {
        out = add(g, out, matmul(g, inputs[t], bind(*shims_[l])));
      } else if (residual_identity_[l]) {
        out = add(g, out, inputs[t]);
      }
      if (all_active[t]) {
        state = next;
        last = out;
      } else {
        state.h = select_rows(g, active[t], next.h, state.h);
        state.c = select_rows(g, active[t], next.c, state.c);
        last = select_rows(g, active[t], out, last);
      }
      outputs.push_back(out);
    }
    inputs = std::move(outputs);
    result.final = last;
  }
  result.outputs = std::move(inputs);
  return result;
}

}  // namespace cannedbot::numerics
