// SPDX-License-Identifier: Apache-2.0
// Random small instances of every differentiable primitive, shared by the
// unit tests and the acceptance suite.
#pragma once

#include "cannedbot/numerics/grad_check.hpp"
#include "cannedbot/numerics/layers.hpp"
#include "cannedbot/numerics/ops.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace cannedbot::testing {

using numerics::Binder;
using numerics::ParameterStore;
using numerics::Real;
using numerics::Rng;
using numerics::Tensor;
using numerics::Var;

struct PrimitiveCase {
  std::string name;
  // Adds parameters to `store` and returns the loss builder over them.
  std::function<numerics::LossBuilder(ParameterStore&, Rng&)> make;
};

inline Tensor random_tensor(Eigen::Index r, Eigen::Index c, Rng& rng, Real lo = -1.0, Real hi = 1.0) {
  Tensor t(r, c);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(lo, hi);
  return t;
}

// Reduces any output to a scalar with fixed random weights so every output
// coordinate contributes a distinct gradient.
inline Var weighted_sum(Binder& bind, Var out, const Tensor& weights) {
  auto& g = bind.graph();
  return numerics::sum(g, numerics::mul(g, out, g.constant_ref(weights)));
}

inline std::vector<PrimitiveCase> primitive_cases() {
  using namespace numerics;
  std::vector<PrimitiveCase> cases;
  auto unary = [&cases](std::string name, Var (*op)(Graph&, Var)) {
    cases.push_back({name, [op](ParameterStore& s, Rng& rng) {
      auto a = s.add("a", random_tensor(3, 4, rng, -2.0, 2.0));
      auto w = std::make_shared<Tensor>(random_tensor(3, 4, rng));
      return LossBuilder([=](Binder& b) { return weighted_sum(b, op(b.graph(), b(a)), *w); });
    }});
  };
  auto binary = [&cases](std::string name, Var (*op)(Graph&, Var, Var)) {
    cases.push_back({name, [op](ParameterStore& s, Rng& rng) {
      auto a = s.add("a", random_tensor(3, 4, rng));
      auto c = s.add("b", random_tensor(3, 4, rng));
      auto w = std::make_shared<Tensor>(random_tensor(3, 4, rng));
      return LossBuilder([=](Binder& b) { return weighted_sum(b, op(b.graph(), b(a), b(c)), *w); });
    }});
  };
  unary("sigmoid", &numerics::sigmoid);
  unary("tanh", &numerics::tanh);
  unary("relu", &numerics::relu);
  binary("add", &numerics::add);
  binary("sub", &numerics::sub);
  binary("mul", &numerics::mul);

  cases.push_back({"matmul", [](ParameterStore& s, Rng& rng) {
    auto a = s.add("a", random_tensor(2, 3, rng));
    auto c = s.add("b", random_tensor(3, 5, rng));
    auto w = std::make_shared<Tensor>(random_tensor(2, 5, rng));
    return LossBuilder([=](Binder& b) { return weighted_sum(b, matmul(b.graph(), b(a), b(c)), *w); });
  }});
  cases.push_back({"add_row", [](ParameterStore& s, Rng& rng) {
    auto a = s.add("a", random_tensor(3, 4, rng));
    auto r = s.add("row", random_tensor(1, 4, rng));
    auto w = std::make_shared<Tensor>(random_tensor(3, 4, rng));
    return LossBuilder([=](Binder& b) { return weighted_sum(b, add_row(b.graph(), b(a), b(r)), *w); });
  }});
  cases.push_back({"scale", [](ParameterStore& s, Rng& rng) {
    auto a = s.add("a", random_tensor(3, 4, rng));
    const Real k = rng.uniform(-3.0, 3.0);
    auto w = std::make_shared<Tensor>(random_tensor(3, 4, rng));
    return LossBuilder([=](Binder& b) { return weighted_sum(b, scale(b.graph(), b(a), k), *w); });
  }});
  cases.push_back({"concat_slice", [](ParameterStore& s, Rng& rng) {
    auto a = s.add("a", random_tensor(3, 2, rng));
    auto c = s.add("b", random_tensor(3, 3, rng));
    auto w = std::make_shared<Tensor>(random_tensor(3, 3, rng));
    return LossBuilder([=](Binder& b) {
      auto& g = b.graph();
      std::vector<Var> parts{b(a), b(c)};
      Var cat = concat_cols(g, parts);
      return weighted_sum(b, slice_cols(g, cat, 1, 3), *w);
    });
  }});
  cases.push_back({"gather_rows", [](ParameterStore& s, Rng& rng) {
    auto t = s.add("table", random_tensor(5, 3, rng));
    std::vector<int> ids{4, 0, 4, 2};
    auto w = std::make_shared<Tensor>(random_tensor(4, 3, rng));
    return LossBuilder([=](Binder& b) { return weighted_sum(b, gather_rows(b.graph(), b(t), ids), *w); });
  }});
  cases.push_back({"select_rows", [](ParameterStore& s, Rng& rng) {
    auto a = s.add("a", random_tensor(4, 3, rng));
    auto c = s.add("b", random_tensor(4, 3, rng));
    std::vector<bool> mask{true, false, false, true};
    auto w = std::make_shared<Tensor>(random_tensor(4, 3, rng));
    return LossBuilder([=](Binder& b) { return weighted_sum(b, select_rows(b.graph(), mask, b(a), b(c)), *w); });
  }});
  cases.push_back({"layer_norm", [](ParameterStore& s, Rng& rng) {
    auto x = s.add("x", random_tensor(3, 5, rng, -2.0, 2.0));
    auto gm = s.add("gamma", random_tensor(1, 5, rng, 0.5, 1.5));
    auto bt = s.add("beta", random_tensor(1, 5, rng));
    auto w = std::make_shared<Tensor>(random_tensor(3, 5, rng));
    return LossBuilder([=](Binder& b) { return weighted_sum(b, layer_norm(b.graph(), b(x), b(gm), b(bt)), *w); });
  }});
  cases.push_back({"rowwise_cosine_distance", [](ParameterStore& s, Rng& rng) {
    auto a = s.add("a", random_tensor(3, 8, rng));
    auto c = s.add("b", random_tensor(3, 8, rng));
    auto w = std::make_shared<Tensor>(random_tensor(3, 1, rng));
    return LossBuilder([=](Binder& b) { return weighted_sum(b, rowwise_cosine_distance(b.graph(), b(a), b(c)), *w); });
  }});
  cases.push_back({"pairwise_cosine_distance", [](ParameterStore& s, Rng& rng) {
    auto a = s.add("a", random_tensor(3, 6, rng));
    auto c = s.add("b", random_tensor(4, 6, rng));
    auto w = std::make_shared<Tensor>(random_tensor(3, 4, rng));
    return LossBuilder([=](Binder& b) { return weighted_sum(b, pairwise_cosine_distance(b.graph(), b(a), b(c)), *w); });
  }});
  cases.push_back({"triplet_hinge_mean", [](ParameterStore& s, Rng& rng) {
    auto d = s.add("distances", random_tensor(4, 4, rng, 0.0, 2.0));
    const Real m = rng.uniform(0.05, 0.5);
    return LossBuilder([=](Binder& b) { return triplet_hinge_mean(b.graph(), b(d), m); });
  }});
  cases.push_back({"bce_with_logits_mean", [](ParameterStore& s, Rng& rng) {
    auto z = s.add("logits", random_tensor(5, 1, rng, -3.0, 3.0));
    std::vector<Real> y;
    for (int i = 0; i < 5; ++i) y.push_back(rng.bernoulli(0.5) ? 1.0 : 0.0);
    return LossBuilder([=](Binder& b) { return bce_with_logits_mean(b.graph(), b(z), y); });
  }});
  cases.push_back({"softmax_cross_entropy", [](ParameterStore& s, Rng& rng) {
    auto z = s.add("logits", random_tensor(4, 6, rng, -2.0, 2.0));
    std::vector<int> t{static_cast<int>(rng.index(6)), -1, static_cast<int>(rng.index(6)),
                       static_cast<int>(rng.index(6))};
    return LossBuilder([=](Binder& b) {
      return softmax_cross_entropy(b.graph(), b(z), t, Reduction::kMean);
    });
  }});
  cases.push_back({"mean", [](ParameterStore& s, Rng& rng) {
    auto a = s.add("a", random_tensor(3, 4, rng));
    return LossBuilder([=](Binder& b) {
      auto& g = b.graph();
      return mean(g, mul(g, b(a), b(a)));
    });
  }});
  cases.push_back({"lstm_cell", [](ParameterStore& s, Rng& rng) {
    // B=2, I=3, H=3 random instance.
    auto x = s.add("x", random_tensor(2, 3, rng));
    auto h = s.add("h", random_tensor(2, 3, rng));
    auto c = s.add("c", random_tensor(2, 3, rng));
    auto wx = s.add("wx", random_tensor(3, 12, rng));
    auto wh = s.add("wh", random_tensor(3, 12, rng));
    auto bias = s.add("bias", random_tensor(1, 12, rng));
    auto w1 = std::make_shared<Tensor>(random_tensor(2, 3, rng));
    auto w2 = std::make_shared<Tensor>(random_tensor(2, 3, rng));
    return LossBuilder([=](Binder& b) {
      auto& g = b.graph();
      LstmState out = lstm_cell(g, b(x), {b(h), b(c)}, b(wx), b(wh), b(bias));
      return add(g, weighted_sum(b, out.h, *w1), weighted_sum(b, out.c, *w2));
    });
  }});
  cases.push_back({"dropout", [](ParameterStore& s, Rng& rng) {
    auto a = s.add("a", random_tensor(3, 5, rng));
    auto w = std::make_shared<Tensor>(random_tensor(3, 5, rng));
    const auto mask_seed = rng.index(1u << 30);
    return LossBuilder([=](Binder& b) {
      Rng mask(mask_seed);  // same mask on every evaluation
      return weighted_sum(b, dropout(b.graph(), b(a), 0.6, mask), *w);
    });
  }});
  cases.push_back({"stacked_lstm", [](ParameterStore& s, Rng& rng) {
    // Two residual layers over three steps with ragged lengths.
    auto lstm = std::make_shared<StackedLstm>(StackedLstm::create(s, "lstm", 2, 3, 2, true, rng));
    std::vector<numerics::ParamId> xs;
    for (int t = 0; t < 3; ++t) xs.push_back(s.add("x" + std::to_string(t), random_tensor(2, 2, rng)));
    auto w = std::make_shared<Tensor>(random_tensor(2, 3, rng));
    return LossBuilder([=](Binder& b) {
      std::vector<Var> steps;
      for (auto x : xs) steps.push_back(b(x));
      const std::vector<int> lengths = {3, 2};
      return weighted_sum(b, lstm->run(b, steps, lengths).final, *w);
    });
  }});
  return cases;
}

}  // namespace cannedbot::testing
