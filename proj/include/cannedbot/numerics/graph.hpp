// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/numerics/tensor.hpp"

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <limits>
#include <unordered_map>

namespace cannedbot::numerics {

/// Handle to a node of a Graph. Only meaningful for the graph that issued it.
struct Var {
  std::size_t id = std::numeric_limits<std::size_t>::max();
  bool valid() const { return id != std::numeric_limits<std::size_t>::max(); }
};

enum class GradMode { kEnabled, kDisabled };

/// Tape of primitive applications. Nodes are appended in evaluation order,
/// which is a topological order, and backward() walks them in reverse.
///
/// A graph is confined to one thread. Parameters bound with param() receive
/// their gradient contribution at the end of backward().
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::size_t self)>;

  explicit Graph(GradMode mode = GradMode::kEnabled) : mode_(mode) {}

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  bool grad_enabled() const { return mode_ == GradMode::kEnabled; }

  Var constant(Tensor value);
  /// Borrowed constant; `value` must outlive the graph.
  Var constant_ref(const Tensor& value);
  /// Trainable leaf. Binding the same parameter twice returns the same node.
  Var param(Parameter& p);

  const Tensor& value(Var v) const;
  /// Gradient reached by the last backward(); empty when none reached `v`.
  const Tensor& grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }

  /// Accumulates d(loss)/d(param) into every bound Parameter::grad.
  /// Throws NonScalarLoss unless `loss` is 1 x 1.
  void backward(Var loss);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t last_backward_visits() const { return last_visits_; }

  // Op implementation interface.
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn, const char* op);
  Var record(Tensor value, bool requires_grad, BackwardFn fn, const char* op);
  bool any_requires_grad(std::initializer_list<Var> inputs) const;
  Tensor& grad_buffer(Var v);
  Tensor& grad_buffer(std::size_t id) { return grad_buffer(Var{id}); }
  const Tensor& grad_of(std::size_t id) const { return nodes_[id].grad; }

 private:
  struct Node {
    Tensor owned;
    const Tensor* borrowed = nullptr;
    Parameter* parameter = nullptr;
    Tensor grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  GradMode mode_;
  std::deque<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> param_nodes_;
  std::size_t last_visits_ = 0;
};

/// Maps ParamIds of a store onto graph nodes. A binder over a const store
/// binds parameters as frozen constants (inference).
class Binder {
 public:
  Binder(Graph& g, ParameterStore& store) : g_(g), mutable_(&store), store_(store) {}
  Binder(Graph& g, const ParameterStore& store) : g_(g), mutable_(nullptr), store_(store) {}

  Var operator()(ParamId id);
  Graph& graph() { return g_; }
  const ParameterStore& store() const { return store_; }
  bool trainable() const { return mutable_ != nullptr && g_.grad_enabled(); }

 private:
  Graph& g_;
  ParameterStore* mutable_;
  const ParameterStore& store_;
  std::unordered_map<ParamId, Var> bound_;
};

}  // namespace cannedbot::numerics
