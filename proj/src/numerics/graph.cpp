// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/numerics/graph.hpp"

#include "cannedbot/error.hpp"

namespace cannedbot::numerics {

Var Graph::constant(Tensor value) {
  require_finite(value, "constant");
  Node n;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Graph::constant_ref(const Tensor& value) {
  Node n;
  n.borrowed = &value;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Graph::param(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var{it->second};
  Node n;
  n.borrowed = &p.value;
  n.parameter = &p;
  n.requires_grad = grad_enabled();
  nodes_.push_back(std::move(n));
  param_nodes_.emplace(&p, nodes_.size() - 1);
  return Var{nodes_.size() - 1};
}

const Tensor& Graph::value(Var v) const {
  const Node& n = nodes_.at(v.id);
  return n.borrowed != nullptr ? *n.borrowed : n.owned;
}

const Tensor& Graph::grad(Var v) const { return nodes_.at(v.id).grad; }

bool Graph::any_requires_grad(std::initializer_list<Var> inputs) const {
  if (!grad_enabled()) return false;
  for (Var v : inputs) {
    if (nodes_.at(v.id).requires_grad) return true;
  }
  return false;
}

Var Graph::record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn, const char* op) {
  return record(std::move(value), any_requires_grad(inputs), std::move(fn), op);
}

Var Graph::record(Tensor value, bool requires_grad, BackwardFn fn, const char* op) {
  require_finite(value, op);
  Node n;
  n.owned = std::move(value);
  n.requires_grad = requires_grad && grad_enabled();
  if (n.requires_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Tensor& Graph::grad_buffer(Var v) {
  Node& n = nodes_.at(v.id);
  if (n.grad.size() == 0) {
    const Tensor& val = n.borrowed != nullptr ? *n.borrowed : n.owned;
    n.grad.setZero(val.rows(), val.cols());
  }
  return n.grad;
}

void Graph::backward(Var loss) {
  const Tensor& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw Error(ErrorCode::kNonScalarLoss, "backward() needs a 1x1 loss, got " +
                                               std::to_string(lv.rows()) + "x" +
                                               std::to_string(lv.cols()));
  }
  if (!grad_enabled()) {
    throw Error(ErrorCode::kInvalidArgument, "backward() on a graph built without gradients");
  }
  for (auto& n : nodes_) n.grad.resize(0, 0);
  grad_buffer(loss)(0, 0) = 1.0;
  last_visits_ = 0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    ++last_visits_;
    if (n.backward) n.backward(*this, i);
    if (n.parameter != nullptr) n.parameter->grad += n.grad;
  }
}

Var Binder::operator()(ParamId id) {
  if (auto it = bound_.find(id); it != bound_.end()) return it->second;
  Var v = mutable_ != nullptr ? g_.param((*mutable_)[id]) : g_.constant_ref(store_[id].value);
  bound_.emplace(id, v);
  return v;
}

}  // namespace cannedbot::numerics
