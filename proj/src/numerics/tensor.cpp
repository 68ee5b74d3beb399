// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/numerics/tensor.hpp"

#include "cannedbot/error.hpp"

#include <string>

namespace cannedbot::numerics {

void require_finite(const Tensor& t, const char* where) {
  if (!t.allFinite()) {
    throw Error(ErrorCode::kNonFiniteValue, std::string("non-finite value produced by ") + where);
  }
}

void require_shape(const Tensor& t, Eigen::Index rows, Eigen::Index cols, const char* where) {
  if (t.rows() != rows || t.cols() != cols) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(where) + ": expected " + std::to_string(rows) + "x" +
                    std::to_string(cols) + ", got " + std::to_string(t.rows()) + "x" +
                    std::to_string(t.cols()));
  }
}

ParamId ParameterStore::add(std::string name, Tensor init) {
  if (contains(name)) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate parameter name " + name);
  }
  require_finite(init, "parameter init");
  Parameter p{std::move(name), std::move(init), Tensor()};
  p.zero_grad();
  params_.push_back(std::move(p));
  return params_.size() - 1;
}

ParamId ParameterStore::find(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return i;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown parameter " + name);
}

bool ParameterStore::contains(const std::string& name) const {
  for (const auto& p : params_) {
    if (p.name == name) return true;
  }
  return false;
}

std::size_t ParameterStore::coordinate_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

void ParameterStore::require_same_layout(const ParameterStore& other) const {
  if (other.size() != size()) {
    throw Error(ErrorCode::kShapeMismatch, "parameter count " + std::to_string(other.size()) +
                                               " != expected " + std::to_string(size()));
  }
  for (std::size_t i = 0; i < size(); ++i) {
    const Parameter& a = params_[i];
    const Parameter& b = other.params_[i];
    if (a.name != b.name || a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols()) {
      throw Error(ErrorCode::kShapeMismatch, "parameter " + std::to_string(i) + " is '" + b.name +
                                                 "' " + std::to_string(b.value.rows()) + "x" +
                                                 std::to_string(b.value.cols()) + ", expected '" +
                                                 a.name + "' " + std::to_string(a.value.rows()) +
                                                 "x" + std::to_string(a.value.cols()));
    }
  }
}

}  // namespace cannedbot::numerics
