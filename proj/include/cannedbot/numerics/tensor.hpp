// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

namespace cannedbot::numerics {

using Real = double;

/// Dense row-major rank-2 tensor. Vectors are 1 x n.
using Tensor = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::Matrix<Real, 1, Eigen::Dynamic, Eigen::RowMajor>;

/// Throws NonFiniteValue when any entry is NaN or infinite.
void require_finite(const Tensor& t, const char* where);

/// Throws ShapeMismatch unless `t` is rows x cols.
void require_shape(const Tensor& t, Eigen::Index rows, Eigen::Index cols, const char* where);

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;  // same shape as value

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

using ParamId = std::size_t;

/// Owns named parameters in insertion order. Modules refer to parameters by
/// ParamId so a store (and any model built on it) copies by value.
class ParameterStore {
 public:
  ParamId add(std::string name, Tensor init);

  Parameter& operator[](ParamId id) { return params_.at(id); }
  const Parameter& operator[](ParamId id) const { return params_.at(id); }

  /// Returns the id of `name`; throws InvalidArgument if absent.
  ParamId find(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::size_t size() const { return params_.size(); }
  std::size_t coordinate_count() const;
  void zero_grad();

  /// Throws ShapeMismatch unless `other` holds the same names and shapes in
  /// the same order, so ParamIds issued for one are valid for the other.
  void require_same_layout(const ParameterStore& other) const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Parameter> params_;
};

}  // namespace cannedbot::numerics
