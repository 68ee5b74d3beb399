// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/numerics/optimizer.hpp"

#include "cannedbot/error.hpp"

#include <cmath>
#include <string>

namespace cannedbot::numerics {

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimizerKind optimizer_kind_from_string(std::string_view s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam") return OptimizerKind::kAdam;
  throw Error(ErrorCode::kInvalidArgument, "unknown optimizer " + std::string(s));
}

void Optimizer::step(ParameterStore& store) {
  for (const Parameter& p : store) {
    if (p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols()) {
      throw Error(ErrorCode::kShapeMismatch, "gradient shape differs for " + p.name);
    }
    require_finite(p.grad, "optimizer gradient");
  }
  Real clip = 1.0;
  if (config_.clip_norm > 0.0) {
    Real sq = 0.0;
    for (const Parameter& p : store) sq += p.grad.squaredNorm();
    const Real norm = std::sqrt(sq);
    if (norm > config_.clip_norm) clip = config_.clip_norm / norm;
  }
  ++t_;
  if (config_.kind == OptimizerKind::kAdam && m_.size() != store.size()) {
    m_.clear();
    v_.clear();
    for (const Parameter& p : store) {
      m_.push_back(Tensor::Zero(p.value.rows(), p.value.cols()));
      v_.push_back(Tensor::Zero(p.value.rows(), p.value.cols()));
    }
  }
  std::size_t i = 0;
  for (Parameter& p : store) {
    if (config_.kind == OptimizerKind::kSgd) {
      p.value -= (lr_ * clip) * p.grad;
    } else {
      Tensor& m = m_[i];
      Tensor& v = v_[i];
      m = config_.beta1 * m + (1.0 - config_.beta1) * clip * p.grad;
      v = config_.beta2 * v + (1.0 - config_.beta2) * (clip * p.grad).cwiseAbs2();
      const Real bc1 = 1.0 - std::pow(config_.beta1, static_cast<Real>(t_));
      const Real bc2 = 1.0 - std::pow(config_.beta2, static_cast<Real>(t_));
      p.value.array() -=
          lr_ * (m.array() / bc1) / ((v.array() / bc2).sqrt() + config_.epsilon);
    }
    p.zero_grad();
    ++i;
  }
}

}  // namespace cannedbot::numerics
