// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/numerics/ops.hpp"

#include "cannedbot/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cannedbot::numerics {

namespace {

template <typename Expr>
void accumulate(Graph& g, Var v, const Expr& e) {
  if (g.requires_grad(v)) g.grad_buffer(v) += e;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  require_shape(b, a.rows(), a.cols(), op);
}

Tensor unary(const Tensor& a, Real (*f)(Real)) { return a.unaryExpr(f); }

Real exp_scalar(Real x) { return std::exp(x); }

// Eigen picks packet or scalar code paths by address alignment, and a row's
// alignment depends on its index. Forward kernels run on an aligned copy so a
// row's result does not depend on its position in the batch.
Vector row_copy(const Tensor& t, Eigen::Index r) { return t.row(r); }

Real sigmoid_scalar(Real x) {
  // Split on sign so exp() never overflows.
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const Real e = std::exp(x);
  return e / (1.0 + e);
}

Real tanh_scalar(Real x) { return std::tanh(x); }

}  // namespace

Var matmul(Graph& g, Var a, Var b) {
  const Tensor& av = g.value(a);
  const Tensor& bv = g.value(b);
  if (av.cols() != bv.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "matmul: " + std::to_string(av.rows()) + "x" +
                                               std::to_string(av.cols()) + " * " +
                                               std::to_string(bv.rows()) + "x" +
                                               std::to_string(bv.cols()));
  }
  Tensor out(av.rows(), bv.cols());
  Vector out_row(bv.cols());
  for (Eigen::Index r = 0; r < av.rows(); ++r) {
    const Vector in_row = av.row(r);
    out_row.noalias() = in_row * bv;
    out.row(r) = out_row;
  }
  return g.record(std::move(out), {a, b}, [a, b](Graph& g, std::size_t self) {
    const Tensor& dout = g.grad_of(self);
    if (g.requires_grad(a)) g.grad_buffer(a).noalias() += dout * g.value(b).transpose();
    if (g.requires_grad(b)) g.grad_buffer(b).noalias() += g.value(a).transpose() * dout;
  }, "matmul");
}

Var add(Graph& g, Var a, Var b) {
  require_same_shape(g.value(a), g.value(b), "add");
  Tensor out = g.value(a) + g.value(b);
  return g.record(std::move(out), {a, b}, [a, b](Graph& g, std::size_t self) {
    accumulate(g, a, g.grad_of(self));
    accumulate(g, b, g.grad_of(self));
  }, "add");
}

Var sub(Graph& g, Var a, Var b) {
  require_same_shape(g.value(a), g.value(b), "sub");
  Tensor out = g.value(a) - g.value(b);
  return g.record(std::move(out), {a, b}, [a, b](Graph& g, std::size_t self) {
    accumulate(g, a, g.grad_of(self));
    if (g.requires_grad(b)) g.grad_buffer(b) -= g.grad_of(self);
  }, "sub");
}

Var mul(Graph& g, Var a, Var b) {
  require_same_shape(g.value(a), g.value(b), "mul");
  Tensor out = g.value(a).cwiseProduct(g.value(b));
  return g.record(std::move(out), {a, b}, [a, b](Graph& g, std::size_t self) {
    const Tensor& dout = g.grad_of(self);
    accumulate(g, a, dout.cwiseProduct(g.value(b)));
    accumulate(g, b, dout.cwiseProduct(g.value(a)));
  }, "mul");
}

Var add_row(Graph& g, Var a, Var row) {
  const Tensor& av = g.value(a);
  require_shape(g.value(row), 1, av.cols(), "add_row");
  Tensor out = av.rowwise() + g.value(row).row(0);
  return g.record(std::move(out), {a, row}, [a, row](Graph& g, std::size_t self) {
    const Tensor& dout = g.grad_of(self);
    accumulate(g, a, dout);
    accumulate(g, row, dout.colwise().sum());
  }, "add_row");
}

Var scale(Graph& g, Var a, Real s) {
  Tensor out = g.value(a) * s;
  return g.record(std::move(out), {a}, [a, s](Graph& g, std::size_t self) {
    accumulate(g, a, g.grad_of(self) * s);
  }, "scale");
}

Var sigmoid(Graph& g, Var a) {
  Tensor out = unary(g.value(a), sigmoid_scalar);
  return g.record(std::move(out), {a}, [a](Graph& g, std::size_t self) {
    const Tensor& y = g.value(Var{self});
    accumulate(g, a, g.grad_of(self).cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix())));
  }, "sigmoid");
}

Var tanh(Graph& g, Var a) {
  Tensor out = unary(g.value(a), tanh_scalar);
  return g.record(std::move(out), {a}, [a](Graph& g, std::size_t self) {
    const Tensor& y = g.value(Var{self});
    accumulate(g, a, g.grad_of(self).cwiseProduct((1.0 - y.array().square()).matrix()));
  }, "tanh");
}

Var relu(Graph& g, Var a) {
  Tensor out = g.value(a).cwiseMax(0.0);
  return g.record(std::move(out), {a}, [a](Graph& g, std::size_t self) {
    const Tensor& x = g.value(a);
    accumulate(g, a, (x.array() > 0.0).select(g.grad_of(self), 0.0).matrix());
  }, "relu");
}

Var concat_cols(Graph& g, std::span<const Var> parts) {
  if (parts.empty()) throw Error(ErrorCode::kShapeMismatch, "concat_cols: no inputs");
  const Eigen::Index rows = g.value(parts[0]).rows();
  Eigen::Index cols = 0;
  bool needs_grad = false;
  for (Var p : parts) {
    if (g.value(p).rows() != rows) throw Error(ErrorCode::kShapeMismatch, "concat_cols: row count");
    cols += g.value(p).cols();
    needs_grad = needs_grad || g.any_requires_grad({p});
  }
  Tensor out(rows, cols);
  Eigen::Index offset = 0;
  for (Var p : parts) {
    const Tensor& v = g.value(p);
    out.middleCols(offset, v.cols()) = v;
    offset += v.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return g.record(std::move(out), needs_grad, [inputs](Graph& g, std::size_t self) {
    const Tensor& dout = g.grad_of(self);
    Eigen::Index offset = 0;
    for (Var p : inputs) {
      const Eigen::Index w = g.value(p).cols();
      accumulate(g, p, dout.middleCols(offset, w));
      offset += w;
    }
  }, "concat_cols");
}

Var slice_cols(Graph& g, Var a, Eigen::Index start, Eigen::Index width) {
  const Tensor& av = g.value(a);
  if (start < 0 || width < 0 || start + width > av.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "slice_cols out of range");
  }
  Tensor out = av.middleCols(start, width);
  return g.record(std::move(out), {a}, [a, start, width](Graph& g, std::size_t self) {
    if (g.requires_grad(a)) g.grad_buffer(a).middleCols(start, width) += g.grad_of(self);
  }, "slice_cols");
}

Var gather_rows(Graph& g, Var table, std::span<const int> ids) {
  const Tensor& tv = g.value(table);
  Tensor out(static_cast<Eigen::Index>(ids.size()), tv.cols());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] < 0 || ids[r] >= tv.rows()) {
      throw Error(ErrorCode::kShapeMismatch, "gather_rows: index " + std::to_string(ids[r]) +
                                                 " outside table of " + std::to_string(tv.rows()));
    }
    out.row(static_cast<Eigen::Index>(r)) = tv.row(ids[r]);
  }
  std::vector<int> idx(ids.begin(), ids.end());
  return g.record(std::move(out), {table}, [table, idx](Graph& g, std::size_t self) {
    const Tensor& dout = g.grad_of(self);
    Tensor& dt = g.grad_buffer(table);
    for (std::size_t r = 0; r < idx.size(); ++r) dt.row(idx[r]) += dout.row(static_cast<Eigen::Index>(r));
  }, "gather_rows");
}

Var select_rows(Graph& g, const std::vector<bool>& take_first, Var a, Var b) {
  const Tensor& av = g.value(a);
  require_same_shape(av, g.value(b), "select_rows");
  if (static_cast<Eigen::Index>(take_first.size()) != av.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "select_rows: mask length");
  }
  Tensor out(av.rows(), av.cols());
  for (Eigen::Index r = 0; r < av.rows(); ++r) {
    out.row(r) = take_first[static_cast<std::size_t>(r)] ? av.row(r) : g.value(b).row(r);
  }
  return g.record(std::move(out), {a, b}, [take_first, a, b](Graph& g, std::size_t self) {
    const Tensor& dout = g.grad_of(self);
    const bool ga = g.requires_grad(a);
    const bool gb = g.requires_grad(b);
    for (Eigen::Index r = 0; r < dout.rows(); ++r) {
      if (take_first[static_cast<std::size_t>(r)]) {
        if (ga) g.grad_buffer(a).row(r) += dout.row(r);
      } else if (gb) {
        g.grad_buffer(b).row(r) += dout.row(r);
      }
    }
  }, "select_rows");
}

Var layer_norm(Graph& g, Var x, Var gamma, Var beta, Real eps) {
  const Tensor& xv = g.value(x);
  const Eigen::Index h = xv.cols();
  require_shape(g.value(gamma), 1, h, "layer_norm gamma");
  require_shape(g.value(beta), 1, h, "layer_norm beta");
  Tensor xhat(xv.rows(), h);
  Tensor inv_std(xv.rows(), 1);
  for (Eigen::Index r = 0; r < xv.rows(); ++r) {
    const Vector xr = row_copy(xv, r);
    const Real mu = xr.mean();
    const Real var = (xr.array() - mu).square().mean();
    inv_std(r, 0) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (xr.array() - mu) * inv_std(r, 0);
  }
  Tensor out = (xhat.array().rowwise() * g.value(gamma).row(0).array()).rowwise() +
               g.value(beta).row(0).array();
  return g.record(std::move(out), {x, gamma, beta},
                  [x, gamma, beta, xhat, inv_std](Graph& g, std::size_t self) {
    const Tensor& dout = g.grad_of(self);
    accumulate(g, gamma, dout.cwiseProduct(xhat).colwise().sum());
    accumulate(g, beta, dout.colwise().sum());
    if (!g.requires_grad(x)) return;
    const auto gam = g.value(gamma).row(0).array();
    Tensor& dx = g.grad_buffer(x);
    for (Eigen::Index r = 0; r < dout.rows(); ++r) {
      const Eigen::Array<Real, 1, Eigen::Dynamic> dxhat = dout.row(r).array() * gam;
      const Real m1 = dxhat.mean();
      const Real m2 = (dxhat * xhat.row(r).array()).mean();
      dx.row(r).array() += inv_std(r, 0) * (dxhat - m1 - xhat.row(r).array() * m2);
    }
  }, "layer_norm");
}

Var dropout(Graph& g, Var x, Real keep, Rng& rng) {
  if (!(keep > 0.0 && keep <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "dropout keep");
  const Tensor& xv = g.value(x);
  if (keep == 1.0) return x;
  Tensor mask(xv.rows(), xv.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
  }
  Tensor out = xv.cwiseProduct(mask);
  return g.record(std::move(out), {x}, [x, mask](Graph& g, std::size_t self) {
    accumulate(g, x, g.grad_of(self).cwiseProduct(mask));
  }, "dropout");
}

Var rowwise_cosine_distance(Graph& g, Var a, Var b, Real eps) {
  const Tensor& av = g.value(a);
  const Tensor& bv = g.value(b);
  require_same_shape(av, bv, "rowwise_cosine_distance");
  Tensor out(av.rows(), 1);
  for (Eigen::Index r = 0; r < av.rows(); ++r) {
    const Vector ar = row_copy(av, r), br = row_copy(bv, r);
    const Real denom = std::max(ar.norm() * br.norm(), eps);
    out(r, 0) = 1.0 - ar.dot(br) / denom;
  }
  return g.record(std::move(out), {a, b}, [a, b, eps](Graph& g, std::size_t self) {
    const Tensor& dout = g.grad_of(self);
    const Tensor& av = g.value(a);
    const Tensor& bv = g.value(b);
    for (Eigen::Index r = 0; r < av.rows(); ++r) {
      const Real na = av.row(r).norm();
      const Real nb = bv.row(r).norm();
      const Real s = av.row(r).dot(bv.row(r));
      const Real up = -dout(r, 0);  // d(distance) = -d(cos)
      if (na * nb > eps) {
        const Real n = na * nb;
        if (g.requires_grad(a))
          g.grad_buffer(a).row(r) += up * (bv.row(r) / n - av.row(r) * (s / (na * na * n)));
        if (g.requires_grad(b))
          g.grad_buffer(b).row(r) += up * (av.row(r) / n - bv.row(r) * (s / (nb * nb * n)));
      } else {
        if (g.requires_grad(a)) g.grad_buffer(a).row(r) += up * bv.row(r) / eps;
        if (g.requires_grad(b)) g.grad_buffer(b).row(r) += up * av.row(r) / eps;
      }
    }
  }, "rowwise_cosine_distance");
}

Var pairwise_cosine_distance(Graph& g, Var a, Var b, Real eps) {
  const Tensor& av = g.value(a);
  const Tensor& bv = g.value(b);
  if (av.cols() != bv.cols()) throw Error(ErrorCode::kShapeMismatch, "pairwise_cosine_distance");
  Tensor norms_a = av.rowwise().norm();
  Tensor norms_b = bv.rowwise().norm();
  Tensor out(av.rows(), bv.rows());
  for (Eigen::Index i = 0; i < av.rows(); ++i) {
    for (Eigen::Index j = 0; j < bv.rows(); ++j) {
      const Real denom = std::max(norms_a(i, 0) * norms_b(j, 0), eps);
      out(i, j) = 1.0 - av.row(i).dot(bv.row(j)) / denom;
    }
  }
  return g.record(std::move(out), {a, b},
                  [a, b, eps, norms_a, norms_b](Graph& g, std::size_t self) {
    const Tensor& dout = g.grad_of(self);
    const Tensor& av = g.value(a);
    const Tensor& bv = g.value(b);
    const bool ga = g.requires_grad(a);
    const bool gb = g.requires_grad(b);
    for (Eigen::Index i = 0; i < av.rows(); ++i) {
      for (Eigen::Index j = 0; j < bv.rows(); ++j) {
        const Real up = -dout(i, j);
        if (up == 0.0) continue;
        const Real na = norms_a(i, 0);
        const Real nb = norms_b(j, 0);
        if (na * nb > eps) {
          const Real n = na * nb;
          const Real s = av.row(i).dot(bv.row(j));
          if (ga) g.grad_buffer(a).row(i) += up * (bv.row(j) / n - av.row(i) * (s / (na * na * n)));
          if (gb) g.grad_buffer(b).row(j) += up * (av.row(i) / n - bv.row(j) * (s / (nb * nb * n)));
        } else {
          if (ga) g.grad_buffer(a).row(i) += up * bv.row(j) / eps;
          if (gb) g.grad_buffer(b).row(j) += up * av.row(i) / eps;
        }
      }
    }
  }, "pairwise_cosine_distance");
}

Var triplet_hinge_mean(Graph& g, Var distances, Real margin) {
  const Tensor& d = g.value(distances);
  if (d.rows() != d.cols()) throw Error(ErrorCode::kShapeMismatch, "triplet_hinge_mean needs NxN");
  const Eigen::Index n = d.rows();
  if (n < 2) throw Error(ErrorCode::kBatchTooSmall, "max-margin loss needs at least 2 pairs");
  Real total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      total += std::max(0.0, margin + d(i, i) - d(i, j));
    }
  }
  Tensor out(1, 1);
  out(0, 0) = total / static_cast<Real>(n);
  return g.record(std::move(out), {distances}, [distances, margin](Graph& g, std::size_t self) {
    const Tensor& d = g.value(distances);
    const Eigen::Index n = d.rows();
    const Real up = g.grad_of(self)(0, 0) / static_cast<Real>(n);
    Tensor& dd = g.grad_buffer(distances);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        if (margin + d(i, i) - d(i, j) > 0.0) {
          dd(i, i) += up;
          dd(i, j) -= up;
        }
      }
    }
  }, "triplet_hinge_mean");
}

Var bce_with_logits_mean(Graph& g, Var logits, std::span<const Real> labels) {
  const Tensor& z = g.value(logits);
  require_shape(z, static_cast<Eigen::Index>(labels.size()), 1, "bce_with_logits_mean");
  if (labels.empty()) throw Error(ErrorCode::kEmptyInput, "bce_with_logits_mean: no rows");
  Real total = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const Real x = z(r, 0);
    const Real y = labels[static_cast<std::size_t>(r)];
    total += std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x)));
  }
  Tensor out(1, 1);
  out(0, 0) = total / static_cast<Real>(z.rows());
  std::vector<Real> y(labels.begin(), labels.end());
  return g.record(std::move(out), {logits}, [logits, y](Graph& g, std::size_t self) {
    const Tensor& z = g.value(logits);
    const Real up = g.grad_of(self)(0, 0) / static_cast<Real>(z.rows());
    Tensor& dz = g.grad_buffer(logits);
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      dz(r, 0) += up * (sigmoid_scalar(z(r, 0)) - y[static_cast<std::size_t>(r)]);
    }
  }, "bce_with_logits_mean");
}

Var softmax_cross_entropy(Graph& g, Var logits, std::span<const int> targets,
                          Reduction reduction) {
  const Tensor& z = g.value(logits);
  if (static_cast<Eigen::Index>(targets.size()) != z.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "softmax_cross_entropy: target count");
  }
  Tensor probs = softmax_rows(z);
  Real total = 0.0;
  std::size_t counted = 0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const int t = targets[static_cast<std::size_t>(r)];
    if (t < 0) continue;
    if (t >= z.cols()) throw Error(ErrorCode::kShapeMismatch, "softmax_cross_entropy: target id");
    const Vector zr = row_copy(z, r);
    const Real mx = zr.maxCoeff();
    const Real lse = mx + std::log((zr.array() - mx).matrix().unaryExpr(&exp_scalar).sum());
    total += lse - z(r, t);
    ++counted;
  }
  const Real norm = (reduction == Reduction::kMean && counted > 0) ? 1.0 / static_cast<Real>(counted) : 1.0;
  Tensor out(1, 1);
  out(0, 0) = total * norm;
  std::vector<int> tg(targets.begin(), targets.end());
  return g.record(std::move(out), {logits}, [logits, tg, probs, norm](Graph& g, std::size_t self) {
    const Real up = g.grad_of(self)(0, 0) * norm;
    Tensor& dz = g.grad_buffer(logits);
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
      const int t = tg[static_cast<std::size_t>(r)];
      if (t < 0) continue;
      dz.row(r) += up * probs.row(r);
      dz(r, t) -= up;
    }
  }, "softmax_cross_entropy");
}

Var sum(Graph& g, Var a) {
  Tensor out(1, 1);
  out(0, 0) = g.value(a).sum();
  return g.record(std::move(out), {a}, [a](Graph& g, std::size_t self) {
    if (g.requires_grad(a)) g.grad_buffer(a).array() += g.grad_of(self)(0, 0);
  }, "sum");
}

Var mean(Graph& g, Var a) {
  const auto n = static_cast<Real>(g.value(a).size());
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "mean of empty tensor");
  return scale(g, sum(g, a), 1.0 / n);
}

Real cosine_similarity(const Vector& u, const Vector& v, Real eps) {
  if (u.size() != v.size()) throw Error(ErrorCode::kShapeMismatch, "cosine_similarity");
  return u.dot(v) / std::max(u.norm() * v.norm(), eps);
}

Real cosine_distance(const Vector& u, const Vector& v, Real eps) {
  return 1.0 - cosine_similarity(u, v, eps);
}

Tensor softmax_rows(const Tensor& logits) {
  Tensor out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const Vector lr = row_copy(logits, r);
    const Real mx = lr.maxCoeff();
    Vector e = (lr.array() - mx).matrix().unaryExpr(&exp_scalar);
    e /= e.sum();
    out.row(r) = e;
  }
  return out;
}

}  // namespace cannedbot::numerics
