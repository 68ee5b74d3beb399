// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/curation/kmeans.hpp"

#include "cannedbot/error.hpp"
#include "cannedbot/numerics/rng.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace cannedbot::curation {

namespace {

Real squared_distance(const Tensor& points, Eigen::Index i, const Tensor& centroids, Eigen::Index c) {
  return (points.row(i) - centroids.row(c)).squaredNorm();
}

// Greedy k-means++: each step draws 2 + floor(ln k) D^2-weighted candidates
// and keeps the one that most reduces the potential.
Tensor plus_plus_seeds(const Tensor& points, int k, numerics::Rng& rng) {
  const Eigen::Index n = points.rows();
  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  Tensor centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
  std::vector<Real> nearest(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) nearest[static_cast<std::size_t>(i)] = squared_distance(points, i, centroids, 0);
  for (int c = 1; c < k; ++c) {
    const Real total = std::accumulate(nearest.begin(), nearest.end(), Real{0});
    Eigen::Index chosen = -1;
    Real chosen_potential = std::numeric_limits<Real>::infinity();
    std::vector<Real> chosen_nearest;
    for (int t = 0; t < trials; ++t) {
      Eigen::Index candidate = n - 1;
      if (total <= 0.0) {
        candidate = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
      } else {
        const Real target = rng.uniform() * total;
        Real acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          acc += nearest[static_cast<std::size_t>(i)];
          if (acc > target && nearest[static_cast<std::size_t>(i)] > 0.0) {
            candidate = i;
            break;
          }
        }
      }
      std::vector<Real> updated(nearest);
      Real potential = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        auto& d = updated[static_cast<std::size_t>(i)];
        d = std::min(d, (points.row(i) - points.row(candidate)).squaredNorm());
        potential += d;
      }
      if (potential < chosen_potential) {
        chosen_potential = potential;
        chosen = candidate;
        chosen_nearest = std::move(updated);
      }
    }
    centroids.row(c) = points.row(chosen);
    nearest = std::move(chosen_nearest);
  }
  return centroids;
}

/// Nearest centroid; ties keep `current` when it is among the nearest, else the lowest index.
int nearest_centroid(const Tensor& points, Eigen::Index i, const Tensor& centroids, int current) {
  int best = -1;
  Real best_d = std::numeric_limits<Real>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const Real d = squared_distance(points, i, centroids, c);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  if (current >= 0 && squared_distance(points, i, centroids, current) == best_d) return current;
  return best;
}

}  // namespace

Real kmeans_inertia(const Tensor& points, const Tensor& centroids, const std::vector<int>& assignments) {
  Real total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    total += squared_distance(points, i, centroids, assignments[static_cast<std::size_t>(i)]);
  }
  return total;
}

KMeansResult kmeans(const Tensor& points, int k, std::uint64_t seed, int max_iter) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (points.rows() < k) {
    throw Error(ErrorCode::kTooFewPoints,
                "k = " + std::to_string(k) + " exceeds " + std::to_string(points.rows()) + " points");
  }
  if (max_iter < 1) throw Error(ErrorCode::kInvalidArgument, "max_iter must be >= 1");
  numerics::Rng rng(seed);
  const Eigen::Index n = points.rows();

  KMeansResult r;
  r.k = k;
  r.centroids = plus_plus_seeds(points, k, rng);
  r.assignments.assign(static_cast<std::size_t>(n), -1);

  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& a = r.assignments[static_cast<std::size_t>(i)];
      const int next = nearest_centroid(points, i, r.centroids, a);
      changed = changed || next != a;
      a = next;
    }
    // Reseed empty clusters at the point farthest from its own centroid.
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int a : r.assignments) ++sizes[static_cast<std::size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      Real far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int a = r.assignments[static_cast<std::size_t>(i)];
        if (sizes[static_cast<std::size_t>(a)] < 2) continue;
        const Real d = squared_distance(points, i, r.centroids, a);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) break;
      --sizes[static_cast<std::size_t>(r.assignments[static_cast<std::size_t>(far)])];
      r.assignments[static_cast<std::size_t>(far)] = c;
      sizes[static_cast<std::size_t>(c)] = 1;
      changed = true;
    }
    // Update: each non-empty cluster moves to its mean.
    Tensor sums = Tensor::Zero(k, points.cols());
    for (Eigen::Index i = 0; i < n; ++i) sums.row(r.assignments[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) {
        r.centroids.row(c) = sums.row(c) / static_cast<Real>(sizes[static_cast<std::size_t>(c)]);
      }
    }
    r.iterations = iter + 1;
    r.inertia = kmeans_inertia(points, r.centroids, r.assignments);
    r.inertia_history.push_back(r.inertia);
    if (!changed) {
      r.converged = true;
      break;
    }
  }
  return r;
}

}  // namespace cannedbot::curation
