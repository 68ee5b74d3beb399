// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/numerics/tensor.hpp"

#include <cstdint>
#include <vector>

namespace cannedbot::curation {

using numerics::Real;
using numerics::Tensor;
using numerics::Vector;

struct KMeansResult {
  int k = 0;
  Tensor centroids;  // [k, d]
  std::vector<int> assignments;
  Real inertia = 0.0;
  /// Inertia after every completed iteration; non-increasing.
  std::vector<Real> inertia_history;
  int iterations = 0;
  bool converged = false;
};

/// Greedy k-means++ seeding followed by Lloyd iterations until no assignment
/// changes or max_iter. A cluster left empty is reseeded at the point
/// farthest from its centroid. Points are the rows of `points`. Throws
/// TooFewPoints when k exceeds the number of points, InvalidArgument for
/// k < 1.
KMeansResult kmeans(const Tensor& points, int k, std::uint64_t seed = 1, int max_iter = 100);

/// Sum of squared distances of every point to its assigned centroid.
Real kmeans_inertia(const Tensor& points, const Tensor& centroids, const std::vector<int>& assignments);

}  // namespace cannedbot::curation
