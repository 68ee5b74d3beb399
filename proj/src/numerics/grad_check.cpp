// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/numerics/grad_check.hpp"

#include "cannedbot/numerics/rng.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace cannedbot::numerics {

namespace {

Real evaluate(ParameterStore& store, const LossBuilder& build_loss) {
  Graph g(GradMode::kDisabled);
  Binder bind(g, static_cast<const ParameterStore&>(store));
  return g.value(build_loss(bind))(0, 0);
}

}  // namespace

GradCheckReport grad_check(ParameterStore& store, const LossBuilder& build_loss,
                           const GradCheckOptions& options) {
  store.zero_grad();
  {
    Graph g;
    Binder bind(g, store);
    g.backward(build_loss(bind));
  }

  std::vector<std::pair<ParamId, Eigen::Index>> coords;
  for (ParamId id = 0; id < store.size(); ++id) {
    for (Eigen::Index k = 0; k < store[id].value.size(); ++k) coords.emplace_back(id, k);
  }
  if (coords.size() > options.max_coordinates) {
    Rng rng(options.seed);
    rng.shuffle(coords);
    coords.resize(options.max_coordinates);
  }

  GradCheckReport report;
  for (const auto& [id, k] : coords) {
    Real& x = store[id].value.data()[k];
    const Real saved = x;
    x = saved + options.step;
    const Real up = evaluate(store, build_loss);
    x = saved - options.step;
    const Real down = evaluate(store, build_loss);
    x = saved;
    const Real numeric = (up - down) / (2.0 * options.step);
    const Real analytic = store[id].grad.data()[k];
    const Real denom =
        std::max({std::abs(analytic), std::abs(numeric), options.denominator_floor});
    const Real rel = std::abs(analytic - numeric) / denom;
    if (rel > report.max_relative_error || report.coordinates_checked == 0) {
      report.max_relative_error = rel;
      report.worst_parameter = store[id].name + "[" + std::to_string(k) + "]";
      report.worst_analytic = analytic;
      report.worst_numeric = numeric;
    }
    ++report.coordinates_checked;
  }
  report.passed = report.max_relative_error <= options.tolerance;
  store.zero_grad();
  return report;
}

}  // namespace cannedbot::numerics
