#include <skewsphere/optim.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace skewsphere {

namespace {

double sanitize(double v) { return std::isnan(v) ? std::numeric_limits<double>::infinity() : v; }

}  // namespace

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective, const Eigen::VectorXd& x0,
                          const SimplexOptions& options) {
  const auto dim = x0.size();
  const double nd = static_cast<double>(dim);
  const double reflect = 1.0;
  const double expand = 1.0 + 2.0 / nd;
  const double contract = 0.75 - 1.0 / (2.0 * nd);
  const double shrink = 1.0 - 1.0 / nd;

  SimplexResult result;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++result.evaluations;
    return sanitize(objective(x));
  };

  std::vector<Eigen::VectorXd> vertex(dim + 1);
  std::vector<double> value(dim + 1);
  std::vector<std::size_t> order(dim + 1);

  Eigen::VectorXd best = x0;
  double best_value = eval(x0);
  double step = options.initial_step;

  for (int round = 0; round <= options.restarts; ++round) {
    vertex[0] = best;
    value[0] = best_value;
    for (Eigen::Index k = 0; k < dim; ++k) {
      vertex[k + 1] = best;
      vertex[k + 1][k] += step;
      value[k + 1] = eval(vertex[k + 1]);
    }

    bool converged = false;
    while (result.iters < options.max_iters) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
      const std::size_t lo = order.front();
      const std::size_t hi = order.back();
      const std::size_t second = order[dim - 1];

      double spread = 0.0;
      for (Eigen::Index k = 0; k <= dim; ++k)
        spread = std::max(spread, (vertex[k] - vertex[lo]).lpNorm<Eigen::Infinity>());
      if (spread < options.x_tol && std::isfinite(value[lo])) {
        converged = true;
        break;
      }
      ++result.iters;

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
      for (Eigen::Index k = 0; k <= dim; ++k)
        if (static_cast<std::size_t>(k) != hi) centroid += vertex[k];
      centroid /= nd;

      const Eigen::VectorXd xr = centroid + reflect * (centroid - vertex[hi]);
      const double fr = eval(xr);
      if (fr < value[lo]) {
        const Eigen::VectorXd xe = centroid + expand * (xr - centroid);
        const double fe = eval(xe);
        if (fe < fr) {
          vertex[hi] = xe;
          value[hi] = fe;
        } else {
          vertex[hi] = xr;
          value[hi] = fr;
        }
        continue;
      }
      if (fr < value[second]) {
        vertex[hi] = xr;
        value[hi] = fr;
        continue;
      }
      // Outside or inside contraction.
      const bool outside = fr < value[hi];
      const Eigen::VectorXd xc =
          outside ? Eigen::VectorXd(centroid + contract * (xr - centroid))
                  : Eigen::VectorXd(centroid + contract * (vertex[hi] - centroid));
      const double fc = eval(xc);
      if (fc < (outside ? fr : value[hi])) {
        vertex[hi] = xc;
        value[hi] = fc;
        continue;
      }
      for (Eigen::Index k = 0; k <= dim; ++k) {
        if (static_cast<std::size_t>(k) == lo) continue;
        vertex[k] = vertex[lo] + shrink * (vertex[k] - vertex[lo]);
        value[k] = eval(vertex[k]);
      }
    }

    const auto lo = static_cast<std::size_t>(std::min_element(value.begin(), value.end()) - value.begin());
    const double previous = best_value;
    if (value[lo] <= best_value) {
      best = vertex[lo];
      best_value = value[lo];
    }
    result.converged = converged;
    if (!converged) break;
    // A restart that moves nothing confirms the optimum.
    if (round > 0 && std::abs(previous - best_value) <= 1e-10 * (1.0 + std::abs(best_value))) break;
    step = std::max(0.05 * options.initial_step, 1e3 * options.x_tol);
  }

  result.x = best;
  result.value = best_value;
  return result;
}

}  // namespace skewsphere
