#include <skewsphere/predict.hpp>

#include <skewsphere/error.hpp>

#include <cmath>
#include <numbers>

namespace skewsphere {

Cokriger::Cokriger(ParameterVector p, SiteSet sites, const Observations& obs, std::size_t replicate)
    : p_(std::move(p)), sites_(std::move(sites)) {
  if (obs.sites() != sites_.size() || obs.components() != p_.components())
    throw shape_error("observations do not match sites / parameters");
  if (replicate >= obs.replicates()) throw shape_error("replicate index out of range");
  JointMoments jm = joint_moments(p_, sites_);
  z_ = obs.stacked(replicate);
  mean_ = std::move(jm.mean);
  llt_.compute(jm.cov);
  if (llt_.info() != Eigen::Success) throw not_positive_definite("observation covariance is not positive definite");
  weights_ = llt_.solve(z_ - mean_);
}

Prediction Cokriger::predict(const Site& target, int component) const {
  if (component < 0 || component >= p_.components()) throw domain_error("target component out of range");
  const std::size_t n = sites_.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (geodesic(target, sites_[k]) < SiteSet::min_separation) return {z_[stacked_index(component, k, n)], 0.0};
  }
  const int m = p_.components();
  Eigen::VectorXd c(static_cast<Eigen::Index>(m * n));
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = geodesic(target, sites_[k]);
    for (int j = 0; j < m; ++j) c[stacked_index(j, k, n)] = cross_cov(p_, component, j, theta);
  }
  const double sill = cross_cov(p_, component, component, 0.0);
  Prediction out;
  out.value = marginal_mean(p_, component) + c.dot(weights_);
  out.variance = std::max(0.0, sill - c.dot(llt_.solve(c)));
  return out;
}

Prediction cokrige(const ParameterVector& p, const SiteSet& obs_sites, const Observations& obs, const Site& target,
                   int target_component, std::size_t replicate) {
  return Cokriger(p, obs_sites, obs, replicate).predict(target, target_component);
}

DropOneScores score_points(std::vector<DropOnePoint> points) {
  if (points.empty()) throw domain_error("no prediction points to score");
  DropOneScores out;
  double sse = 0.0, ls = 0.0;
  for (const auto& pt : points) {
    if (!(pt.variance > 0.0))
      throw numerical_error("non-positive prediction variance at site " + std::to_string(pt.site + 1) +
                            ", component " + std::to_string(pt.component + 1));
    const double e2 = (pt.observed - pt.predicted) * (pt.observed - pt.predicted);
    sse += e2;
    ls += 0.5 * std::log(2.0 * std::numbers::pi * pt.variance) + e2 / (2.0 * pt.variance);
  }
  const double count = static_cast<double>(points.size());
  out.rmspe = std::sqrt(sse / count);
  out.lscore = ls / count;
  out.points = std::move(points);
  return out;
}

DropOneScores drop_one_scores(const ParameterVector& p, const SiteSet& sites, const Observations& obs,
                              std::size_t replicate) {
  if (sites.size() < 2) throw domain_error("drop-one needs at least two sites");
  if (obs.sites() != sites.size() || obs.components() != p.components())
    throw shape_error("observations do not match sites / parameters");
  const JointMoments jm = joint_moments(p, sites);
  const Eigen::LLT<Eigen::MatrixXd> llt(jm.cov);
  if (llt.info() != Eigen::Success) throw not_positive_definite("observation covariance is not positive definite");
  const auto dim = jm.cov.rows();
  const Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(dim, dim));
  const Eigen::VectorXd z = obs.stacked(replicate);
  const Eigen::VectorXd alpha = precision * (z - jm.mean);

  const std::size_t n = sites.size();
  std::vector<DropOnePoint> points;
  points.reserve(static_cast<std::size_t>(dim));
  for (int i = 0; i < p.components(); ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const Eigen::Index a = stacked_index(i, k, n);
      const double qaa = precision(a, a);
      if (!(qaa > 0.0))
        throw numerical_error("degenerate drop-one variance at site " + sites.id(k) + ", component " +
                              std::to_string(i + 1));
      points.push_back({k, i, z[a], z[a] - alpha[a] / qaa, 1.0 / qaa});
    }
  }
  DropOneScores out = score_points(std::move(points));
  out.factorizations = 1;
  out.updates = static_cast<std::size_t>(dim);
  return out;
}

}  // namespace skewsphere
