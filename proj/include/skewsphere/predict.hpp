#pragma once

#include <skewsphere/model.hpp>
#include <skewsphere/observations.hpp>
#include <skewsphere/sphere.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <vector>

namespace skewsphere {

struct Prediction {
  double value = 0.0;
  double variance = 0.0;
};

/// Simple cokriging with the model's known mean mu_i + eta_i sqrt(2/pi) and
/// covariance C_ij(theta). The predictor is linear, hence not the optimal
/// predictor for a skewed field, but it is the usual benchmark.
class Cokriger {
 public:
  /// Throws not_positive_definite if the observation covariance is singular.
  Cokriger(ParameterVector p, SiteSet sites, const Observations& obs, std::size_t replicate = 0);

  /// Targets that coincide with an observed site return that observation
  /// with zero variance.
  Prediction predict(const Site& target, int component) const;

  const ParameterVector& parameters() const { return p_; }

 private:
  ParameterVector p_;
  SiteSet sites_;
  Eigen::VectorXd z_;
  Eigen::VectorXd mean_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd weights_;  // C^{-1} (z - m)
};

Prediction cokrige(const ParameterVector& p, const SiteSet& obs_sites, const Observations& obs, const Site& target,
                   int target_component, std::size_t replicate = 0);

struct DropOnePoint {
  std::size_t site = 0;
  int component = 0;
  double observed = 0.0;
  double predicted = 0.0;
  double variance = 0.0;
};

struct DropOneScores {
  double rmspe = 0.0;
  double lscore = 0.0;
  std::vector<DropOnePoint> points;
  int factorizations = 0;  // Cholesky factorizations performed
  std::size_t updates = 0;  // per-point deflations of the full factorization
};

/// RMSPE = sqrt(mean (Z - Zhat)^2) and
/// LSCORE = mean [log(2 pi s^2) / 2 + (Z - Zhat)^2 / (2 s^2)] over all
/// (site, component) points. Throws numerical_error on a non-positive variance.
DropOneScores score_points(std::vector<DropOnePoint> points);

/// Leave-one-out cokriging of every (site, component) from all other
/// observations. One factorization of the joint covariance serves all
/// points: the held-out residual is (Q (z - m))_a / Q_aa and the variance
/// 1 / Q_aa, with Q the inverse covariance.
DropOneScores drop_one_scores(const ParameterVector& p, const SiteSet& sites, const Observations& obs,
                              std::size_t replicate = 0);

}  // namespace skewsphere
