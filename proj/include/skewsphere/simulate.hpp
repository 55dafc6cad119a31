#pragma once

#include <skewsphere/model.hpp>
#include <skewsphere/observations.hpp>
#include <skewsphere/sphere.hpp>

#include <Eigen/Core>
#include <cstdint>

namespace skewsphere {

/// Exact simulation of Z_i(s) = mu_i + eta_i |X_i(s)| + sigma_i Y_i(s) from
/// Cholesky factors of the latent correlation matrix. X and Y share the
/// correlation structure, so one factorization serves both fields.
class FieldSimulator {
 public:
  /// `jitter` is added to the latent correlation diagonal before factoring
  /// (off by default). Throws not_positive_definite naming the parameters.
  FieldSimulator(ParameterVector p, const SiteSet& sites, double jitter = 0.0);

  /// Replicate r is drawn from its own stream seeded by (seed, first_rep + r),
  /// so any split of a run reproduces the same values.
  Observations draw(std::size_t n_reps, std::uint64_t seed, std::size_t first_rep = 0) const;

  const ParameterVector& parameters() const { return p_; }
  std::size_t sites() const { return n_; }

 private:
  ParameterVector p_;
  std::size_t n_;
  Eigen::MatrixXd lower_;
};

Observations simulate_field(const ParameterVector& p, const SiteSet& sites, std::size_t n_reps, std::uint64_t seed,
                            double jitter = 0.0);

}  // namespace skewsphere
