#pragma once

#include <skewsphere/model.hpp>

#include <array>

namespace skewsphere {

/// Skewness magnitudes below this are treated as exactly zero.
inline constexpr double eta_floor = 1e-8;

/// Lower bound applied to the bivariate cdf factor before taking logs.
inline constexpr double cdf_floor = 1e-320;

/// log density of Z = mu + eta |X| + sigma Y for a single site.
double skew_marginal_logpdf(double z, double mu, double eta, double sigma2);

/// Bivariate density of (Z_i(s_k), Z_j(s_l)) at geodesic distance theta,
///
///   f(z) = 2 sum_{t=1,2} phi2(z - mu; A_t) Phi2(L_t; B_t),
///
/// with Omega_t = Omega((-1)^t r^x), D = diag(eta_i, eta_j) and
///   A_t = Omega_2 + D Omega_t D,
///   B_t = Omega_t - Omega_t D A_t^{-1} D Omega_t,
///   L_t = Omega_t D A_t^{-1} (z - mu).
/// These equal the Upsilon = D^{-1} expressions of the closed form but remain
/// finite when an eta is zero. Everything that does not depend on z is
/// computed once at construction.
class PairContext {
 public:
  /// Throws degenerate_pair when |r^x_ij(theta)| >= 1.
  PairContext(const ParameterVector& p, int i, int j, double theta);

  /// False when Omega_2 is not positive definite; loglik then returns -inf.
  bool valid() const { return valid_; }
  bool gaussian() const { return gaussian_; }
  double rx() const { return rx_; }
  double ry() const { return ry_; }

  double loglik(double z1, double z2) const;

  struct Term {
    // A_t^{-1} stored as (a11, a12, a22) and its log-determinant.
    double ainv11, ainv12, ainv22, log_det_a;
    // Columns of D Omega_t; L_t = [u v]^T A_t^{-1} d.
    double u1, u2, v1, v2;
    // B_t in standardized form.
    double b_sd1, b_sd2, b_rho;
  };
  const std::array<Term, 2>& terms() const { return terms_; }

 private:
  double mu1_, mu2_;
  double rx_, ry_;
  bool valid_ = true;
  bool gaussian_ = false;
  // Omega_2^{-1} for the Gaussian branch.
  double oinv11_, oinv12_, oinv22_, log_det_o_;
  std::array<Term, 2> terms_{};
};

/// log f(z) for the pair; -inf when the parameters give a non-PD Omega_2.
double pair_loglik(const ParameterVector& p, int i, int j, double theta, const Eigen::Vector2d& z);

}  // namespace skewsphere
