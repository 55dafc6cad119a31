#pragma once

#include <Eigen/Core>
#include <cmath>

namespace skewsphere {

double norm_pdf(double x);
double norm_logpdf(double x);
/// Standard normal cdf via erfc; accurate deep into both tails.
double norm_cdf(double x);
/// log of norm_cdf, finite for every finite x.
double norm_logcdf(double x);

/// 2x2 symmetric positive definite matrix.
class Cov2 {
 public:
  /// Throws not_positive_definite unless both leading minors are positive.
  Cov2(double s11, double s12, double s22);

  /// Correlation matrix [[1, r], [r, 1]]; requires |r| < 1.
  static Cov2 correlation(double r) { return Cov2(1.0, r, 1.0); }

  double s11() const { return s11_; }
  double s12() const { return s12_; }
  double s22() const { return s22_; }
  double det() const { return s11_ * s22_ - s12_ * s12_; }
  double corr() const { return s12_ / std::sqrt(s11_ * s22_); }

 private:
  double s11_, s12_, s22_;
};

/// Zero-mean bivariate normal density.
double phi2_pdf(const Eigen::Vector2d& y, const Cov2& sigma);
double phi2_logpdf(const Eigen::Vector2d& y, const Cov2& sigma);

/// P(U1 <= h, U2 <= k) for standard margins with correlation rho.
/// Absolute error is at the 1e-15 level; for |rho| >= 1 - 1e-12 the
/// perfectly correlated limit is returned.
double bvn_cdf(double h, double k, double rho);

/// P(U <= l) for U ~ N(0, sigma).
double phi2_cdf(const Eigen::Vector2d& l, const Cov2& sigma);

}  // namespace skewsphere
