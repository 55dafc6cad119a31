#pragma once

#include <skewsphere/corrmodels.hpp>
#include <skewsphere/sphere.hpp>

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

namespace skewsphere {

/// Parameters of the m-variate skew-Gaussian field
///   Z_i(s) = mu_i + eta_i |X_i(s)| + sigma_i Y_i(s)
/// with X, Y independent latent Gaussian fields sharing `corr`.
struct ParameterVector {
  Eigen::VectorXd sigma2;  // sigma_i^2 > 0
  Eigen::VectorXd eta;     // skewness, any sign
  Eigen::VectorXd mu;      // location
  CorrelationSpec corr;

  int components() const { return static_cast<int>(sigma2.size()); }
  double sigma(int i) const;

  /// Throws domain_error / shape_error when any invariant is violated.
  void validate() const;

  /// lambda = (sigma1^2, sigma2^2, eta1, eta2, c11, c22, rho12, mu1, mu2).
  static ParameterVector bivariate(Family family, double sigma2_1, double sigma2_2, double eta1, double eta2,
                                   double c11, double c22, double rho12, double mu1, double mu2);
};

/// Human-readable "name=value" listing, used in error messages.
std::string describe(const ParameterVector& p);

/// E Z_i(s) = mu_i + eta_i sqrt(2/pi).
double marginal_mean(const ParameterVector& p, int i);

/// sqrt(1 - t^2) + t asin(t) - 1; (2/pi) g(r) is the covariance of |X1|, |X2|
/// for standard normals with correlation r. Throws for |t| > 1.
double folded_g(double t);

/// C_ij(theta) = (2 eta_i eta_j / pi) g(r^x_ij) + sigma_i sigma_j r^y_ij.
double cross_cov(const ParameterVector& p, int i, int j, double theta);

/// C_ij(0) / sqrt(C_ii(0) C_jj(0)).
double collocated_corr(const ParameterVector& p, int i, int j);

/// Collocated correlation with the latent X and Y cross correlations set
/// independently (only meaningful for exploring the untied model).
double collocated_corr(double sigma2_i, double sigma2_j, double eta_i, double eta_j, double rho_x, double rho_y);

struct JointMoments {
  Eigen::VectorXd mean;  // length m*n
  Eigen::MatrixXd cov;   // (m*n) x (m*n)
};

/// Index of (component, site) in the stacked component-major layout.
inline Eigen::Index stacked_index(int component, std::size_t site, std::size_t n_sites) {
  return static_cast<Eigen::Index>(component * n_sites + site);
}

/// Mean and covariance of the stacked vector (Z_1(s_1..s_n), ..., Z_m(s_1..s_n)).
/// Throws not_positive_definite when the covariance has no Cholesky factor.
JointMoments joint_moments(const ParameterVector& p, const SiteSet& sites);

/// Latent correlation matrix over the stacked layout (shared by X and Y).
Eigen::MatrixXd latent_corr_matrix(const CorrelationSpec& spec, const SiteSet& sites);

}  // namespace skewsphere
