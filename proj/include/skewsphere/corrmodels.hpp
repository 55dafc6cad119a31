#pragma once

#include <Eigen/Core>
#include <string>
#include <string_view>

namespace skewsphere {

/// Univariate correlation families r(theta; c) on [0, pi].
enum class Family { exponential, askey };

/// exp(-3 theta / c). Drops below 0.05 past theta = c.
double exponential_corr(double theta, double scale);

/// (1 - theta / c)_+^4, identically zero for theta >= c.
double askey_corr(double theta, double scale);

double family_corr(Family family, double theta, double scale);

Family parse_family(std::string_view name);
std::string_view family_name(Family family);

/// Latent correlation structure shared by the X and Y fields:
///   r_ij(theta) = rho_ij * r(theta; c_ij),  c_ij = (c_ii + c_jj) / 2.
struct CorrelationSpec {
  Family family = Family::exponential;
  Eigen::VectorXd scales;     // c_ii, radians
  Eigen::MatrixXd cross_rho;  // symmetric, unit diagonal

  int components() const { return static_cast<int>(scales.size()); }

  double cross_scale(int i, int j) const {
    return i == j ? scales[i] : 0.5 * (scales[i] + scales[j]);
  }

  /// Throws domain_error on non-positive scales, |rho| > 1 or an
  /// asymmetric / non-unit-diagonal rho matrix.
  void validate() const;

  static CorrelationSpec bivariate(Family family, double c11, double c22, double rho12);
};

/// rho_ij * r(theta; c_ij). Serves as both r^x_ij and r^y_ij.
double latent_corr(const CorrelationSpec& spec, int i, int j, double theta);

}  // namespace skewsphere
