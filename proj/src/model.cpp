#include <skewsphere/model.hpp>

#include <skewsphere/error.hpp>

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace skewsphere {

double ParameterVector::sigma(int i) const { return std::sqrt(sigma2[i]); }

void ParameterVector::validate() const {
  const int m = components();
  if (m < 1) throw shape_error("parameter vector has no components");
  if (eta.size() != m || mu.size() != m || corr.components() != m)
    throw shape_error("parameter vector components disagree in length");
  for (int i = 0; i < m; ++i) {
    if (!(sigma2[i] > 0.0) || !std::isfinite(sigma2[i]))
      throw domain_error("sigma2_" + std::to_string(i + 1) + " must be positive and finite");
    if (!std::isfinite(eta[i]) || !std::isfinite(mu[i]))
      throw domain_error("eta and mu must be finite");
  }
  corr.validate();
}

ParameterVector ParameterVector::bivariate(Family family, double sigma2_1, double sigma2_2, double eta1,
                                           double eta2, double c11, double c22, double rho12, double mu1,
                                           double mu2) {
  ParameterVector p;
  p.sigma2 = Eigen::Vector2d(sigma2_1, sigma2_2);
  p.eta = Eigen::Vector2d(eta1, eta2);
  p.mu = Eigen::Vector2d(mu1, mu2);
  p.corr = CorrelationSpec::bivariate(family, c11, c22, rho12);
  return p;
}

std::string describe(const ParameterVector& p) {
  std::ostringstream os;
  os.precision(6);
  const int m = p.components();
  for (int i = 0; i < m; ++i) os << "sigma2_" << i + 1 << "=" << p.sigma2[i] << " ";
  for (int i = 0; i < m; ++i) os << "eta_" << i + 1 << "=" << p.eta[i] << " ";
  for (int i = 0; i < m; ++i) os << "c_" << i + 1 << i + 1 << "=" << p.corr.scales[i] << " ";
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) os << "rho_" << i + 1 << j + 1 << "=" << p.corr.cross_rho(i, j) << " ";
  for (int i = 0; i < m; ++i) os << "mu_" << i + 1 << "=" << p.mu[i] << (i + 1 < m ? " " : "");
  os << " (" << family_name(p.corr.family) << ")";
  return os.str();
}

double marginal_mean(const ParameterVector& p, int i) {
  return p.mu[i] + p.eta[i] * std::sqrt(2.0 / std::numbers::pi);
}

double folded_g(double t) {
  if (!(std::abs(t) <= 1.0)) throw domain_error("g(t) requires |t| <= 1");
  return std::sqrt(1.0 - t * t) + t * std::asin(t) - 1.0;
}

double cross_cov(const ParameterVector& p, int i, int j, double theta) {
  const double r = std::clamp(latent_corr(p.corr, i, j, theta), -1.0, 1.0);
  return 2.0 * p.eta[i] * p.eta[j] / std::numbers::pi * folded_g(r) + p.sigma(i) * p.sigma(j) * r;
}

double collocated_corr(const ParameterVector& p, int i, int j) {
  return cross_cov(p, i, j, 0.0) / std::sqrt(cross_cov(p, i, i, 0.0) * cross_cov(p, j, j, 0.0));
}

double collocated_corr(double sigma2_i, double sigma2_j, double eta_i, double eta_j, double rho_x, double rho_y) {
  const double k = 2.0 / std::numbers::pi;
  const double g1 = std::numbers::pi / 2.0 - 1.0;
  const double cij = k * eta_i * eta_j * folded_g(rho_x) + std::sqrt(sigma2_i * sigma2_j) * rho_y;
  const double cii = k * eta_i * eta_i * g1 + sigma2_i;
  const double cjj = k * eta_j * eta_j * g1 + sigma2_j;
  return cij / std::sqrt(cii * cjj);
}

JointMoments joint_moments(const ParameterVector& p, const SiteSet& sites) {
  p.validate();
  const int m = p.components();
  const std::size_t n = sites.size();
  const Eigen::Index dim = static_cast<Eigen::Index>(m * n);
  const Eigen::MatrixXd dist = sites.distance_matrix();

  JointMoments out;
  out.mean.resize(dim);
  out.cov.resize(dim, dim);
  for (int i = 0; i < m; ++i) {
    const double mean_i = marginal_mean(p, i);
    for (std::size_t k = 0; k < n; ++k) out.mean[stacked_index(i, k, n)] = mean_i;
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
          const double c = cross_cov(p, i, j, dist(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)));
          out.cov(stacked_index(i, k, n), stacked_index(j, l, n)) = c;
          out.cov(stacked_index(j, l, n), stacked_index(i, k, n)) = c;
        }
      }
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(out.cov);
  if (llt.info() != Eigen::Success)
    throw not_positive_definite("joint covariance is not positive definite for " + describe(p));
  return out;
}

Eigen::MatrixXd latent_corr_matrix(const CorrelationSpec& spec, const SiteSet& sites) {
  spec.validate();
  const int m = spec.components();
  const std::size_t n = sites.size();
  const Eigen::MatrixXd dist = sites.distance_matrix();
  const Eigen::Index dim = static_cast<Eigen::Index>(m * n);
  Eigen::MatrixXd r(dim, dim);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
          const double v = latent_corr(spec, i, j, dist(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)));
          r(stacked_index(i, k, n), stacked_index(j, l, n)) = v;
          r(stacked_index(j, l, n), stacked_index(i, k, n)) = v;
        }
      }
    }
  }
  return r;
}

}  // namespace skewsphere
