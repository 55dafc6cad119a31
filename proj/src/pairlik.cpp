#include <skewsphere/pairlik.hpp>

#include <skewsphere/bvn.hpp>
#include <skewsphere/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace skewsphere {

namespace {

constexpr double log_two_pi = 1.8378770664093454836;

double floored_eta(double eta) { return std::abs(eta) < eta_floor ? 0.0 : eta; }

}  // namespace

double skew_marginal_logpdf(double z, double mu, double eta, double sigma2) {
  if (!(sigma2 > 0.0)) throw domain_error("sigma2 must be positive");
  eta = floored_eta(eta);
  const double omega = std::sqrt(eta * eta + sigma2);
  const double u = (z - mu) / omega;
  if (eta == 0.0) return norm_logpdf(u) - std::log(omega);
  return std::numbers::ln2 - std::log(omega) + norm_logpdf(u) + norm_logcdf(eta / std::sqrt(sigma2) * u);
}

PairContext::PairContext(const ParameterVector& p, int i, int j, double theta) {
  mu1_ = p.mu[i];
  mu2_ = p.mu[j];
  rx_ = latent_corr(p.corr, i, j, theta);
  ry_ = rx_;
  if (!(std::abs(rx_) < 1.0))
    throw degenerate_pair("latent correlation " + std::to_string(rx_) + " makes the pair degenerate");

  const double s1 = p.sigma(i);
  const double s2 = p.sigma(j);
  const double o11 = s1 * s1;
  const double o22 = s2 * s2;
  const double o12 = (s1 * s2) * ry_;
  const double det_o = o11 * o22 - o12 * o12;
  if (!(o11 > 0.0) || !(det_o > 0.0)) {
    valid_ = false;
    return;
  }

  const double e1 = floored_eta(p.eta[i]);
  const double e2 = floored_eta(p.eta[j]);
  if (e1 == 0.0 && e2 == 0.0) {
    gaussian_ = true;
    oinv11_ = o22 / det_o;
    oinv22_ = o11 / det_o;
    oinv12_ = -o12 / det_o;
    log_det_o_ = std::log(det_o);
    return;
  }

  for (int t = 0; t < 2; ++t) {
    // t = 0 is Omega(-r^x), t = 1 is Omega(+r^x).
    const double s = t == 0 ? -rx_ : rx_;
    const double a11 = o11 + e1 * e1;
    const double a22 = o22 + e2 * e2;
    const double a12 = o12 + (e1 * e2) * s;
    const double det_a = a11 * a22 - a12 * a12;
    Term& term = terms_[t];
    term.ainv11 = a22 / det_a;
    term.ainv22 = a11 / det_a;
    term.ainv12 = -a12 / det_a;
    term.log_det_a = std::log(det_a);

    // D Omega_t = [[e1, e1 s], [e2 s, e2]]; u, v are its columns.
    term.u1 = e1;
    term.u2 = e2 * s;
    term.v1 = e1 * s;
    term.v2 = e2;

    const auto quad = [&](double x1, double x2, double y1, double y2) {
      return (x1 * y1 * term.ainv11 + x2 * y2 * term.ainv22) + (x1 * y2 + x2 * y1) * term.ainv12;
    };
    const double b11 = 1.0 - quad(term.u1, term.u2, term.u1, term.u2);
    const double b22 = 1.0 - quad(term.v1, term.v2, term.v1, term.v2);
    const double b12 = s - quad(term.u1, term.u2, term.v1, term.v2);
    term.b_sd1 = std::sqrt(std::max(b11, 0.0));
    term.b_sd2 = std::sqrt(std::max(b22, 0.0));
    term.b_rho = std::clamp(b12 / (term.b_sd1 * term.b_sd2), -1.0, 1.0);
  }
}

double PairContext::loglik(double z1, double z2) const {
  if (!valid_) return -std::numeric_limits<double>::infinity();
  const double d1 = z1 - mu1_;
  const double d2 = z2 - mu2_;

  if (gaussian_) {
    const double q = (d1 * d1 * oinv11_ + d2 * d2 * oinv22_) + 2.0 * (d1 * d2) * oinv12_;
    return -log_two_pi - 0.5 * log_det_o_ - 0.5 * q;
  }

  std::array<double, 2> logs{};
  for (int t = 0; t < 2; ++t) {
    const Term& term = terms_[t];
    const double w1 = term.ainv11 * d1 + term.ainv12 * d2;
    const double w2 = term.ainv12 * d1 + term.ainv22 * d2;
    const double q = d1 * w1 + d2 * w2;
    const double l1 = term.u1 * w1 + term.u2 * w2;
    const double l2 = term.v1 * w1 + term.v2 * w2;
    const double cdf = std::max(bvn_cdf(l1 / term.b_sd1, l2 / term.b_sd2, term.b_rho), cdf_floor);
    logs[t] = -log_two_pi - 0.5 * term.log_det_a - 0.5 * q + std::log(cdf);
  }
  const double hi = std::max(logs[0], logs[1]);
  const double lo = std::min(logs[0], logs[1]);
  return std::numbers::ln2 + hi + std::log1p(std::exp(lo - hi));
}

double pair_loglik(const ParameterVector& p, int i, int j, double theta, const Eigen::Vector2d& z) {
  return PairContext(p, i, j, theta).loglik(z[0], z[1]);
}

}  // namespace skewsphere
