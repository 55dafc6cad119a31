#include <skewsphere/bvn.hpp>

#include <skewsphere/error.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace skewsphere {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Half of the symmetric Gauss-Legendre rules of order 6, 12 and 20 on [-1, 1]
// (negative abscissae; the mirrored points are generated in the loops).
constexpr std::array<double, 3> gl6_w{0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
constexpr std::array<double, 3> gl6_x{-0.9324695142031522, -0.6612093864662647, -0.2386191860831970};
constexpr std::array<double, 6> gl12_w{0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                                       0.2031674267230659,  0.2334925365383547, 0.2491470458134029};
constexpr std::array<double, 6> gl12_x{-0.9815606342467191, -0.9041172563704750, -0.7699026741943050,
                                       -0.5873179542866171, -0.3678314989981802, -0.1252334085114692};
constexpr std::array<double, 10> gl20_w{0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                                        0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                                        0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
                                        0.1527533871307259};
constexpr std::array<double, 10> gl20_x{-0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
                                        -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
                                        -0.5108670019508271, -0.3737060887154196, -0.2277858511416451,
                                        -0.07652652113349733};

struct Rule {
  const double* w;
  const double* x;
  int size;
};

Rule rule_for(double abs_r) {
  if (abs_r < 0.3) return {gl6_w.data(), gl6_x.data(), 3};
  if (abs_r < 0.75) return {gl12_w.data(), gl12_x.data(), 6};
  return {gl20_w.data(), gl20_x.data(), 10};
}

// Upper orthant probability P(U1 > h, U2 > k), |r| < 1.
double bvn_upper(double h, double k, double r) {
  const Rule g = rule_for(std::abs(r));
  double hk = h * k;
  double bvn = 0.0;

  if (std::abs(r) < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = std::asin(r);
    for (int i = 0; i < g.size; ++i) {
      double sn = std::sin(0.5 * asr * (g.x[i] + 1.0));
      bvn += g.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      sn = std::sin(0.5 * asr * (1.0 - g.x[i]));
      bvn += g.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    return bvn * asr / (2.0 * two_pi) + norm_cdf(-h) * norm_cdf(-k);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  const double as = (1.0 - r) * (1.0 + r);
  double a = std::sqrt(as);
  const double bs = (h - k) * (h - k);
  const double c = (4.0 - hk) / 8.0;
  const double d = (12.0 - hk) / 16.0;
  bvn = a * std::exp(-0.5 * (bs / as + hk)) *
        (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
  if (hk > -160.0) {
    const double b = std::sqrt(bs);
    bvn -= std::exp(-0.5 * hk) * std::sqrt(two_pi) * norm_cdf(-b / a) * b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
  }
  a *= 0.5;
  for (int i = 0; i < g.size; ++i) {
    double xs = a * (g.x[i] + 1.0);
    xs *= xs;
    double rs = std::sqrt(1.0 - xs);
    bvn += a * g.w[i] *
           (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs - std::exp(-0.5 * (bs / xs + hk)) * (1.0 + c * xs * (1.0 + d * xs)));
    xs = a * (1.0 - g.x[i]);
    xs *= xs;
    rs = std::sqrt(1.0 - xs);
    bvn += a * g.w[i] * std::exp(-0.5 * (bs / xs + hk)) *
           (std::exp(-hk * xs / (2.0 * (1.0 + rs) * (1.0 + rs))) / rs - (1.0 + c * xs * (1.0 + d * xs)));
  }
  bvn = -bvn / two_pi;

  if (r > 0.0) return bvn + norm_cdf(-std::max(h, k));
  bvn = -bvn;
  if (k > h) {
    bvn += h < 0.0 ? norm_cdf(k) - norm_cdf(h) : norm_cdf(-h) - norm_cdf(-k);
  }
  return bvn;
}

}  // namespace

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(two_pi); }

double norm_logpdf(double x) { return -0.5 * x * x - 0.5 * std::log(two_pi); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_logcdf(double x) {
  if (x > -30.0) return std::log(norm_cdf(x));
  // Asymptotic series of the Mills ratio; relative error below 1e-14 here.
  const double x2 = x * x;
  double series = 1.0, term = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -(2.0 * k - 1.0) / x2;
    series += term;
  }
  return -0.5 * x2 - std::log(-x) - 0.5 * std::log(two_pi) + std::log(series);
}

Cov2::Cov2(double s11, double s12, double s22) : s11_(s11), s12_(s12), s22_(s22) {
  if (!(s11 > 0.0) || !(s11 * s22 - s12 * s12 > 0.0))
    throw not_positive_definite("2x2 covariance is not positive definite");
}

double phi2_logpdf(const Eigen::Vector2d& y, const Cov2& sigma) {
  const double det = sigma.det();
  const double q = (y[0] * y[0] * sigma.s22() + y[1] * y[1] * sigma.s11() - 2.0 * (y[0] * y[1]) * sigma.s12()) / det;
  return -std::log(two_pi) - 0.5 * std::log(det) - 0.5 * q;
}

double phi2_pdf(const Eigen::Vector2d& y, const Cov2& sigma) { return std::exp(phi2_logpdf(y, sigma)); }

double bvn_cdf(double h, double k, double rho) {
  if (std::isnan(h) || std::isnan(k) || std::isnan(rho)) return std::numeric_limits<double>::quiet_NaN();
  // Canonical argument order keeps the result exactly symmetric in (h, k).
  if (h > k) std::swap(h, k);
  if (rho >= 1.0 - 1e-12) return norm_cdf(h);
  if (rho <= -1.0 + 1e-12) return std::max(0.0, norm_cdf(h) + norm_cdf(k) - 1.0);
  if (h == -std::numeric_limits<double>::infinity()) return 0.0;
  if (k == std::numeric_limits<double>::infinity()) return norm_cdf(h);
  const double p = bvn_upper(-h, -k, rho);
  return std::clamp(p, 0.0, 1.0);
}

double phi2_cdf(const Eigen::Vector2d& l, const Cov2& sigma) {
  const double s1 = std::sqrt(sigma.s11());
  const double s2 = std::sqrt(sigma.s22());
  return bvn_cdf(l[0] / s1, l[1] / s2, sigma.s12() / (s1 * s2));
}

}  // namespace skewsphere
