#include <doctest.h>
#include <skewsphere/error.hpp>
#include <skewsphere/model.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace skewsphere;
constexpr double pi = std::numbers::pi;

namespace {
ParameterVector scenario(double eta2, Family f = Family::exponential) {
  return ParameterVector::bivariate(f, 1, 1, 1, eta2, 0.15, 0.25, 0.5, 0, 0);
}
}  // namespace

TEST_CASE("marginal mean") {
  auto p = ParameterVector::bivariate(Family::exponential, 1, 1, 0, 1, 0.2, 0.2, 0, 1, 0);
  CHECK(marginal_mean(p, 0) == 1.0);
  CHECK(marginal_mean(p, 1) == doctest::Approx(0.7978845608028654).epsilon(1e-15));
  p.mu[0] = 0;
  CHECK(marginal_mean(p, 0) == 0.0);
}

TEST_CASE("folded g function") {
  CHECK(folded_g(0.0) == 0.0);
  CHECK(folded_g(1.0) == doctest::Approx(pi / 2 - 1).epsilon(1e-15));
  CHECK(folded_g(-1.0) == doctest::Approx(pi / 2 - 1).epsilon(1e-15));
  CHECK(folded_g(0.5) == doctest::Approx(0.127824791583588).epsilon(1e-12));
  for (double t = -1; t <= 1; t += 0.01) {
    CHECK(folded_g(t) >= 0.0);
    CHECK(folded_g(t) == doctest::Approx(folded_g(-t)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(folded_g(1.0 + 1e-9), domain_error);
}

TEST_CASE("folded g matches the covariance of |X1|, |X2| by Monte Carlo") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n01;
  const double r = 0.7;
  const int N = 400000;
  double sa = 0, sb = 0, sab = 0;
  for (int k = 0; k < N; ++k) {
    const double x = n01(gen), y = r * x + std::sqrt(1 - r * r) * n01(gen);
    sa += std::abs(x);
    sb += std::abs(y);
    sab += std::abs(x) * std::abs(y);
  }
  const double cov = sab / N - (sa / N) * (sb / N);
  CHECK(cov == doctest::Approx(2 / pi * folded_g(r)).epsilon(0.02));
}

TEST_CASE("covariance reduces to the Gaussian case when eta = 0") {
  auto p = ParameterVector::bivariate(Family::exponential, 2, 0.5, 0, 0, 0.3, 0.5, -0.4, 0, 0);
  for (double t : {0.0, 0.1, 0.4, 1.0})
    CHECK(cross_cov(p, 0, 1, t) == doctest::Approx(1.0 * -0.4 * std::exp(-3 * t / 0.4)).epsilon(1e-14));
  CHECK(collocated_corr(p, 0, 1) == doctest::Approx(-0.4).epsilon(1e-14));
}

TEST_CASE("collocated correlations of the two skewness choices") {
  // Direct scalar evaluation of the covariance formula.
  const double g = std::sqrt(0.75) + 0.5 * std::asin(0.5) - 1;
  const double c11 = 2 - 2 / pi, c22 = 1 + 4 * (1 - 2 / pi);
  CHECK(collocated_corr(scenario(-2), 0, 1) == doctest::Approx((-4 / pi * g + 0.5) / std::sqrt(c11 * c22)).epsilon(1e-13));
  CHECK(collocated_corr(scenario(-2), 0, 1) == doctest::Approx(0.1844).epsilon(1e-3));
  CHECK(collocated_corr(scenario(2), 0, 1) == doctest::Approx(0.3624).epsilon(1e-3));
  CHECK(collocated_corr(1, 1, 1, 2, 0.0, 0.0) == 0.0);
  CHECK(collocated_corr(1, 1, 0, 0, 0.3, 0.6) == doctest::Approx(0.6));
}

TEST_CASE("variance identity and covariance symmetry") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 300; ++t) {
    const auto p = ParameterVector::bivariate(t % 2 ? Family::askey : Family::exponential, 0.1 + u(gen), 0.1 + u(gen),
                                              4 * u(gen) - 2, 4 * u(gen) - 2, 0.05 + u(gen), 0.05 + u(gen),
                                              2 * u(gen) - 1, 0, 0);
    for (int i = 0; i < 2; ++i)
      CHECK(cross_cov(p, i, i, 0) ==
            doctest::Approx(p.eta[i] * p.eta[i] * (1 - 2 / pi) + p.sigma2[i]).epsilon(1e-14));
    const double theta = pi * u(gen);
    CHECK(cross_cov(p, 0, 1, theta) == cross_cov(p, 1, 0, theta));
    CHECK(std::abs(cross_cov(p, 0, 1, theta)) <= std::sqrt(cross_cov(p, 0, 0, 0) * cross_cov(p, 1, 1, 0)) + 1e-14);
  }
}

TEST_CASE("joint moments layout and entries") {
  SUBCASE("single site, single component") {
    ParameterVector p;
    p.sigma2 = Eigen::VectorXd::Ones(1);
    p.eta = Eigen::VectorXd::Zero(1);
    p.mu = Eigen::VectorXd::Zero(1);
    p.corr.family = Family::exponential;
    p.corr.scales = Eigen::VectorXd::Constant(1, 0.3);
    p.corr.cross_rho = Eigen::MatrixXd::Identity(1, 1);
    const auto jm = joint_moments(p, SiteSet({Site(0, 0)}));
    CHECK(jm.cov.rows() == 1);
    CHECK(jm.cov(0, 0) == 1.0);
  }
  SUBCASE("antipodal sites under Askey") {
    const auto p = ParameterVector::bivariate(Family::askey, 1, 2, 1, -2, 0.5, 0.8, 0.5, 0, 0);
    const auto jm = joint_moments(p, SiteSet({Site(0, 0), Site(180, 0)}));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(jm.cov(stacked_index(i, 0, 2), stacked_index(j, 1, 2)) == 0.0);
  }
  SUBCASE("generic entries match a direct loop") {
    const auto p = ParameterVector::bivariate(Family::exponential, 1.5, 0.7, 0.8, -1.2, 0.4, 0.6, 0.3, 0.1, -0.2);
    const SiteSet s({Site(0, 0), Site(20, 10)});
    const auto jm = joint_moments(p, s);
    const double theta = s.distance(0, 1);
    for (int i = 0; i < 2; ++i) {
      CHECK(jm.mean[stacked_index(i, 1, 2)] == doctest::Approx(p.mu[i] + p.eta[i] * std::sqrt(2 / pi)));
      for (int j = 0; j < 2; ++j) {
        const double c = i == j ? p.corr.scales[i] : 0.5 * (p.corr.scales[0] + p.corr.scales[1]);
        const double r = (i == j ? 1.0 : 0.3) * std::exp(-3 * theta / c);
        const double g = std::sqrt(1 - r * r) + r * std::asin(r) - 1;
        const double expect = 2 * p.eta[i] * p.eta[j] / pi * g + std::sqrt(p.sigma2[i] * p.sigma2[j]) * r;
        CHECK(jm.cov(stacked_index(i, 0, 2), stacked_index(j, 1, 2)) == doctest::Approx(expect).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("joint moments reject non positive definite structures") {
  const auto p = ParameterVector::bivariate(Family::exponential, 1, 1, 0, 0, 0.3, 0.3, 1.0, 0, 0);
  CHECK_THROWS_AS(joint_moments(p, SiteSet({Site(0, 0), Site(10, 0)})), not_positive_definite);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(ParameterVector::bivariate(Family::exponential, 0, 1, 0, 0, 0.3, 0.3, 0, 0, 0).validate(),
                  domain_error);
  CHECK_THROWS_AS(ParameterVector::bivariate(Family::exponential, 1, 1, 0, 0, 0.3, 0.3, 2, 0, 0).validate(),
                  domain_error);
  CHECK(describe(scenario(2)).find("rho_12=0.5") != std::string::npos);
}
