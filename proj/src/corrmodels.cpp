#include <skewsphere/corrmodels.hpp>

#include <skewsphere/error.hpp>

#include <array>
#include <cmath>

namespace skewsphere {

namespace {

void check_scale(double scale) {
  if (!(scale > 0.0)) throw domain_error("correlation scale must be positive, got " + std::to_string(scale));
}

struct FamilyEntry {
  Family family;
  std::string_view name;
  double (*eval)(double, double);
};

constexpr std::array<FamilyEntry, 2> registry{{
    {Family::exponential, "exponential", &exponential_corr},
    {Family::askey, "askey", &askey_corr},
}};

const FamilyEntry& lookup(Family family) {
  for (const auto& e : registry)
    if (e.family == family) return e;
  throw domain_error("unregistered correlation family");
}

}  // namespace

double exponential_corr(double theta, double scale) {
  check_scale(scale);
  return std::exp(-3.0 * theta / scale);
}

double askey_corr(double theta, double scale) {
  check_scale(scale);
  if (theta >= scale) return 0.0;
  const double u = 1.0 - theta / scale;
  const double u2 = u * u;
  return u2 * u2;
}

double family_corr(Family family, double theta, double scale) {
  return lookup(family).eval(theta, scale);
}

Family parse_family(std::string_view name) {
  for (const auto& e : registry)
    if (e.name == name) return e.family;
  throw domain_error("unknown correlation family '" + std::string(name) + "'");
}

std::string_view family_name(Family family) { return lookup(family).name; }

void CorrelationSpec::validate() const {
  const int m = components();
  if (m < 1) throw domain_error("correlation spec has no components");
  if (cross_rho.rows() != m || cross_rho.cols() != m)
    throw shape_error("cross_rho must be " + std::to_string(m) + "x" + std::to_string(m));
  for (int i = 0; i < m; ++i) {
    check_scale(scales[i]);
    if (cross_rho(i, i) != 1.0) throw domain_error("cross_rho diagonal must be 1");
    for (int j = i + 1; j < m; ++j) {
      const double r = cross_rho(i, j);
      if (r != cross_rho(j, i)) throw domain_error("cross_rho must be symmetric");
      if (!(std::abs(r) <= 1.0))
        throw domain_error("rho_" + std::to_string(i + 1) + std::to_string(j + 1) + " = " + std::to_string(r) +
                           " outside [-1, 1], so the latent correlation is not positive definite");
    }
  }
}

CorrelationSpec CorrelationSpec::bivariate(Family family, double c11, double c22, double rho12) {
  CorrelationSpec spec;
  spec.family = family;
  spec.scales = Eigen::Vector2d(c11, c22);
  spec.cross_rho = Eigen::Matrix2d::Identity();
  spec.cross_rho(0, 1) = spec.cross_rho(1, 0) = rho12;
  return spec;
}

double latent_corr(const CorrelationSpec& spec, int i, int j, double theta) {
  const double r = family_corr(spec.family, theta, spec.cross_scale(i, j));
  return i == j ? r : spec.cross_rho(i, j) * r;
}

}  // namespace skewsphere
