#include <skewsphere/simulate.hpp>

#include <skewsphere/error.hpp>

#include <Eigen/Cholesky>
#include <cmath>
#include <random>

namespace skewsphere {

namespace {

std::mt19937_64 replicate_stream(std::uint64_t seed, std::uint64_t rep) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

FieldSimulator::FieldSimulator(ParameterVector p, const SiteSet& sites, double jitter)
    : p_(std::move(p)), n_(sites.size()) {
  p_.validate();
  if (jitter < 0.0) throw domain_error("jitter must be non-negative");
  Eigen::MatrixXd r = latent_corr_matrix(p_.corr, sites);
  r.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() != Eigen::Success)
    throw not_positive_definite("latent correlation matrix is not positive definite for " + describe(p_));
  lower_ = llt.matrixL();
}

Observations FieldSimulator::draw(std::size_t n_reps, std::uint64_t seed, std::size_t first_rep) const {
  const int m = p_.components();
  const auto dim = static_cast<Eigen::Index>(m * n_);
  Observations out(n_reps, m, n_);
  Eigen::VectorXd wx(dim), wy(dim);
  for (std::size_t r = 0; r < n_reps; ++r) {
    auto rng = replicate_stream(seed, first_rep + r);
    std::normal_distribution<double> normal;
    for (Eigen::Index q = 0; q < dim; ++q) wx[q] = normal(rng);
    for (Eigen::Index q = 0; q < dim; ++q) wy[q] = normal(rng);
    const Eigen::VectorXd x = lower_.triangularView<Eigen::Lower>() * wx;
    const Eigen::VectorXd y = lower_.triangularView<Eigen::Lower>() * wy;
    for (int i = 0; i < m; ++i) {
      const double sigma = p_.sigma(i);
      for (std::size_t k = 0; k < n_; ++k) {
        const Eigen::Index q = stacked_index(i, k, n_);
        out(r, i, k) = p_.mu[i] + p_.eta[i] * std::abs(x[q]) + sigma * y[q];
      }
    }
  }
  return out;
}

Observations simulate_field(const ParameterVector& p, const SiteSet& sites, std::size_t n_reps, std::uint64_t seed,
                            double jitter) {
  return FieldSimulator(p, sites, jitter).draw(n_reps, seed);
}

}  // namespace skewsphere
