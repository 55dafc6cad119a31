#include <skewsphere/cl.hpp>

#include <skewsphere/error.hpp>
#include <skewsphere/pairlik.hpp>
#include <skewsphere/parallel.hpp>

#include <cmath>
#include <limits>

namespace skewsphere {

Eigen::MatrixXd uniform_cutoffs(int components, double d) {
  if (!(d >= 0.0)) throw domain_error("cut-off distance must be non-negative");
  return Eigen::MatrixXd::Constant(components, components, d);
}

PairSet enumerate_pairs(const SiteSet& sites, int components, const Eigen::MatrixXd& cutoffs) {
  if (cutoffs.rows() != components || cutoffs.cols() != components)
    throw shape_error("cut-off matrix must be m x m");
  if (!cutoffs.isApprox(cutoffs.transpose(), 0.0)) throw domain_error("cut-off matrix must be symmetric");
  if ((cutoffs.array() < 0.0).any()) throw domain_error("cut-off distances must be non-negative");

  PairSet ps;
  ps.cutoffs = cutoffs;
  ps.components = components;
  ps.n_sites = sites.size();
  const std::size_t n = sites.size();
  for (int i = 0; i < components; ++i) {
    for (int j = i; j < components; ++j) {
      const double d = cutoffs(i, j);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = (i == j ? k + 1 : 0); l < n; ++l) {
          const double theta = sites.distance(k, l);
          if (theta <= d) {
            ps.pairs.push_back({i, j, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(l), theta, 1.0});
          }
        }
      }
    }
  }
  return ps;
}

std::uint64_t full_pair_count(int components, std::uint64_t n_sites) {
  const auto m = static_cast<std::uint64_t>(components);
  return m * n_sites * (n_sites - 1) / 2 + m * (m - 1) * n_sites * n_sites / 2;
}

double cl_objective(const Observations& data, const ParameterVector& p, const PairSet& ps, int threads) {
  if (data.sites() != ps.n_sites)
    throw shape_error("observations cover " + std::to_string(data.sites()) + " sites, pair set " +
                      std::to_string(ps.n_sites));
  if (data.components() != ps.components || p.components() != ps.components)
    throw shape_error("component count mismatch between data, parameters and pair set");

  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  try {
    p.validate();
  } catch (const domain_error&) {
    return neg_inf;
  }

  const std::size_t reps = data.replicates();
  const std::size_t n_chunks = (ps.size() + cl_chunk_size - 1) / cl_chunk_size;
  std::vector<double> chunk_sums(n_chunks, 0.0);

  parallel_for(n_chunks, threads, [&](std::size_t c) {
    CompensatedSum acc;
    const std::size_t end = std::min(ps.size(), (c + 1) * cl_chunk_size);
    for (std::size_t q = c * cl_chunk_size; q < end; ++q) {
      const PairIndex& pr = ps.pairs[q];
      try {
        const PairContext ctx(p, pr.i, pr.j, pr.theta);
        if (!ctx.valid()) {
          chunk_sums[c] = neg_inf;
          return;
        }
        for (std::size_t r = 0; r < reps; ++r) {
          const double ll = ctx.loglik(data(r, pr.i, pr.k), data(r, pr.j, pr.l));
          if (!std::isfinite(ll)) {
            chunk_sums[c] = neg_inf;
            return;
          }
          acc.add(pr.weight * ll);
        }
      } catch (const degenerate_pair&) {
        chunk_sums[c] = neg_inf;
        return;
      }
    }
    chunk_sums[c] = acc.value();
  });

  CompensatedSum total;
  for (double s : chunk_sums) {
    if (!std::isfinite(s)) return neg_inf;
    total.add(s);
  }
  return total.value();
}

}  // namespace skewsphere
