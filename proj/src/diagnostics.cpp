#include <skewsphere/diagnostics.hpp>

#include <skewsphere/error.hpp>
#include <skewsphere/pairlik.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace skewsphere {

std::vector<SemivariogramBin> empirical_semivariogram(const Observations& obs, const SiteSet& sites, int i, int j,
                                                      int n_bins, double max_dist) {
  if (n_bins < 1) throw domain_error("n_bins must be at least 1");
  if (!(max_dist > 0.0 && max_dist <= std::numbers::pi)) throw domain_error("max_dist must lie in (0, pi]");
  if (obs.sites() != sites.size()) throw shape_error("observations do not match sites");
  if (i < 0 || j < 0 || i >= obs.components() || j >= obs.components()) throw domain_error("component out of range");

  const double width = max_dist / n_bins;
  std::vector<SemivariogramBin> bins(static_cast<std::size_t>(n_bins));
  std::vector<double> sums(bins.size(), 0.0);
  const std::size_t n = sites.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) {
      const double theta = sites.distance(k, l);
      if (theta > max_dist) continue;
      const auto b = std::min(static_cast<std::size_t>(theta / width), bins.size() - 1);
      double s = 0.0;
      for (std::size_t r = 0; r < obs.replicates(); ++r)
        s += (obs(r, i, k) - obs(r, i, l)) * (obs(r, j, k) - obs(r, j, l));
      sums[b] += s;
      ++bins[b].pairs;
    }
  }
  for (std::size_t b = 0; b < bins.size(); ++b) {
    bins[b].center = (static_cast<double>(b) + 0.5) * width;
    bins[b].empty = bins[b].pairs == 0;
    if (!bins[b].empty)
      bins[b].gamma = sums[b] / (2.0 * static_cast<double>(bins[b].pairs) * static_cast<double>(obs.replicates()));
  }
  return bins;
}

std::vector<SemivariogramPoint> theoretical_semivariogram(const ParameterVector& p, int i, int j,
                                                          const std::vector<double>& thetas) {
  const double c0 = cross_cov(p, i, j, 0.0);
  std::vector<SemivariogramPoint> out;
  out.reserve(thetas.size());
  for (double t : thetas) {
    const double c = cross_cov(p, i, j, t);
    out.push_back({t, c0 - c, c});
  }
  return out;
}

std::vector<DensityPoint> density_overlay(const ParameterVector& p, int i, const std::vector<double>& zs) {
  std::vector<DensityPoint> out;
  out.reserve(zs.size());
  for (double z : zs) out.push_back({z, std::exp(skew_marginal_logpdf(z, p.mu[i], p.eta[i], p.sigma2[i]))});
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(std::max(n, 0)));
  for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
  return v;
}

}  // namespace skewsphere
