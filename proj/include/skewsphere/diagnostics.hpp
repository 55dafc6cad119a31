#pragma once

#include <skewsphere/model.hpp>
#include <skewsphere/observations.hpp>
#include <skewsphere/sphere.hpp>

#include <vector>

namespace skewsphere {

struct SemivariogramBin {
  double center = 0.0;
  double gamma = 0.0;
  std::size_t pairs = 0;  // site pairs (k < l) in the bin
  bool empty = true;
};

/// Classical moment estimator on equal-width geodesic bins over [0, max_dist],
/// averaged over replicates. For i != j the cross form
///   (1 / 2N) sum (Z_i(s_k) - Z_i(s_l)) (Z_j(s_k) - Z_j(s_l))
/// is used.
std::vector<SemivariogramBin> empirical_semivariogram(const Observations& obs, const SiteSet& sites, int i, int j,
                                                      int n_bins, double max_dist);

struct SemivariogramPoint {
  double theta = 0.0;
  double gamma = 0.0;       // C_ij(0) - C_ij(theta)
  double covariance = 0.0;  // C_ij(theta)
};

std::vector<SemivariogramPoint> theoretical_semivariogram(const ParameterVector& p, int i, int j,
                                                          const std::vector<double>& thetas);

struct DensityPoint {
  double z = 0.0;
  double pdf = 0.0;
};

/// Marginal skew-Gaussian density of component i on a grid.
std::vector<DensityPoint> density_overlay(const ParameterVector& p, int i, const std::vector<double>& zs);

/// n equally spaced values on [lo, hi].
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace skewsphere
