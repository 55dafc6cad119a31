#pragma once

#include <skewsphere/model.hpp>
#include <skewsphere/observations.hpp>
#include <skewsphere/sphere.hpp>

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace skewsphere {

/// One pair (Z_i(s_k), Z_j(s_l)) with positive weight.
struct PairIndex {
  int i = 0;
  int j = 0;
  std::uint32_t k = 0;
  std::uint32_t l = 0;
  double theta = 0.0;
  double weight = 1.0;
};

/// Pairs retained by 0/1 cut-off weights: marginal pairs (i = j, k < l) and
/// cross pairs (i < j, every k and l including k = l) with
/// theta(s_k, s_l) <= d_ij.
struct PairSet {
  std::vector<PairIndex> pairs;
  Eigen::MatrixXd cutoffs;
  int components = 0;
  std::size_t n_sites = 0;

  std::size_t size() const { return pairs.size(); }
};

/// m x m matrix filled with a single cut-off distance.
Eigen::MatrixXd uniform_cutoffs(int components, double d);

/// Lexicographic (i, j, k, l) enumeration of all positive-weight pairs.
PairSet enumerate_pairs(const SiteSet& sites, int components, const Eigen::MatrixXd& cutoffs);

/// Number of pairs without any cut-off: m n(n-1)/2 + m(m-1) n^2 / 2.
std::uint64_t full_pair_count(int components, std::uint64_t n_sites);

/// Pairs are summed in fixed-size chunks; chunk sums are combined in chunk
/// order, so the result is independent of the worker count.
inline constexpr std::size_t cl_chunk_size = 512;

/// Weighted pairwise composite log-likelihood summed over pairs and
/// replicates. Returns -inf when the parameters are invalid or any pair
/// density is not finite. Throws shape_error on misaligned data.
double cl_objective(const Observations& data, const ParameterVector& p, const PairSet& ps, int threads = 1);

}  // namespace skewsphere
