#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstddef>
#include <vector>

namespace skewsphere {

/// Values Z_i(s_k) for every replicate, component and site.
class Observations {
 public:
  Observations() = default;
  Observations(std::size_t n_reps, int components, std::size_t n_sites)
      : reps_(n_reps), m_(components), n_(n_sites), values_(n_reps * components * n_sites, 0.0) {}

  std::size_t replicates() const { return reps_; }
  int components() const { return m_; }
  std::size_t sites() const { return n_; }

  double& operator()(std::size_t rep, int comp, std::size_t site) { return values_[offset(rep, comp, site)]; }
  double operator()(std::size_t rep, int comp, std::size_t site) const { return values_[offset(rep, comp, site)]; }

  /// Component-major vector of length m*n for one replicate.
  Eigen::VectorXd stacked(std::size_t rep) const {
    return Eigen::Map<const Eigen::VectorXd>(values_.data() + offset(rep, 0, 0),
                                             static_cast<Eigen::Index>(m_ * n_));
  }

  /// Single replicate as its own Observations object.
  Observations replicate(std::size_t rep) const {
    Observations out(1, m_, n_);
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(offset(rep, 0, 0)), m_ * n_, out.values_.begin());
    return out;
  }

  const std::vector<double>& raw() const { return values_; }

 private:
  std::size_t offset(std::size_t rep, int comp, std::size_t site) const {
    return (rep * static_cast<std::size_t>(m_) + static_cast<std::size_t>(comp)) * n_ + site;
  }

  std::size_t reps_ = 0;
  int m_ = 0;
  std::size_t n_ = 0;
  std::vector<double> values_;
};

}  // namespace skewsphere
