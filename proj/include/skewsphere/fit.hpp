#pragma once

#include <skewsphere/cl.hpp>
#include <skewsphere/model.hpp>
#include <skewsphere/observations.hpp>
#include <skewsphere/sphere.hpp>

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace skewsphere {

struct FitOptions {
  /// Starting point; default_init() is used when empty.
  std::optional<ParameterVector> init;
  /// Family used by the default initializer (ignored when init is set).
  Family family = Family::exponential;
  int max_iters = 5000;
  double tol = 1e-8;
  int n_starts = 1;
  std::uint64_t seed = 1;
  /// Single shared scale c_ii = c for every component.
  bool tie_scales = false;
  /// Fit the Gaussian submodel (eta held at zero).
  bool gaussian = false;
  int threads = 1;
};

struct UncertaintyReport {
  std::vector<std::string> names;
  Eigen::MatrixXd H;  // -E Hessian of CL, observed at the estimate
  Eigen::MatrixXd J;  // covariance of the CL score across bootstrap replicates
  Eigen::MatrixXd G;  // H J^{-1} H
  std::optional<Eigen::VectorXd> std_errors;
  double h_asymmetry = 0.0;  // max |H - H^T| / max |H| before symmetrization
  bool singular = false;
  int n_boot = 0;
};

struct FitResult {
  ParameterVector estimate;
  double cl_value = 0.0;
  bool converged = false;
  int iters = 0;
  int evaluations = 0;
  double score_norm = 0.0;  // sup norm of the transformed-space gradient
  std::optional<UncertaintyReport> uncertainty;
};

/// Coordinates the optimizer works in: the full transformed vector is
///   (log sigma_i^2, eta_i, log c_ii, atanh rho_ij (i<j), mu_i),
/// and a layout selects the free entries (dropping eta for the Gaussian
/// submodel and collapsing the scales when they are tied).
class ParameterLayout {
 public:
  ParameterLayout(int components, Family family, bool tie_scales, bool gaussian);

  std::size_t free_size() const { return slots_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  Eigen::VectorXd to_free(const ParameterVector& p) const;  // transformed
  ParameterVector from_free(const Eigen::VectorXd& v, const ParameterVector& base) const;

  Eigen::VectorXd natural(const ParameterVector& p) const;
  ParameterVector from_natural(const Eigen::VectorXd& v, const ParameterVector& base) const;

  /// Projects p onto the layout's constraints (eta zeroed, scales averaged).
  ParameterVector conform(ParameterVector p) const;

 private:
  enum class Kind { log, identity, atanh };
  struct Slot {
    Kind kind;
    std::vector<int> targets;  // indices into the full vector
  };
  int m_;
  Family family_;
  bool tie_scales_;
  bool gaussian_;
  std::vector<Slot> slots_;
  std::vector<std::string> names_;
};

/// Full natural vector (sigma2, eta, c, rho_{i<j}, mu).
Eigen::VectorXd natural_vector(const ParameterVector& p);
ParameterVector from_natural_vector(const Eigen::VectorXd& v, int components, Family family);

/// Bijection to R^d: log for sigma2 and c, atanh for rho, identity for eta, mu.
Eigen::VectorXd to_unconstrained(const ParameterVector& p);
ParameterVector from_unconstrained(const Eigen::VectorXd& v, int components, Family family);

/// Moment-based starting values: skew-normal method of moments per
/// component, rho from the collocated sample correlation, c from the lag
/// where the binned sample correlogram falls below 0.05.
ParameterVector default_init(const Observations& data, const SiteSet& sites, Family family,
                             const Eigen::MatrixXd& cutoffs);

FitResult maximize_cl(const Observations& data, const SiteSet& sites, const FitOptions& options,
                      const Eigen::MatrixXd& cutoffs);
FitResult maximize_cl(const Observations& data, const SiteSet& sites, const FitOptions& options, const PairSet& ps);

/// Godambe sandwich at `estimate`: H by central differences of the CL
/// gradient, J from scores of `n_boot` parametric-bootstrap data sets
/// simulated at the estimate.
UncertaintyReport godambe(const Observations& data, const SiteSet& sites, const ParameterVector& estimate,
                          const Eigen::MatrixXd& cutoffs, int n_boot, std::uint64_t seed,
                          const FitOptions& options = {});

/// Central-difference gradient of the CL in the layout's natural coordinates.
Eigen::VectorXd cl_gradient(const Observations& data, const ParameterVector& p, const PairSet& ps,
                            const ParameterLayout& layout, int threads = 1);

}  // namespace skewsphere
