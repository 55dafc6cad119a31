#include <skewsphere/fit.hpp>

#include <skewsphere/error.hpp>
#include <skewsphere/optim.hpp>
#include <skewsphere/parallel.hpp>
#include <skewsphere/simulate.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace skewsphere {

namespace {

int rho_count(int m) { return m * (m - 1) / 2; }
int full_size(int m) { return 4 * m + rho_count(m); }

// Offsets of each block in the full vector.
int sigma2_at(int, int i) { return i; }
int eta_at(int m, int i) { return m + i; }
int scale_at(int m, int i) { return 2 * m + i; }
int rho_at(int m, int q) { return 3 * m + q; }
int mu_at(int m, int i) { return 3 * m + rho_count(m) + i; }

std::string pair_suffix(int i, int j) { return std::to_string(i + 1) + std::to_string(j + 1); }

}  // namespace

Eigen::VectorXd natural_vector(const ParameterVector& p) {
  const int m = p.components();
  Eigen::VectorXd v(full_size(m));
  int q = 0;
  for (int i = 0; i < m; ++i) {
    v[sigma2_at(m, i)] = p.sigma2[i];
    v[eta_at(m, i)] = p.eta[i];
    v[scale_at(m, i)] = p.corr.scales[i];
    v[mu_at(m, i)] = p.mu[i];
    for (int j = i + 1; j < m; ++j) v[rho_at(m, q++)] = p.corr.cross_rho(i, j);
  }
  return v;
}

ParameterVector from_natural_vector(const Eigen::VectorXd& v, int m, Family family) {
  if (v.size() != full_size(m)) throw shape_error("parameter vector has the wrong length");
  ParameterVector p;
  p.sigma2.resize(m);
  p.eta.resize(m);
  p.mu.resize(m);
  p.corr.family = family;
  p.corr.scales.resize(m);
  p.corr.cross_rho = Eigen::MatrixXd::Identity(m, m);
  int q = 0;
  for (int i = 0; i < m; ++i) {
    p.sigma2[i] = v[sigma2_at(m, i)];
    p.eta[i] = v[eta_at(m, i)];
    p.corr.scales[i] = v[scale_at(m, i)];
    p.mu[i] = v[mu_at(m, i)];
    for (int j = i + 1; j < m; ++j) {
      p.corr.cross_rho(i, j) = p.corr.cross_rho(j, i) = v[rho_at(m, q++)];
    }
  }
  return p;
}

Eigen::VectorXd to_unconstrained(const ParameterVector& p) {
  p.validate();
  const int m = p.components();
  Eigen::VectorXd v = natural_vector(p);
  for (int i = 0; i < m; ++i) {
    v[sigma2_at(m, i)] = std::log(v[sigma2_at(m, i)]);
    v[scale_at(m, i)] = std::log(v[scale_at(m, i)]);
  }
  for (int q = 0; q < rho_count(m); ++q) {
    const double r = v[rho_at(m, q)];
    if (!(std::abs(r) < 1.0)) throw domain_error("rho must lie strictly inside (-1, 1) to be transformed");
    v[rho_at(m, q)] = std::atanh(r);
  }
  return v;
}

ParameterVector from_unconstrained(const Eigen::VectorXd& v, int m, Family family) {
  if (v.size() != full_size(m)) throw shape_error("transformed vector has the wrong length");
  if (!v.allFinite()) throw domain_error("transformed vector must be finite");
  Eigen::VectorXd w = v;
  for (int i = 0; i < m; ++i) {
    w[sigma2_at(m, i)] = std::exp(v[sigma2_at(m, i)]);
    w[scale_at(m, i)] = std::exp(v[scale_at(m, i)]);
  }
  for (int q = 0; q < rho_count(m); ++q) w[rho_at(m, q)] = std::tanh(v[rho_at(m, q)]);
  return from_natural_vector(w, m, family);
}

ParameterLayout::ParameterLayout(int m, Family family, bool tie_scales, bool gaussian)
    : m_(m), family_(family), tie_scales_(tie_scales), gaussian_(gaussian) {
  if (m < 1) throw domain_error("layout needs at least one component");
  for (int i = 0; i < m; ++i) {
    slots_.push_back({Kind::log, {sigma2_at(m, i)}});
    names_.push_back("sigma2_" + std::to_string(i + 1));
  }
  if (!gaussian) {
    for (int i = 0; i < m; ++i) {
      slots_.push_back({Kind::identity, {eta_at(m, i)}});
      names_.push_back("eta_" + std::to_string(i + 1));
    }
  }
  if (tie_scales) {
    Slot s{Kind::log, {}};
    for (int i = 0; i < m; ++i) s.targets.push_back(scale_at(m, i));
    slots_.push_back(s);
    names_.push_back("c");
  } else {
    for (int i = 0; i < m; ++i) {
      slots_.push_back({Kind::log, {scale_at(m, i)}});
      names_.push_back("c_" + pair_suffix(i, i));
    }
  }
  int q = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      slots_.push_back({Kind::atanh, {rho_at(m, q++)}});
      names_.push_back("rho_" + pair_suffix(i, j));
    }
  }
  for (int i = 0; i < m; ++i) {
    slots_.push_back({Kind::identity, {mu_at(m, i)}});
    names_.push_back("mu_" + std::to_string(i + 1));
  }
}

ParameterVector ParameterLayout::conform(ParameterVector p) const {
  if (p.components() != m_) throw shape_error("parameter vector does not match the layout");
  p.corr.family = family_;
  if (gaussian_) p.eta.setZero();
  if (tie_scales_) p.corr.scales.setConstant(p.corr.scales.mean());
  return p;
}

Eigen::VectorXd ParameterLayout::natural(const ParameterVector& p) const {
  const Eigen::VectorXd full = natural_vector(conform(p));
  Eigen::VectorXd v(static_cast<Eigen::Index>(slots_.size()));
  for (std::size_t s = 0; s < slots_.size(); ++s) v[static_cast<Eigen::Index>(s)] = full[slots_[s].targets.front()];
  return v;
}

ParameterVector ParameterLayout::from_natural(const Eigen::VectorXd& v, const ParameterVector& base) const {
  Eigen::VectorXd full = natural_vector(conform(base));
  for (std::size_t s = 0; s < slots_.size(); ++s)
    for (int t : slots_[s].targets) full[t] = v[static_cast<Eigen::Index>(s)];
  return from_natural_vector(full, m_, family_);
}

Eigen::VectorXd ParameterLayout::to_free(const ParameterVector& p) const {
  Eigen::VectorXd v = natural(p);
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    auto& x = v[static_cast<Eigen::Index>(s)];
    switch (slots_[s].kind) {
      case Kind::log:
        if (!(x > 0.0)) throw domain_error(names_[s] + " must be positive");
        x = std::log(x);
        break;
      case Kind::atanh:
        if (!(std::abs(x) < 1.0)) throw domain_error(names_[s] + " must lie strictly inside (-1, 1)");
        x = std::atanh(x);
        break;
      case Kind::identity:
        break;
    }
  }
  return v;
}

ParameterVector ParameterLayout::from_free(const Eigen::VectorXd& v, const ParameterVector& base) const {
  Eigen::VectorXd w = v;
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    auto& x = w[static_cast<Eigen::Index>(s)];
    switch (slots_[s].kind) {
      case Kind::log: x = std::exp(x); break;
      case Kind::atanh: x = std::tanh(x); break;
      case Kind::identity: break;
    }
  }
  return from_natural(w, base);
}

ParameterVector default_init(const Observations& data, const SiteSet& sites, Family family,
                             const Eigen::MatrixXd& cutoffs) {
  const int m = data.components();
  const std::size_t n = data.sites();
  const std::size_t reps = data.replicates();
  if (sites.size() != n) throw shape_error("sites and observations disagree");
  const double count = static_cast<double>(n * reps);
  const double b = std::sqrt(2.0 / std::numbers::pi);

  ParameterVector p;
  p.sigma2.resize(m);
  p.eta.resize(m);
  p.mu.resize(m);
  p.corr.family = family;
  p.corr.scales.resize(m);
  p.corr.cross_rho = Eigen::MatrixXd::Identity(m, m);

  Eigen::VectorXd mean(m), var(m);
  for (int i = 0; i < m; ++i) {
    double s1 = 0.0;
    for (std::size_t r = 0; r < reps; ++r)
      for (std::size_t k = 0; k < n; ++k) s1 += data(r, i, k);
    const double m1 = s1 / count;
    double s2 = 0.0, s3 = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      for (std::size_t k = 0; k < n; ++k) {
        const double d = data(r, i, k) - m1;
        s2 += d * d;
        s3 += d * d * d;
      }
    }
    const double v = std::max(s2 / count, 1e-12);
    const double skew = (s3 / count) / std::pow(v, 1.5);
    mean[i] = m1;
    var[i] = v;

    // Skew-normal method of moments, |delta| capped at 0.95.
    const double a = std::cbrt(2.0 * skew / (4.0 - std::numbers::pi));
    double delta = std::clamp(a / std::sqrt(1.0 + a * a) / b, -0.95, 0.95);
    const double t = b * delta;
    const double omega2 = v / (1.0 - t * t);
    p.eta[i] = delta * std::sqrt(omega2);
    p.sigma2[i] = omega2 * (1.0 - delta * delta);
    p.mu[i] = m1 - p.eta[i] * b;
  }

  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < reps; ++r)
        for (std::size_t k = 0; k < n; ++k) s += (data(r, i, k) - mean[i]) * (data(r, j, k) - mean[j]);
      const double rho = s / count / std::sqrt(var[i] * var[j]);
      p.corr.cross_rho(i, j) = p.corr.cross_rho(j, i) = std::clamp(rho, -0.9, 0.9);
    }
  }

  // Binned correlogram per component; c from the lag where it drops to 0.05.
  constexpr int n_bins = 10;
  constexpr double level = 0.05;
  for (int i = 0; i < m; ++i) {
    const double max_lag = std::min(std::numbers::pi, cutoffs(i, i) > 0.0 ? cutoffs(i, i) : std::numbers::pi);
    std::vector<double> num(n_bins, 0.0), lag(n_bins, 0.0);
    std::vector<std::size_t> cnt(n_bins, 0);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = k + 1; l < n; ++l) {
        const double theta = sites.distance(k, l);
        if (theta > max_lag) continue;
        const int bin = std::min(n_bins - 1, static_cast<int>(theta / max_lag * n_bins));
        for (std::size_t r = 0; r < reps; ++r)
          num[bin] += (data(r, i, k) - mean[i]) * (data(r, i, l) - mean[i]);
        lag[bin] += theta * static_cast<double>(reps);
        cnt[bin] += reps;
      }
    }
    double crossing = max_lag;
    double prev_lag = 0.0, prev_corr = 1.0;
    for (int bin = 0; bin < n_bins; ++bin) {
      if (cnt[bin] == 0) continue;
      const double c = num[bin] / static_cast<double>(cnt[bin]) / var[i];
      const double h = lag[bin] / static_cast<double>(cnt[bin]);
      if (c < level) {
        crossing = prev_lag + (h - prev_lag) * (prev_corr - level) / std::max(prev_corr - c, 1e-12);
        break;
      }
      prev_lag = h;
      prev_corr = c;
    }
    double scale = crossing;
    if (family == Family::askey) scale = crossing / (1.0 - std::pow(level, 0.25));
    p.corr.scales[i] = std::clamp(scale, 0.01, std::numbers::pi);
  }
  return p;
}

namespace {

double score_threshold(double cl) { return 1e-2 * std::max(1.0, std::abs(cl)); }

double transformed_score_norm(const Observations& data, const PairSet& ps, const ParameterLayout& layout,
                              const Eigen::VectorXd& v, const ParameterVector& base, int threads) {
  constexpr double h = 1e-5;
  double norm = 0.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    Eigen::VectorXd up = v, down = v;
    up[k] += h;
    down[k] -= h;
    const double g = (cl_objective(data, layout.from_free(up, base), ps, threads) -
                      cl_objective(data, layout.from_free(down, base), ps, threads)) /
                     (2.0 * h);
    norm = std::max(norm, std::isfinite(g) ? std::abs(g) : std::numeric_limits<double>::infinity());
  }
  return norm;
}

}  // namespace

FitResult maximize_cl(const Observations& data, const SiteSet& sites, const FitOptions& options,
                      const Eigen::MatrixXd& cutoffs) {
  return maximize_cl(data, sites, options, enumerate_pairs(sites, data.components(), cutoffs));
}

FitResult maximize_cl(const Observations& data, const SiteSet& sites, const FitOptions& options, const PairSet& ps) {
  if (!(options.tol > 0.0)) throw domain_error("fit tolerance must be positive");
  if (options.n_starts < 1) throw domain_error("n_starts must be at least 1");
  if (ps.size() == 0) throw domain_error("no pairs fall within the cut-off distances");
  const int m = data.components();
  const Family family = options.init ? options.init->corr.family : options.family;
  const ParameterLayout layout(m, family, options.tie_scales, options.gaussian);

  ParameterVector init;
  if (options.init) {
    init = *options.init;
  } else {
    init = default_init(data, sites, family, ps.cutoffs);
    if (options.gaussian) {
      for (int i = 0; i < m; ++i) {
        const double b = std::sqrt(2.0 / std::numbers::pi);
        init.mu[i] += init.eta[i] * b;
        init.sigma2[i] += init.eta[i] * init.eta[i] * (1.0 - b * b);
      }
    }
  }
  init = layout.conform(init);
  init.validate();

  auto objective = [&](const Eigen::VectorXd& v) {
    const double cl = cl_objective(data, layout.from_free(v, init), ps, options.threads);
    return std::isfinite(cl) ? -cl : std::numeric_limits<double>::infinity();
  };

  SimplexOptions simplex;
  simplex.max_iters = options.max_iters;
  simplex.x_tol = options.tol;

  const Eigen::VectorXd v0 = layout.to_free(init);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> jitter(0.0, 0.5);

  SimplexResult best;
  best.value = std::numeric_limits<double>::infinity();
  int total_iters = 0, total_evals = 0;
  for (int s = 0; s < options.n_starts; ++s) {
    Eigen::VectorXd start = v0;
    if (s > 0)
      for (Eigen::Index k = 0; k < start.size(); ++k) start[k] += jitter(rng);
    SimplexResult r = nelder_mead(objective, start, simplex);
    total_iters += r.iters;
    total_evals += r.evaluations;
    if (r.value < best.value) best = r;
  }
  if (!std::isfinite(best.value)) throw numerical_error("every start lies in the invalid parameter region");

  FitResult out;
  out.estimate = layout.from_free(best.x, init);
  out.cl_value = -best.value;
  out.iters = total_iters;
  out.evaluations = total_evals;
  out.score_norm = transformed_score_norm(data, ps, layout, best.x, init, options.threads);
  out.converged = best.converged && out.score_norm < score_threshold(out.cl_value);
  return out;
}

namespace {

Eigen::VectorXd natural_steps(const ParameterLayout& layout, const Eigen::VectorXd& x) {
  Eigen::VectorXd h(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    double step = 1e-4 * std::max(std::abs(x[k]), 1e-2);
    const std::string& name = layout.names()[static_cast<std::size_t>(k)];
    if (name.starts_with("rho")) step = std::min(step, 0.25 * (1.0 - std::abs(x[k])));
    if (name.starts_with("sigma2") || name.starts_with("c")) step = std::min(step, 0.25 * x[k]);
    h[k] = step;
  }
  return h;
}

}  // namespace

Eigen::VectorXd cl_gradient(const Observations& data, const ParameterVector& p, const PairSet& ps,
                            const ParameterLayout& layout, int threads) {
  const Eigen::VectorXd x = layout.natural(p);
  const Eigen::VectorXd h = natural_steps(layout, x);
  Eigen::VectorXd g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd up = x, down = x;
    up[k] += h[k];
    down[k] -= h[k];
    g[k] = (cl_objective(data, layout.from_natural(up, p), ps, threads) -
            cl_objective(data, layout.from_natural(down, p), ps, threads)) /
           (2.0 * h[k]);
  }
  return g;
}

UncertaintyReport godambe(const Observations& data, const SiteSet& sites, const ParameterVector& estimate,
                          const Eigen::MatrixXd& cutoffs, int n_boot, std::uint64_t seed, const FitOptions& options) {
  if (n_boot < 2) throw domain_error("n_boot must be at least 2");
  const int m = data.components();
  const ParameterLayout layout(m, estimate.corr.family, options.tie_scales, options.gaussian);
  const ParameterVector at = layout.conform(estimate);
  const PairSet ps = enumerate_pairs(sites, m, cutoffs);
  const Eigen::VectorXd x = layout.natural(at);
  const Eigen::VectorXd h = natural_steps(layout, x);
  const auto p = x.size();

  UncertaintyReport rep;
  rep.names = layout.names();
  rep.n_boot = n_boot;

  Eigen::MatrixXd hess(p, p);
  for (Eigen::Index l = 0; l < p; ++l) {
    Eigen::VectorXd up = x, down = x;
    up[l] += h[l];
    down[l] -= h[l];
    const Eigen::VectorXd gu = cl_gradient(data, layout.from_natural(up, at), ps, layout, options.threads);
    const Eigen::VectorXd gd = cl_gradient(data, layout.from_natural(down, at), ps, layout, options.threads);
    hess.col(l) = -(gu - gd) / (2.0 * h[l]);
  }
  const double scale = hess.cwiseAbs().maxCoeff();
  rep.h_asymmetry = scale > 0.0 ? (hess - hess.transpose()).cwiseAbs().maxCoeff() / scale : 0.0;
  rep.H = 0.5 * (hess + hess.transpose());

  const FieldSimulator sim(at, sites);
  const std::size_t reps = data.replicates();
  Eigen::MatrixXd scores(p, n_boot);
  parallel_for(static_cast<std::size_t>(n_boot), options.threads, [&](std::size_t b) {
    const Observations boot = sim.draw(reps, seed, b * reps);
    scores.col(static_cast<Eigen::Index>(b)) = cl_gradient(boot, at, ps, layout, 1);
  });
  const Eigen::VectorXd mean = scores.rowwise().mean();
  const Eigen::MatrixXd centered = scores.colwise() - mean;
  rep.J = centered * centered.transpose() / static_cast<double>(n_boot - 1);

  Eigen::LDLT<Eigen::MatrixXd> jfac(rep.J);
  Eigen::FullPivLU<Eigen::MatrixXd> hfac(rep.H);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> jeig(rep.J, Eigen::EigenvaluesOnly);
  const double jmin = jeig.eigenvalues().minCoeff();
  const double jmax = jeig.eigenvalues().maxCoeff();
  rep.singular = jfac.info() != Eigen::Success || !(jmin > 1e-12 * jmax) || !hfac.isInvertible();
  if (rep.singular) {
    rep.G = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
    return rep;
  }
  rep.G = rep.H * jfac.solve(rep.H);
  const Eigen::MatrixXd hinv = hfac.inverse();
  const Eigen::MatrixXd cov = hinv * rep.J * hinv.transpose();
  Eigen::VectorXd se(p);
  for (Eigen::Index k = 0; k < p; ++k) se[k] = std::sqrt(std::max(cov(k, k), 0.0));
  rep.std_errors = se;
  return rep;
}

}  // namespace skewsphere
