#include <skewsphere/cli/commands.hpp>

#include <skewsphere/cl.hpp>
#include <skewsphere/cli/config.hpp>
#include <skewsphere/cli/io.hpp>
#include <skewsphere/diagnostics.hpp>
#include <skewsphere/error.hpp>
#include <skewsphere/fit.hpp>
#include <skewsphere/parallel.hpp>
#include <skewsphere/predict.hpp>
#include <skewsphere/simulate.hpp>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace skewsphere::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Context {
  Config cfg;
  fs::path out_dir;
  std::vector<std::string> data_files;
  std::string params_file;
  std::ostream* out = nullptr;

  std::uint64_t seed() const { return static_cast<std::uint64_t>(cfg.get_int("run.seed", 1)); }
  int threads() const { return static_cast<int>(cfg.get_int("run.threads", 1)); }

  std::string path(const std::string& name) const { return (out_dir / name).string(); }
};

void ensure_out_dir(const Context& ctx) {
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec) throw io_error("cannot create output directory '" + ctx.out_dir.string() + "': " + ec.message());
}

SiteSet sites_from_config(const Config& cfg) {
  if (const auto file = cfg.find("sites.file")) return read_sites_csv(*file);
  const auto n_lon = cfg.get_int("grid.n_lon", 9);
  const auto n_lat = cfg.get_int("grid.n_lat", 9);
  if (n_lon < 1 || n_lat < 1) throw config_error("grid.n_lon and grid.n_lat must be positive");
  return lonlat_grid(static_cast<int>(n_lon), static_cast<int>(n_lat), cfg.get_double("grid.lat_min", -80.0),
                     cfg.get_double("grid.lat_max", 80.0));
}

ParameterVector params_for(const Context& ctx) {
  return ctx.params_file.empty() ? params_from_config(ctx.cfg) : read_params_file(ctx.params_file);
}

FitOptions fit_options(const Context& ctx, Family family) {
  FitOptions o;
  o.family = family;
  o.max_iters = static_cast<int>(ctx.cfg.get_int("fit.max_iters", 5000));
  o.tol = ctx.cfg.get_double("fit.tol", 1e-8);
  o.n_starts = static_cast<int>(ctx.cfg.get_int("fit.n_starts", 1));
  o.seed = ctx.seed();
  o.tie_scales = ctx.cfg.get_bool("fit.tie_scales", false);
  o.gaussian = ctx.cfg.get_bool("fit.gaussian", false);
  o.threads = ctx.threads();
  if (!(o.tol > 0.0) || o.n_starts < 1 || o.max_iters < 1)
    throw config_error("fit.tol must be positive, fit.n_starts and fit.max_iters at least 1");
  const std::string init = ctx.cfg.get_string("fit.init", "heuristic");
  if (init == "model") {
    o.init = params_from_config(ctx.cfg);
  } else if (init != "heuristic") {
    throw config_error("fit.init must be 'heuristic' or 'model', got '" + init + "'");
  }
  return o;
}

Eigen::MatrixXd cutoffs_for(const Config& cfg, int m) {
  const double d = cfg.get_double("fit.cutoff", 0.5);
  if (!(d > 0.0)) throw config_error("fit.cutoff must be positive");
  return uniform_cutoffs(m, d);
}

std::size_t replicate_position(const Config& cfg, const std::string& key, const Dataset& ds) {
  const auto r = cfg.get_int(key, 1);
  if (r < 1 || static_cast<std::size_t>(r) > ds.obs.replicates())
    throw config_error(key + " = " + std::to_string(r) + " but the data hold " +
                       std::to_string(ds.obs.replicates()) + " replicate(s)");
  return static_cast<std::size_t>(r - 1);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw io_error("cannot write '" + path + "'");
  return f;
}

int cmd_simulate(const Context& ctx) {
  const ParameterVector p = params_from_config(ctx.cfg);
  const SiteSet sites = sites_from_config(ctx.cfg);
  const auto n_reps = ctx.cfg.get_int("simulate.n_reps", 1);
  if (n_reps < 1) throw config_error("simulate.n_reps must be at least 1");
  const double jitter = ctx.cfg.get_double("simulate.jitter", 0.0);
  const FieldSimulator sim(p, sites, jitter);
  ensure_out_dir(ctx);
  write_sites_csv(ctx.path("sites.csv"), sites);

  const int width = std::max<int>(4, static_cast<int>(std::to_string(n_reps).size()));
  json files = json::array();
  for (long long r = 0; r < n_reps; ++r) {
    std::ostringstream name;
    name << "replicate_" << std::setw(width) << std::setfill('0') << r + 1 << ".csv";
    const Observations z = sim.draw(1, ctx.seed(), static_cast<std::size_t>(r));
    write_data_csv(ctx.path(name.str()), sites, z, {std::to_string(r + 1)});
    files.push_back(name.str());
  }
  json manifest = {{"command", "simulate"},
                   {"seed", ctx.seed()},
                   {"n_reps", n_reps},
                   {"jitter", jitter},
                   {"parameters", params_to_json(p)},
                   {"sites", {{"file", "sites.csv"}, {"n", sites.size()}}},
                   {"files", files},
                   {"config", ctx.cfg.values()}};
  write_json(ctx.path("manifest.json"), manifest);
  *ctx.out << "simulated " << n_reps << " replicate(s) at " << sites.size() << " sites into " << ctx.out_dir.string()
           << '\n';
  return exit_ok;
}

int cmd_fit(const Context& ctx) {
  const Dataset ds = read_data_files(ctx.data_files);
  const Family family = parse_family(ctx.cfg.get_string("correlation.family", "exponential"));
  const FitOptions opts = fit_options(ctx, family);
  const int m = ds.obs.components();
  const Eigen::MatrixXd cut = cutoffs_for(ctx.cfg, m);
  const PairSet ps = enumerate_pairs(ds.sites, m, cut);
  FitResult fit = maximize_cl(ds.obs, ds.sites, opts, ps);
  const auto n_boot = ctx.cfg.get_int("fit.n_boot", 0);
  if (n_boot > 0) fit.uncertainty = godambe(ds.obs, ds.sites, fit.estimate, cut, static_cast<int>(n_boot), ctx.seed(), opts);

  const ParameterLayout layout(m, family, opts.tie_scales, opts.gaussian);
  json j = fit_to_json(fit, layout);
  j["cutoff"] = ctx.cfg.get_double("fit.cutoff", 0.5);
  j["pairs"] = ps.size();
  j["n_sites"] = ds.sites.size();
  j["n_replicates"] = ds.obs.replicates();
  j["seed"] = ctx.seed();
  j["config"] = ctx.cfg.values();
  ensure_out_dir(ctx);
  write_json(ctx.path("fit.json"), j);
  *ctx.out << describe(fit.estimate) << "\ncl_value=" << fmt(fit.cl_value) << " converged=" << std::boolalpha
           << fit.converged << " iters=" << fit.iters << '\n';
  return exit_ok;
}

int cmd_predict(const Context& ctx) {
  const Dataset ds = read_data_files(ctx.data_files);
  const ParameterVector p = params_for(ctx);
  const auto targets_file = ctx.cfg.find("predict.targets");
  if (!targets_file) throw config_error("predict.targets (a sites CSV) is required");
  const SiteSet targets = read_sites_csv(*targets_file);
  const Cokriger ck(p, ds.sites, ds.obs, replicate_position(ctx.cfg, "predict.replicate", ds));
  ensure_out_dir(ctx);
  auto f = open_csv(ctx.path("predictions.csv"));
  f << "site_id,lon_deg,lat_deg,component,predicted,pred_variance\n";
  for (std::size_t k = 0; k < targets.size(); ++k) {
    for (int i = 0; i < p.components(); ++i) {
      const Prediction pr = ck.predict(targets[k], i);
      f << targets.id(k) << ',' << fmt(targets[k].lon_deg()) << ',' << fmt(targets[k].lat_deg()) << ',' << i + 1
        << ',' << fmt(pr.value) << ',' << fmt(pr.variance) << '\n';
    }
  }
  *ctx.out << "predicted " << targets.size() * static_cast<std::size_t>(p.components()) << " values\n";
  return exit_ok;
}

int cmd_validate(const Context& ctx) {
  const Dataset ds = read_data_files(ctx.data_files);
  const ParameterVector p = params_for(ctx);
  const std::size_t rep = replicate_position(ctx.cfg, "validate.replicate", ds);
  const DropOneScores s = drop_one_scores(p, ds.sites, ds.obs, rep);
  ensure_out_dir(ctx);
  auto f = open_csv(ctx.path("drop_one.csv"));
  f << "site_id,component,observed,predicted,pred_variance\n";
  for (const auto& pt : s.points)
    f << ds.sites.id(pt.site) << ',' << pt.component + 1 << ',' << fmt(pt.observed) << ',' << fmt(pt.predicted) << ','
      << fmt(pt.variance) << '\n';
  write_json(ctx.path("validation.json"), {{"rmspe", s.rmspe},
                                           {"lscore", s.lscore},
                                           {"n_points", s.points.size()},
                                           {"replicate_id", ds.replicate_ids[rep]},
                                           {"parameters", params_to_json(p)}});
  *ctx.out << "rmspe=" << fmt(s.rmspe) << " lscore=" << fmt(s.lscore) << '\n';
  return exit_ok;
}

int cmd_diagnose(const Context& ctx) {
  const Dataset ds = read_data_files(ctx.data_files);
  std::optional<ParameterVector> p;
  if (!ctx.params_file.empty() || ctx.cfg.has("model.sigma2")) p = params_for(ctx);
  const int m = ds.obs.components();
  if (p && p->components() != m) throw config_error("parameters and data disagree in the number of components");
  const auto n_bins = static_cast<int>(ctx.cfg.get_int("diagnose.n_bins", 10));
  const double max_dist = ctx.cfg.get_double("diagnose.max_dist", 1.0);
  const auto n_density = static_cast<int>(ctx.cfg.get_int("diagnose.density_points", 201));
  const double radius = ctx.cfg.get_double("output.radius", 1.0);
  if (!(radius > 0.0)) throw config_error("output.radius must be positive");
  if (n_density < 2) throw config_error("diagnose.density_points must be at least 2");
  ensure_out_dir(ctx);

  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const auto bins = empirical_semivariogram(ds.obs, ds.sites, i, j, n_bins, max_dist);
      auto f = open_csv(ctx.path("semivariogram_" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + ".csv"));
      f << "bin_center,gamma_hat,pair_count,empty" << (p ? ",gamma_model" : "") << '\n';
      for (const auto& b : bins) {
        f << fmt(b.center * radius) << ',' << (b.empty ? std::string() : fmt(b.gamma)) << ',' << b.pairs << ','
          << (b.empty ? 1 : 0);
        if (p) f << ',' << fmt(theoretical_semivariogram(*p, i, j, {b.center}).front().gamma);
        f << '\n';
      }
    }
    std::vector<double> values;
    for (std::size_t r = 0; r < ds.obs.replicates(); ++r)
      for (std::size_t k = 0; k < ds.sites.size(); ++k) values.push_back(ds.obs(r, i, k));
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double span = std::max(*hi_it - *lo_it, 1e-12);
    const double lo = *lo_it - 0.1 * span, hi = *hi_it + 0.1 * span;

    const int n_hist = std::max(5, static_cast<int>(std::sqrt(static_cast<double>(values.size()))));
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_hist), 0);
    const double w = span / n_hist;
    for (double v : values) counts[std::min<std::size_t>(static_cast<std::size_t>((v - *lo_it) / w), counts.size() - 1)]++;
    auto h = open_csv(ctx.path("histogram_" + std::to_string(i + 1) + ".csv"));
    h << "bin_lo,bin_hi,count,density\n";
    for (int b = 0; b < n_hist; ++b)
      h << fmt(*lo_it + b * w) << ',' << fmt(*lo_it + (b + 1) * w) << ',' << counts[b] << ','
        << fmt(static_cast<double>(counts[b]) / (static_cast<double>(values.size()) * w)) << '\n';

    if (p) {
      auto d = open_csv(ctx.path("density_" + std::to_string(i + 1) + ".csv"));
      d << "z,fitted_pdf\n";
      for (const auto& pt : density_overlay(*p, i, linspace(lo, hi, n_density)))
        d << fmt(pt.z) << ',' << fmt(pt.pdf) << '\n';
    }
  }
  *ctx.out << "wrote diagnostics for " << m << " component(s) into " << ctx.out_dir.string() << '\n';
  return exit_ok;
}

// Timing only depends on the pair list, so sites carry independent draws
// from the marginal model instead of a dense-Cholesky simulation.
Observations independent_draws(const ParameterVector& p, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Observations z(1, p.components(), n);
  for (int i = 0; i < p.components(); ++i)
    for (std::size_t k = 0; k < n; ++k)
      z(0, i, k) = p.mu[i] + p.eta[i] * std::abs(normal(gen)) + p.sigma(i) * normal(gen);
  return z;
}

int cmd_bench(const Context& ctx) {
  const ParameterVector p = params_from_config(ctx.cfg);
  const auto ns = ctx.cfg.get_doubles("bench.n", {250, 500, 1000, 2000});
  const auto ds = ctx.cfg.get_doubles("bench.d", {0.25, 0.5, 0.75, 1.0});
  const auto repeats = ctx.cfg.get_int("bench.repeats", 3);
  if (repeats < 1) throw config_error("bench.repeats must be at least 1");
  ensure_out_dir(ctx);
  auto f = open_csv(ctx.path("bench.csv"));
  f << "n,d,pairs,seconds,cl_value\n";
  *ctx.out << std::setw(7) << "n" << std::setw(7) << "d" << std::setw(14) << "pairs" << std::setw(12) << "seconds\n";
  for (double nd : ns) {
    if (nd < 2 || nd != std::floor(nd)) throw config_error("bench.n entries must be integers >= 2");
    const auto n = static_cast<std::size_t>(nd);
    const SiteSet sites = random_sites(n, ctx.seed());
    const Observations z = independent_draws(p, n, ctx.seed());
    for (double d : ds) {
      const PairSet ps = enumerate_pairs(sites, p.components(), uniform_cutoffs(p.components(), d));
      double best = std::numeric_limits<double>::infinity(), value = 0.0;
      for (long long r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        value = cl_objective(z, p, ps, ctx.threads());
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      }
      f << n << ',' << fmt(d) << ',' << ps.size() << ',' << fmt(best) << ',' << fmt(value) << '\n';
      *ctx.out << std::setw(7) << n << std::setw(7) << d << std::setw(14) << ps.size() << std::setw(12)
               << std::setprecision(4) << best << '\n';
    }
  }
  return exit_ok;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

int cmd_experiment(const Context& ctx) {
  const ParameterVector truth = params_from_config(ctx.cfg);
  const auto n_reps = ctx.cfg.get_int("experiment.n_reps", 100);
  if (n_reps < 1) throw config_error("experiment.n_reps must be at least 1");
  const auto grids = ctx.cfg.get_doubles("experiment.grids", {9});
  FitOptions opts = fit_options(ctx, truth.corr.family);
  const int threads = opts.threads;
  opts.threads = 1;  // replicates run in parallel instead
  const int m = truth.components();
  const Eigen::MatrixXd cut = cutoffs_for(ctx.cfg, m);
  const ParameterLayout full(m, truth.corr.family, false, false);
  const Eigen::VectorXd true_vec = natural_vector(truth);
  ensure_out_dir(ctx);

  auto f = open_csv(ctx.path("estimates.csv"));
  f << "grid,n_sites,replicate,converged,cl_value";
  for (const auto& name : full.names()) f << ',' << name;
  f << '\n';
  json summary = json::array();
  for (double g : grids) {
    if (g < 2 || g != std::floor(g)) throw config_error("experiment.grids entries must be integers >= 2");
    const SiteSet sites = lonlat_grid(static_cast<int>(g), static_cast<int>(g), ctx.cfg.get_double("grid.lat_min", -80.0),
                                      ctx.cfg.get_double("grid.lat_max", 80.0));
    const FieldSimulator sim(truth, sites, ctx.cfg.get_double("simulate.jitter", 0.0));
    const PairSet ps = enumerate_pairs(sites, m, cut);
    std::vector<FitResult> fits(static_cast<std::size_t>(n_reps));
    parallel_for(fits.size(), threads, [&](std::size_t r) {
      fits[r] = maximize_cl(sim.draw(1, ctx.seed(), r), sites, opts, ps);
    });
    std::vector<std::vector<double>> columns(full.names().size());
    for (std::size_t r = 0; r < fits.size(); ++r) {
      const Eigen::VectorXd v = natural_vector(fits[r].estimate);
      f << static_cast<int>(g) << ',' << sites.size() << ',' << r + 1 << ',' << (fits[r].converged ? 1 : 0) << ','
        << fmt(fits[r].cl_value);
      for (Eigen::Index k = 0; k < v.size(); ++k) {
        f << ',' << fmt(v[k]);
        columns[static_cast<std::size_t>(k)].push_back(v[k]);
      }
      f << '\n';
    }
    json params;
    for (std::size_t k = 0; k < columns.size(); ++k) {
      const double med = quantile(columns[k], 0.5);
      std::vector<double> dev;
      for (double x : columns[k]) dev.push_back(std::abs(x - med));
      params[full.names()[k]] = {{"truth", true_vec[static_cast<Eigen::Index>(k)]},
                                 {"median", med},
                                 {"q1", quantile(columns[k], 0.25)},
                                 {"q3", quantile(columns[k], 0.75)},
                                 {"mad", quantile(dev, 0.5)}};
    }
    const auto n_conv = std::count_if(fits.begin(), fits.end(), [](const FitResult& x) { return x.converged; });
    summary.push_back({{"grid", static_cast<int>(g)}, {"n_sites", sites.size()}, {"converged", n_conv}, {"parameters", params}});
    *ctx.out << "grid " << static_cast<int>(g) << "x" << static_cast<int>(g) << ": " << n_conv << "/" << n_reps
             << " converged\n";
  }
  write_json(ctx.path("summary.json"), {{"command", "experiment"},
                                        {"seed", ctx.seed()},
                                        {"n_reps", n_reps},
                                        {"truth", params_to_json(truth)},
                                        {"grids", summary},
                                        {"config", ctx.cfg.values()}});
  return exit_ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation, composite-likelihood fitting and validation of multivariate skew-Gaussian fields on the sphere",
               "skewsphere"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".";
  std::optional<long long> seed, threads;
  app.add_option("--config", config_path, "Flat 'section.key = value' configuration file");
  app.add_option("--out", out_dir, "Output directory (created if missing)");
  app.add_option("--seed", seed, "Overrides run.seed");
  app.add_option("--threads", threads, "Overrides run.threads (0 = all cores)");

  Context ctx;
  ctx.out = &out;
  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const Context&);
    bool takes_data;
    bool takes_params;
  };
  const Command commands[] = {
      {"simulate", "Simulate replicates and write CSVs plus a manifest", cmd_simulate, false, false},
      {"fit", "Maximize the pairwise composite likelihood", cmd_fit, true, false},
      {"predict", "Cokrige at the sites listed in predict.targets", cmd_predict, true, true},
      {"validate", "Drop-one cross-validation (RMSPE, LSCORE)", cmd_validate, true, true},
      {"diagnose", "Semivariogram, histogram and density tables", cmd_diagnose, true, true},
      {"bench", "Time one CL evaluation per (n, d) cell", cmd_bench, false, false},
      {"experiment", "Simulate-and-refit study over one or more grids", cmd_experiment, false, false},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    if (c.takes_data) sub->add_option("data", ctx.data_files, "Data CSV file(s)")->required();
    if (c.takes_params) sub->add_option("--params", ctx.params_file, "Parameter or fit-result JSON (default: model.* and correlation.*)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_invalid;
  }

  try {
    ctx.cfg = config_path.empty() ? Config{} : Config::load(config_path);
    ctx.cfg.apply_env(known_keys());
    if (seed) ctx.cfg.set("run.seed", std::to_string(*seed));
    if (threads) ctx.cfg.set("run.threads", std::to_string(*threads));
    ctx.out_dir = out_dir;
    for (const auto& c : commands)
      if (app.got_subcommand(c.name)) return c.fn(ctx);
    return exit_invalid;
  } catch (const io_error& e) {
    err << "skewsphere: " << e.what() << '\n';
    return exit_io;
  } catch (const numerical_error& e) {
    err << "skewsphere: numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const degenerate_pair& e) {
    err << "skewsphere: numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const error& e) {
    err << "skewsphere: invalid input: " << e.what() << '\n';
    return exit_invalid;
  } catch (const std::exception& e) {
    err << "skewsphere: " << e.what() << '\n';
    return exit_numerical;
  }
}

}  // namespace skewsphere::cli
