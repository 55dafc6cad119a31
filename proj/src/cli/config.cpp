#include <skewsphere/cli/config.hpp>

#include <skewsphere/error.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace skewsphere::cli {

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw config_error("config key '" + key + "': expected a number, got '" + text + "'");
  return v;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(origin + ":" + std::to_string(lineno) + ": expected 'section.key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.find('.') == std::string::npos || key.front() == '.' || key.back() == '.')
      throw config_error(origin + ":" + std::to_string(lineno) + ": key '" + key + "' is not of the form section.key");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string env_name(const std::string& key) {
  std::string out = "SKEWSPHERE_";
  for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void Config::apply_env(const std::vector<std::string>& keys) {
  std::vector<std::string> all = keys;
  for (const auto& [k, v] : values_) all.push_back(k);
  for (const auto& key : all) {
    if (const char* v = std::getenv(env_name(key).c_str())) values_[key] = trim(v);
  }
}

std::optional<std::string> Config::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return find(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto v = find(key);
  return v ? to_double(key, *v) : fallback;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  const std::string t = trim(*v);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw config_error("config key '" + key + "': expected an integer, got '" + *v + "'");
  return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  std::string t = trim(*v);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw config_error("config key '" + key + "': expected a boolean, got '" + *v + "'");
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  std::vector<double> out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) throw config_error("config key '" + key + "' is empty");
  return out;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "run.seed",          "run.threads",       "output.radius",      "correlation.family",      "model.sigma2",
      "model.eta",         "correlation.scale",       "correlation.rho",          "model.mu",          "sites.file",
      "grid.n_lon",        "grid.n_lat",        "grid.lat_min",       "grid.lat_max",      "simulate.n_reps",
      "simulate.jitter",   "fit.cutoff",        "fit.init",           "fit.max_iters",     "fit.tol",
      "fit.n_starts",      "fit.tie_scales",    "fit.gaussian",       "fit.n_boot",        "predict.targets",
      "predict.replicate", "validate.replicate", "diagnose.n_bins",   "diagnose.max_dist", "diagnose.density_points",
      "bench.n",           "bench.d",           "bench.repeats",           "experiment.n_reps",  "experiment.grids",
  };
  return keys;
}

}  // namespace skewsphere::cli
