#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace skewsphere::cli {

/// Flat `section.key = value` configuration. Lines starting with '#' are
/// comments. Every key can be overridden from the environment as
/// SKEWSPHERE_<SECTION>_<KEY> (upper case, '.' replaced by '_').
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  /// Applies environment overrides for the known keys in `keys` plus every
  /// key already present.
  void apply_env(const std::vector<std::string>& keys);

  std::optional<std::string> find(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

std::string env_name(const std::string& key);

/// Every key the commands read; used for environment lookup and README.
const std::vector<std::string>& known_keys();

}  // namespace skewsphere::cli
