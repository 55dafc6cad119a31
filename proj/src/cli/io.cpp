#include <skewsphere/cli/io.hpp>

#include <skewsphere/error.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace skewsphere::cli {

using nlohmann::json;

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> lines;
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw io_error(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                     " fields, got " + std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
    t.lines.push_back(lineno);
  }
  if (t.header.empty()) throw io_error("'" + path + "' is empty");
  return t;
}

int column(const CsvTable& t, const std::string& name) {
  const auto it = std::find(t.header.begin(), t.header.end(), name);
  return it == t.header.end() ? -1 : static_cast<int>(it - t.header.begin());
}

int require_column(const CsvTable& t, const std::string& name, const std::string& path) {
  const int c = column(t, name);
  if (c < 0) throw io_error("'" + path + "' has no column '" + name + "'");
  return c;
}

double number(const std::string& text, const std::string& path, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw io_error(path + ":" + std::to_string(line) + ": '" + text + "' is not a number");
  return v;
}

// Collects sites in first-appearance order, checking that repeated ids
// carry the same coordinates.
struct SiteCollector {
  std::vector<std::string> ids;
  std::vector<Site> sites;
  std::unordered_map<std::string, std::size_t> index;

  std::size_t add(const std::string& id, double lon, double lat, const std::string& path, int line) {
    const auto it = index.find(id);
    if (it != index.end()) {
      const Site& s = sites[it->second];
      if (geodesic(s, Site(lon, lat)) > 1e-9)
        throw io_error(path + ":" + std::to_string(line) + ": site '" + id + "' has inconsistent coordinates");
      return it->second;
    }
    index.emplace(id, sites.size());
    ids.push_back(id);
    sites.emplace_back(lon, lat);
    return sites.size() - 1;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Dataset read_data_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const int c_site = require_column(t, "site_id", path);
  const int c_lon = require_column(t, "lon_deg", path);
  const int c_lat = require_column(t, "lat_deg", path);
  const int c_rep = column(t, "replicate_id");
  const bool long_format = column(t, "component") >= 0 && column(t, "value") >= 0;

  SiteCollector sc;
  std::vector<std::string> rep_ids;
  std::unordered_map<std::string, std::size_t> rep_index;
  struct Cell {
    std::size_t rep, site;
    int comp;
    double value;
    int line;
  };
  std::vector<Cell> cells;
  int m = 0;
  std::vector<int> value_columns;
  if (!long_format) {
    for (int c = 0; c < static_cast<int>(t.header.size()); ++c)
      if (c != c_site && c != c_lon && c != c_lat && c != c_rep) value_columns.push_back(c);
    if (value_columns.empty()) throw io_error("'" + path + "' has no value columns");
    m = static_cast<int>(value_columns.size());
  }

  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const int line = t.lines[r];
    const std::string rep_id = c_rep >= 0 ? row[c_rep] : "1";
    auto [it, inserted] = rep_index.emplace(rep_id, rep_ids.size());
    if (inserted) rep_ids.push_back(rep_id);
    std::size_t site = 0;
    try {
      site = sc.add(row[c_site], number(row[c_lon], path, line), number(row[c_lat], path, line), path, line);
    } catch (const domain_error& e) {
      throw io_error(path + ":" + std::to_string(line) + ": " + e.what());
    }
    if (long_format) {
      const double comp = number(row[column(t, "component")], path, line);
      if (comp < 1 || comp != static_cast<int>(comp))
        throw io_error(path + ":" + std::to_string(line) + ": component must be a positive integer");
      m = std::max(m, static_cast<int>(comp));
      cells.push_back({it->second, site, static_cast<int>(comp) - 1, number(row[column(t, "value")], path, line), line});
    } else {
      for (int k = 0; k < m; ++k)
        cells.push_back({it->second, site, k, number(row[value_columns[k]], path, line), line});
    }
  }
  if (cells.empty()) throw io_error("'" + path + "' contains no observations");

  Dataset ds{SiteSet(sc.sites, sc.ids), Observations(rep_ids.size(), m, sc.sites.size()), rep_ids};
  std::vector<char> seen(ds.obs.raw().size(), 0);
  const std::size_t n = sc.sites.size();
  for (const auto& c : cells) {
    const std::size_t off = (c.rep * static_cast<std::size_t>(m) + static_cast<std::size_t>(c.comp)) * n + c.site;
    if (seen[off]) throw io_error(path + ":" + std::to_string(c.line) + ": duplicate observation");
    seen[off] = 1;
    ds.obs(c.rep, c.comp, c.site) = c.value;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw io_error("'" + path + "' is missing observations (every replicate needs every site and component)");
  return ds;
}

Dataset read_data_files(const std::vector<std::string>& paths) {
  if (paths.empty()) throw io_error("no data files given");
  std::vector<Dataset> parts;
  for (const auto& p : paths) parts.push_back(read_data_csv(p));
  if (parts.size() == 1) return std::move(parts.front());
  const Dataset& first = parts.front();
  std::size_t total = 0;
  for (const auto& d : parts) {
    if (d.sites.size() != first.sites.size() || d.obs.components() != first.obs.components())
      throw io_error("data files disagree in sites or components");
    for (std::size_t k = 0; k < d.sites.size(); ++k)
      if (d.sites.id(k) != first.sites.id(k) || geodesic(d.sites[k], first.sites[k]) > 1e-9)
        throw io_error("data files disagree in site order or coordinates");
    total += d.obs.replicates();
  }
  Dataset out{first.sites, Observations(total, first.obs.components(), first.sites.size()), {}};
  std::size_t r0 = 0;
  for (const auto& d : parts) {
    for (std::size_t r = 0; r < d.obs.replicates(); ++r) {
      for (int i = 0; i < d.obs.components(); ++i)
        for (std::size_t k = 0; k < d.sites.size(); ++k) out.obs(r0 + r, i, k) = d.obs(r, i, k);
      out.replicate_ids.push_back(d.replicate_ids[r]);
    }
    r0 += d.obs.replicates();
  }
  return out;
}

void write_data_csv(const std::string& path, const SiteSet& sites, const Observations& obs,
                    const std::vector<std::string>& replicate_ids) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << "replicate_id,site_id,lon_deg,lat_deg,component,value\n";
  for (std::size_t r = 0; r < obs.replicates(); ++r)
    for (std::size_t k = 0; k < sites.size(); ++k)
      for (int i = 0; i < obs.components(); ++i)
        out << replicate_ids.at(r) << ',' << sites.id(k) << ',' << fmt(sites[k].lon_deg()) << ','
            << fmt(sites[k].lat_deg()) << ',' << i + 1 << ',' << fmt(obs(r, i, k)) << '\n';
  if (!out) throw io_error("failed writing '" + path + "'");
}

SiteSet read_sites_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const int c_site = require_column(t, "site_id", path);
  const int c_lon = require_column(t, "lon_deg", path);
  const int c_lat = require_column(t, "lat_deg", path);
  std::vector<Site> sites;
  std::vector<std::string> ids;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    try {
      sites.emplace_back(number(t.rows[r][c_lon], path, t.lines[r]), number(t.rows[r][c_lat], path, t.lines[r]));
    } catch (const domain_error& e) {
      throw io_error(path + ":" + std::to_string(t.lines[r]) + ": " + e.what());
    }
    ids.push_back(t.rows[r][c_site]);
  }
  if (sites.empty()) throw io_error("'" + path + "' lists no sites");
  return SiteSet(std::move(sites), std::move(ids));
}

void write_sites_csv(const std::string& path, const SiteSet& sites) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << "site_id,lon_deg,lat_deg\n";
  for (std::size_t k = 0; k < sites.size(); ++k)
    out << sites.id(k) << ',' << fmt(sites[k].lon_deg()) << ',' << fmt(sites[k].lat_deg()) << '\n';
}

json params_to_json(const ParameterVector& p) {
  const int m = p.components();
  json rho = json::array();
  for (int i = 0; i < m; ++i) {
    json row = json::array();
    for (int j = 0; j < m; ++j) row.push_back(p.corr.cross_rho(i, j));
    rho.push_back(row);
  }
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return json{{"family", std::string(family_name(p.corr.family))},
              {"sigma2", vec(p.sigma2)},
              {"eta", vec(p.eta)},
              {"scales", vec(p.corr.scales)},
              {"cross_rho", rho},
              {"mu", vec(p.mu)}};
}

ParameterVector params_from_json(const json& j) {
  try {
    auto vec = [&](const char* key) {
      const auto v = j.at(key).get<std::vector<double>>();
      return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    ParameterVector p;
    p.sigma2 = vec("sigma2");
    p.eta = vec("eta");
    p.mu = vec("mu");
    p.corr.family = parse_family(j.at("family").get<std::string>());
    p.corr.scales = vec("scales");
    const auto rows = j.at("cross_rho").get<std::vector<std::vector<double>>>();
    const auto m = static_cast<Eigen::Index>(rows.size());
    p.corr.cross_rho.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != m) throw config_error("cross_rho must be square");
      for (Eigen::Index k = 0; k < m; ++k) p.corr.cross_rho(i, k) = rows[i][k];
    }
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw config_error(std::string("malformed parameter JSON: ") + e.what());
  }
}

ParameterVector read_params_file(const std::string& path) {
  const json j = read_json(path);
  return params_from_json(j.contains("estimate") ? j.at("estimate") : j);
}

ParameterVector params_from_config(const Config& cfg) {
  const Family family = parse_family(cfg.get_string("correlation.family", "exponential"));
  const auto s2 = cfg.get_doubles("model.sigma2", {1.0, 1.0});
  const int m = static_cast<int>(s2.size());
  auto sized = [&](const std::string& key, std::vector<double> fallback) {
    auto v = cfg.get_doubles(key, std::move(fallback));
    if (static_cast<int>(v.size()) != m)
      throw config_error("config key '" + key + "' needs " + std::to_string(m) + " values");
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), m));
  };
  ParameterVector p;
  p.sigma2 = sized("model.sigma2", s2);
  p.eta = sized("model.eta", std::vector<double>(m, 0.0));
  p.mu = sized("model.mu", std::vector<double>(m, 0.0));
  p.corr.family = family;
  p.corr.scales = sized("correlation.scale", std::vector<double>(m, 0.25));
  const auto rho = cfg.get_doubles("correlation.rho", std::vector<double>(m * (m - 1) / 2, 0.0));
  if (static_cast<int>(rho.size()) != m * (m - 1) / 2)
    throw config_error("config key 'correlation.rho' needs " + std::to_string(m * (m - 1) / 2) + " values");
  p.corr.cross_rho = Eigen::MatrixXd::Identity(m, m);
  std::size_t t = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) p.corr.cross_rho(i, j) = p.corr.cross_rho(j, i) = rho[t++];
  p.validate();
  return p;
}

json fit_to_json(const FitResult& fit, const ParameterLayout& layout) {
  json j;
  j["estimate"] = params_to_json(fit.estimate);
  const Eigen::VectorXd nat = layout.natural(fit.estimate);
  json named;
  for (std::size_t k = 0; k < layout.names().size(); ++k) named[layout.names()[k]] = nat[static_cast<Eigen::Index>(k)];
  j["parameters"] = named;
  j["cl_value"] = fit.cl_value;
  j["converged"] = fit.converged;
  j["iters"] = fit.iters;
  j["evaluations"] = fit.evaluations;
  j["score_norm"] = fit.score_norm;
  j["std_errors"] = nullptr;
  if (fit.uncertainty) {
    const auto& u = *fit.uncertainty;
    if (u.std_errors) {
      json se;
      for (std::size_t k = 0; k < u.names.size(); ++k) se[u.names[k]] = (*u.std_errors)[static_cast<Eigen::Index>(k)];
      j["std_errors"] = se;
    }
    j["uncertainty"] = {{"n_boot", u.n_boot}, {"singular", u.singular}, {"h_asymmetry", u.h_asymmetry}};
  }
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw io_error("failed writing '" + path + "'");
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw io_error("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace skewsphere::cli
