#pragma once

#include <skewsphere/cli/config.hpp>
#include <skewsphere/fit.hpp>
#include <skewsphere/model.hpp>
#include <skewsphere/observations.hpp>
#include <skewsphere/sphere.hpp>

#include <json.hpp>
#include <string>
#include <vector>

namespace skewsphere::cli {

struct Dataset {
  SiteSet sites;
  Observations obs;
  std::vector<std::string> replicate_ids;
};

/// Long format `replicate_id, site_id, lon_deg, lat_deg, component, value`
/// (components numbered from 1), or wide format `[replicate_id,] site_id,
/// lon_deg, lat_deg, <one column per component>`. The format is detected
/// from the header. Sites keep first-appearance order.
Dataset read_data_csv(const std::string& path);

/// Appends the replicates of several files; all must share one site list.
Dataset read_data_files(const std::vector<std::string>& paths);

void write_data_csv(const std::string& path, const SiteSet& sites, const Observations& obs,
                    const std::vector<std::string>& replicate_ids);

SiteSet read_sites_csv(const std::string& path);
void write_sites_csv(const std::string& path, const SiteSet& sites);

nlohmann::json params_to_json(const ParameterVector& p);
ParameterVector params_from_json(const nlohmann::json& j);

/// Reads either a bare parameter object or a fit result containing one
/// under "estimate".
ParameterVector read_params_file(const std::string& path);

/// model.sigma2, model.eta, model.mu, correlation.family,
/// correlation.scale and correlation.rho (upper triangle, row-major).
ParameterVector params_from_config(const Config& cfg);

nlohmann::json fit_to_json(const FitResult& fit, const ParameterLayout& layout);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

}  // namespace skewsphere::cli
