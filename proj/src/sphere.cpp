#include <skewsphere/sphere.hpp>

#include <skewsphere/error.hpp>

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace skewsphere {

namespace {

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

double wrap_longitude(double lon) {
  double w = std::fmod(lon + 180.0, 360.0);
  if (w < 0.0) w += 360.0;
  return w - 180.0;
}

}  // namespace

Site::Site(double lon_deg, double lat_deg) {
  if (!std::isfinite(lon_deg) || !std::isfinite(lat_deg))
    throw domain_error("site coordinates must be finite");
  if (lat_deg < -90.0 || lat_deg > 90.0)
    throw domain_error("latitude " + std::to_string(lat_deg) + " outside [-90, 90]");
  lon_ = wrap_longitude(lon_deg);
  lat_ = lat_deg;
  const double lon = deg2rad(lon_);
  const double lat = deg2rad(lat_);
  unit_ = Eigen::Vector3d(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat));
  unit_.normalize();
}

double geodesic(const Site& a, const Site& b) {
  // atan2 form equals arccos(a.b) but keeps full precision for nearly
  // parallel or antipodal vectors.
  const Eigen::Vector3d& u = a.unit_vec();
  const Eigen::Vector3d& v = b.unit_vec();
  const double dot = std::clamp(u.dot(v), -1.0, 1.0);
  const double cross = u.cross(v).norm();
  return std::clamp(std::atan2(cross, dot), 0.0, std::numbers::pi);
}

SiteSet::SiteSet(std::vector<Site> sites, std::vector<std::string> ids)
    : sites_(std::move(sites)), ids_(std::move(ids)) {
  if (ids_.empty()) {
    ids_.reserve(sites_.size());
    for (std::size_t k = 0; k < sites_.size(); ++k) ids_.push_back(std::to_string(k + 1));
  }
  if (ids_.size() != sites_.size()) throw shape_error("site id count does not match site count");

  for (std::size_t k = 0; k < sites_.size(); ++k) {
    for (std::size_t l = k + 1; l < sites_.size(); ++l) {
      if (geodesic(sites_[k], sites_[l]) < min_separation) {
        throw domain_error("duplicate sites '" + ids_[k] + "' and '" + ids_[l] + "'");
      }
    }
  }
}

Eigen::MatrixXd SiteSet::distance_matrix() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = k + 1; l < n; ++l) d(k, l) = d(l, k) = distance(k, l);
  return d;
}

SiteSet lonlat_grid(int n_lon, int n_lat, double lat_min, double lat_max) {
  if (n_lon < 1 || n_lat < 1) throw domain_error("grid dimensions must be positive");
  if (!(lat_min < lat_max)) throw domain_error("lat_min must be below lat_max");

  std::vector<Site> sites;
  sites.reserve(static_cast<std::size_t>(n_lon) * n_lat);
  for (int b = 0; b < n_lat; ++b) {
    const double lat = n_lat == 1 ? 0.5 * (lat_min + lat_max)
                                  : lat_min + (lat_max - lat_min) * b / (n_lat - 1);
    for (int a = 0; a < n_lon; ++a) {
      sites.emplace_back(-180.0 + 360.0 * a / n_lon, lat);
    }
  }
  return SiteSet(std::move(sites));
}

SiteSet random_sites(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<Site> sites;
  sites.reserve(n);
  while (sites.size() < n) {
    const double z = unif(rng);
    const double lon = 180.0 * unif(rng);
    const double lat = std::asin(z) * 180.0 / std::numbers::pi;
    sites.emplace_back(lon, lat);
  }
  return SiteSet(std::move(sites));
}

}  // namespace skewsphere
