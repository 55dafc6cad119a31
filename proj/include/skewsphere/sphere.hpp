#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace skewsphere {

/// A point on the unit sphere given by longitude/latitude in degrees.
class Site {
 public:
  Site() : Site(0.0, 0.0) {}

  /// Longitude is wrapped into [-180, 180); latitude must lie in [-90, 90].
  Site(double lon_deg, double lat_deg);

  double lon_deg() const { return lon_; }
  double lat_deg() const { return lat_; }
  const Eigen::Vector3d& unit_vec() const { return unit_; }

 private:
  double lon_;
  double lat_;
  Eigen::Vector3d unit_;
};

/// Great-circle angle between two sites, in radians on [0, pi].
double geodesic(const Site& a, const Site& b);

/// Ordered collection of distinct sites.
class SiteSet {
 public:
  SiteSet() = default;

  /// Throws domain_error if two sites are closer than `min_separation` radians.
  explicit SiteSet(std::vector<Site> sites, std::vector<std::string> ids = {});

  static constexpr double min_separation = 1e-10;

  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  const Site& operator[](std::size_t k) const { return sites_[k]; }
  const std::vector<Site>& sites() const { return sites_; }
  const std::string& id(std::size_t k) const { return ids_[k]; }
  const std::vector<std::string>& ids() const { return ids_; }

  double distance(std::size_t k, std::size_t l) const { return geodesic(sites_[k], sites_[l]); }

  /// Full n x n geodesic distance matrix.
  Eigen::MatrixXd distance_matrix() const;

 private:
  std::vector<Site> sites_;
  std::vector<std::string> ids_;
};

/// Equispaced longitude/latitude grid. Longitudes cover the full circle without
/// repeating the wrap-around meridian; latitudes run from lat_min to lat_max
/// inclusive (a single row sits at the band midpoint). Row-major in latitude.
SiteSet lonlat_grid(int n_lon, int n_lat, double lat_min, double lat_max);

/// n points drawn uniformly on the sphere (deterministic for a given seed).
SiteSet random_sites(std::size_t n, std::uint64_t seed);

/// Radius used when reporting distances in physical units (km).
inline constexpr double earth_radius_km = 6378.0;

}  // namespace skewsphere
