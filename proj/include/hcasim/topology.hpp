#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hcasim {

struct Position {
  double x = 0.0;  // meters
  double y = 0.0;  // meters
};

// Bounding rectangle of the deployment area. When wrap is set, distances are
// minimum-image on the rectangle torus, which suppresses edge effects.
struct Region {
  double min_x = 0.0;
  double min_y = 0.0;
  double width = 0.0;
  double height = 0.0;
  bool wrap = true;

  bool contains(Position p) const {
    return p.x >= min_x && p.x <= min_x + width && p.y >= min_y &&
           p.y <= min_y + height;
  }
};

enum class SiteRole { CBS, TBS };

struct Site {
  int id = 0;
  SiteRole role = SiteRole::CBS;
  Position pos;
};

using SiteList = std::vector<Site>;

// Number of sites in a hexagonal grid with the given ring count.
constexpr int hex_site_count(int rings) { return 1 + 3 * rings * (rings + 1); }

// Hexagonal lattice of CBS sites centered at the origin. Nearest-neighbor
// spacing equals inter_site_distance. Sites are ordered by ring, then angle.
SiteList build_hex_sites(int rings, double inter_site_distance);

// Bounding rectangle of the hex cell areas: site bounding box padded by one
// cell circumradius (isd / sqrt(3)) on every side.
Region hex_region(int rings, double inter_site_distance, bool wrap = true);

// Poisson point process: count ~ Poisson(expected_count), positions i.i.d.
// uniform over the region. Points closer than min_separation to any site in
// `avoid` are re-drawn. Ids are dense from 0.
SiteList drop_tbs_ppp(double expected_count, const Region& region,
                      std::uint64_t seed, std::span<const Site> avoid = {},
                      double min_separation = 10.0);

std::vector<Position> drop_users(int count, const Region& region,
                                 std::uint64_t seed);

// Euclidean distance; minimum-image on the bounding rectangle when
// region.wrap is set.
double distance(Position a, Position b, const Region& region);

// CSV layout dump/load, schema: site_id,role,x_m,y_m (header row required).
void save_sites_csv(const std::string& path, std::span<const Site> sites);
SiteList load_sites_csv(const std::string& path);

}  // namespace hcasim
