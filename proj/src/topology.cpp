#include "hcasim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hcasim/csvio.hpp"
#include "hcasim/rng.hpp"

namespace hcasim {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

Position hex_axial_to_xy(int q, int r, double isd) {
  // Lattice basis a1 = isd*(1,0), a2 = isd*(1/2, sqrt(3)/2).
  return {isd * (q + 0.5 * r), isd * (kSqrt3 / 2.0) * r};
}

}  // namespace

SiteList build_hex_sites(int rings, double inter_site_distance) {
  if (rings < 0) throw std::invalid_argument("rings must be >= 0");
  if (!(inter_site_distance > 0.0))
    throw std::invalid_argument("inter_site_distance must be > 0");

  SiteList sites;
  sites.reserve(static_cast<std::size_t>(hex_site_count(rings)));
  sites.push_back({0, SiteRole::CBS, {0.0, 0.0}});

  // Walk each ring counterclockwise starting from (ring, 0).
  constexpr int dq[6] = {-1, -1, 0, 1, 1, 0};
  constexpr int dr[6] = {1, 0, -1, -1, 0, 1};
  int id = 1;
  for (int ring = 1; ring <= rings; ++ring) {
    int q = ring;
    int r = 0;
    for (int side = 0; side < 6; ++side) {
      for (int step = 0; step < ring; ++step) {
        sites.push_back({id++, SiteRole::CBS,
                         hex_axial_to_xy(q, r, inter_site_distance)});
        q += dq[side];
        r += dr[side];
      }
    }
  }
  return sites;
}

Region hex_region(int rings, double inter_site_distance, bool wrap) {
  const SiteList sites = build_hex_sites(rings, inter_site_distance);
  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  for (const Site& s : sites) {
    min_x = std::min(min_x, s.pos.x);
    max_x = std::max(max_x, s.pos.x);
    min_y = std::min(min_y, s.pos.y);
    max_y = std::max(max_y, s.pos.y);
  }
  const double pad = inter_site_distance / kSqrt3;  // cell circumradius
  Region region;
  region.min_x = min_x - pad;
  region.min_y = min_y - pad;
  region.width = (max_x - min_x) + 2.0 * pad;
  region.height = (max_y - min_y) + 2.0 * pad;
  region.wrap = wrap;
  return region;
}

namespace {

Position draw_uniform(Rng& rng, const Region& region) {
  const double x = region.min_x + region.width * rng.uniform01();
  const double y = region.min_y + region.height * rng.uniform01();
  return {x, y};
}

}  // namespace

SiteList drop_tbs_ppp(double expected_count, const Region& region,
                      std::uint64_t seed, std::span<const Site> avoid,
                      double min_separation) {
  if (!(expected_count > 0.0))
    throw std::invalid_argument("expected_count must be > 0");
  Rng rng(seed);
  const int n = rng.poisson(expected_count);
  SiteList sites;
  sites.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Position p;
    bool ok = false;
    while (!ok) {
      p = draw_uniform(rng, region);
      ok = true;
      for (const Site& a : avoid) {
        if (distance(p, a.pos, region) < min_separation) {
          ok = false;
          break;
        }
      }
    }
    sites.push_back({i, SiteRole::TBS, p});
  }
  return sites;
}

std::vector<Position> drop_users(int count, const Region& region,
                                 std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("count must be >= 0");
  Rng rng(seed);
  std::vector<Position> users;
  users.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) users.push_back(draw_uniform(rng, region));
  return users;
}

double distance(Position a, Position b, const Region& region) {
  double dx = a.x - b.x;
  double dy = a.y - b.y;
  if (region.wrap) {
    dx = std::abs(dx);
    dy = std::abs(dy);
    if (dx > 0.5 * region.width) dx = region.width - dx;
    if (dy > 0.5 * region.height) dy = region.height - dy;
  }
  return std::hypot(dx, dy);
}

void save_sites_csv(const std::string& path, std::span<const Site> sites) {
  CsvWriter w(path);
  w.row({"site_id", "role", "x_m", "y_m"});
  for (const Site& s : sites) {
    w.row({std::to_string(s.id), s.role == SiteRole::CBS ? "CBS" : "TBS",
           fmt_g9(s.pos.x), fmt_g9(s.pos.y)});
  }
}

SiteList load_sites_csv(const std::string& path) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows[0] != std::vector<std::string>{"site_id", "role",
                                                          "x_m", "y_m"})
    throw std::runtime_error("bad site CSV header in " + path);
  SiteList sites;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 4) throw std::runtime_error("bad site CSV row in " + path);
    Site s;
    s.id = std::stoi(r[0]);
    if (r[1] == "CBS")
      s.role = SiteRole::CBS;
    else if (r[1] == "TBS")
      s.role = SiteRole::TBS;
    else
      throw std::runtime_error("unknown site role: " + r[1]);
    s.pos = {std::stod(r[2]), std::stod(r[3])};
    sites.push_back(s);
  }
  return sites;
}

}  // namespace hcasim
