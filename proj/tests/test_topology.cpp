#include "hcasim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "doctest.h"
#include "hcasim/rng.hpp"

using namespace hcasim;

TEST_CASE("hex grid counts follow 1 + 3r(r+1)") {
  CHECK(build_hex_sites(2, 500.0).size() == 19);  // the default deployment
  CHECK(build_hex_sites(0, 500.0).size() == 1);
  for (int r = 0; r <= 5; ++r)
    CHECK(static_cast<int>(build_hex_sites(r, 500.0).size()) ==
          hex_site_count(r));
}

TEST_CASE("hex grid geometry") {
  const SiteList sites = build_hex_sites(1, 500.0);
  REQUIRE(sites.size() == 7);
  CHECK(sites[0].pos.x == 0.0);
  CHECK(sites[0].pos.y == 0.0);
  for (std::size_t i = 1; i < sites.size(); ++i) {
    const double d = std::hypot(sites[i].pos.x, sites[i].pos.y);
    CHECK(d == doctest::Approx(500.0).epsilon(1e-12));
  }

  // Pairwise nearest-neighbor distance equals the inter-site distance.
  const SiteList grid = build_hex_sites(3, 250.0);
  double min_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = i + 1; j < grid.size(); ++j)
      min_d = std::min(min_d, std::hypot(grid[i].pos.x - grid[j].pos.x,
                                         grid[i].pos.y - grid[j].pos.y));
  CHECK(min_d == doctest::Approx(250.0).epsilon(1e-12));

  CHECK_THROWS_AS(build_hex_sites(2, 0.0), std::invalid_argument);
}

TEST_CASE("ppp drop: determinism, region membership, exclusion") {
  const Region region = hex_region(2, 500.0);
  const SiteList cbs = build_hex_sites(2, 500.0);

  const SiteList a = drop_tbs_ppp(38.0, region, 42, cbs, 10.0);
  const SiteList b = drop_tbs_ppp(38.0, region, 42, cbs, 10.0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].pos.x == b[i].pos.x);
    CHECK(a[i].pos.y == b[i].pos.y);
    CHECK(region.contains(a[i].pos));
    for (const Site& c : cbs)
      CHECK(distance(a[i].pos, c.pos, region) >= 10.0);
  }

  // Near-zero intensity gives an empty drop.
  CHECK(drop_tbs_ppp(1e-4, region, 7).empty());
}

TEST_CASE("ppp drop: empirical mean count near the intensity") {
  const Region region = hex_region(2, 500.0);
  long total = 0;
  const int trials = 10000;
  for (int s = 0; s < trials; ++s)
    total += static_cast<long>(drop_tbs_ppp(38.0, region, 1000 + s).size());
  const double mean = static_cast<double>(total) / trials;
  CHECK(mean > 37.0);
  CHECK(mean < 39.0);
}

TEST_CASE("user drops: count, determinism, empirical center") {
  const Region region = hex_region(2, 500.0);
  CHECK(drop_users(0, region, 1).empty());

  const auto u1 = drop_users(500, region, 9);
  const auto u2 = drop_users(500, region, 9);
  REQUIRE(u1.size() == 500);
  for (std::size_t i = 0; i < u1.size(); ++i) {
    CHECK(u1[i].x == u2[i].x);
    CHECK(u1[i].y == u2[i].y);
    CHECK(region.contains(u1[i]));
  }

  // Law of large numbers: the empirical mean should sit near the region
  // center (the hex region is centered on the origin).
  const auto many = drop_users(10000, region, 3);
  double mx = 0.0, my = 0.0;
  for (const Position& p : many) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(many.size());
  my /= static_cast<double>(many.size());
  CHECK(std::abs(mx) < 0.02 * region.width);
  CHECK(std::abs(my) < 0.02 * region.height);
}

TEST_CASE("distance: euclidean, wrap-around, symmetry") {
  Region flat{0.0, 0.0, 100.0, 100.0, false};
  CHECK(distance({0, 0}, {3, 4}, flat) == doctest::Approx(5.0));
  CHECK(distance({7, 9}, {7, 9}, flat) == 0.0);

  Region torus{0.0, 0.0, 100.0, 100.0, true};
  CHECK(distance({0, 0}, {99, 0}, torus) == doctest::Approx(1.0));
  CHECK(distance({0, 0}, {0, 99}, torus) == doctest::Approx(1.0));
  CHECK(distance({1, 1}, {99, 99}, torus) ==
        doctest::Approx(std::sqrt(8.0)));

  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Position a{100.0 * rng.uniform01(), 100.0 * rng.uniform01()};
    const Position b{100.0 * rng.uniform01(), 100.0 * rng.uniform01()};
    CHECK(distance(a, b, torus) == distance(b, a, torus));
    CHECK(distance(a, b, torus) >= 0.0);
    CHECK(distance(a, b, torus) <= distance(a, b, flat));
  }
}

TEST_CASE("site CSV round trip") {
  SiteList sites = build_hex_sites(1, 500.0);
  const Region region = hex_region(1, 500.0);
  const SiteList tbs = drop_tbs_ppp(5.0, region, 3, sites, 10.0);
  for (const Site& t : tbs)
    sites.push_back({static_cast<int>(sites.size()), SiteRole::TBS, t.pos});

  const std::string path = "topology_roundtrip.csv";
  save_sites_csv(path, sites);
  const SiteList loaded = load_sites_csv(path);
  REQUIRE(loaded.size() == sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    CHECK(loaded[i].id == sites[i].id);
    CHECK(loaded[i].role == sites[i].role);
    // Layout CSVs carry 9 significant digits.
    CHECK(loaded[i].pos.x == doctest::Approx(sites[i].pos.x).epsilon(1e-7));
    CHECK(loaded[i].pos.y == doctest::Approx(sites[i].pos.y).epsilon(1e-7));
  }
  std::remove(path.c_str());
}
