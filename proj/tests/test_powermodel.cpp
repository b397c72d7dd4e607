#include "hcasim/powermodel.hpp"

#include <stdexcept>

#include "doctest.h"

using namespace hcasim;

TEST_CASE("linear power model arithmetic") {
  PowerParams p{130.0, 4.7, 20.0, 75.0, 1};
  CHECK(bs_power_w(p, 0.0, PowerState::ACTIVE) == 130.0);
  CHECK(bs_power_w(p, 0.5, PowerState::ACTIVE) ==
        doctest::Approx(177.0).epsilon(1e-12));
  CHECK(bs_power_w(p, 0.3, PowerState::SLEEPING) == 75.0);
  CHECK(bs_power_w(p, 1.0, PowerState::TRANSITION) == 130.0);

  p.n_trx = 3;
  CHECK(bs_power_w(p, 0.0, PowerState::ACTIVE) == 390.0);

  CHECK_THROWS_AS(bs_power_w(p, -0.1, PowerState::ACTIVE),
                  std::invalid_argument);
  CHECK_THROWS_AS(bs_power_w(p, 1.1, PowerState::ACTIVE),
                  std::invalid_argument);
}

TEST_CASE("active power strictly increasing in load, above sleep power") {
  const PowerParams p{56.0, 2.6, 6.3, 39.0, 1};
  double prev = -1.0;
  for (int i = 0; i <= 10; ++i) {
    const double load = i / 10.0;
    const double w = bs_power_w(p, load, PowerState::ACTIVE);
    CHECK(w > prev);
    CHECK(w > bs_power_w(p, load, PowerState::SLEEPING));
    prev = w;
  }
}

TEST_CASE("energy integration") {
  PowerTrace trace;
  CHECK(integrate_energy_j(trace) == 0.0);

  trace.append(0.0, 10.0, 100.0);
  CHECK(integrate_energy_j(trace) == 1000.0);

  trace.append(10.0, 20.0, 50.0);
  CHECK(integrate_energy_j(trace) == 1500.0);

  SUBCASE("gap rejected") {
    PowerTrace gap;
    gap.append(0.0, 5.0, 10.0);
    gap.segments.push_back({6.0, 7.0, 10.0});
    CHECK_THROWS_AS(integrate_energy_j(gap), std::invalid_argument);
  }
  SUBCASE("overlap rejected") {
    PowerTrace overlap;
    overlap.append(0.0, 5.0, 10.0);
    overlap.segments.push_back({4.0, 7.0, 10.0});
    CHECK_THROWS_AS(integrate_energy_j(overlap), std::invalid_argument);
  }
  SUBCASE("zero-length segment rejected") {
    CHECK_THROWS_AS(trace.append(20.0, 20.0, 5.0), std::invalid_argument);
  }
}

TEST_CASE("energy additivity over concatenation") {
  PowerTrace a;
  a.append(0.0, 3.0, 10.0);
  a.append(3.0, 5.0, 20.0);
  PowerTrace b;
  b.append(5.0, 9.0, 5.0);

  PowerTrace joined = a;
  for (const PowerSegment& s : b.segments)
    joined.segments.push_back(s);
  CHECK(integrate_energy_j(joined) ==
        integrate_energy_j(a) + integrate_energy_j(b));
}

TEST_CASE("hourly average power") {
  PowerTrace trace;
  trace.append(0.0, 1800.0, 100.0);
  trace.append(1800.0, 3600.0, 50.0);
  trace.append(3600.0, 7200.0, 10.0);
  const auto hourly = hourly_avg_power_w(trace, 2);
  REQUIRE(hourly.size() == 2);
  CHECK(hourly[0] == doctest::Approx(75.0));
  CHECK(hourly[1] == doctest::Approx(10.0));
}
