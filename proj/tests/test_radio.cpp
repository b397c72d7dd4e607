#include "hcasim/radio.hpp"

#include <cmath>
#include <complex>

#include "doctest.h"
#include "hcasim/rng.hpp"

using namespace hcasim;

TEST_CASE("log-distance pathloss") {
  LinkParams link;
  link.pathloss_intercept_db = 128.1;
  link.pathloss_slope_db = 37.6;
  CHECK(pathloss_db(link, 1000.0) == doctest::Approx(128.1));
  CHECK(pathloss_db(link, 10000.0) == doctest::Approx(165.7));
  // Distances below the clamp behave like the clamp distance.
  CHECK(pathloss_db(link, 5.0) == pathloss_db(link, 10.0));

  double prev = -1e9;
  for (double d = 10.0; d < 1e5; d *= 1.7) {
    const double pl = pathloss_db(link, d);
    CHECK(pl >= prev);
    prev = pl;
  }
}

TEST_CASE("sinr composition") {
  const double noise = 1e-13;
  CHECK(sinr_linear(2e-10, {}, noise) == doctest::Approx(2e-10 / noise));

  // A zero-load interferer contributes nothing.
  std::vector<InterfererRx> idle{{5e-9, 0.0}};
  CHECK(sinr_linear(2e-10, idle, noise) == doctest::Approx(2e-10 / noise));

  std::vector<InterfererRx> loaded{{5e-11, 0.5}, {2e-11, 1.0}};
  const double s1 = sinr_linear(2e-10, loaded, noise);
  for (auto& i : loaded) i.load = std::min(1.0, i.load * 2.0);
  const double s2 = sinr_linear(2e-10, loaded, noise);
  CHECK(s2 <= s1);
}

TEST_CASE("shannon rate over RBs") {
  CHECK(rate_bps(0.0, 10.0, 180e3) == 0.0);
  CHECK(rate_bps(1.0, 1.0, 180e3) == doctest::Approx(180000.0));
  // Linear in the RB share.
  CHECK(rate_bps(3.0, 8.0, 180e3) == doctest::Approx(8.0 * rate_bps(3.0, 1.0, 180e3)));
  // Spectral-efficiency cap.
  CHECK(rate_bps(1e6, 1.0, 180e3) ==
        doctest::Approx(rate_bps(kSinrCapLinear, 1.0, 180e3)));
  CHECK_THROWS_AS(rate_bps(-1.0, 1.0, 180e3), std::invalid_argument);
}

TEST_CASE("shadow field is a pure function of (user, site)") {
  const ShadowField field(77);
  const double a = field.shadow_db(3, 9, 8.0);
  CHECK(a == field.shadow_db(3, 9, 8.0));
  CHECK(field.shadow_db(3, 10, 8.0) != a);
  CHECK(field.shadow_db(4, 9, 8.0) != a);
  CHECK(field.shadow_db(3, 9, 0.0) == 0.0);

  // Sigma scales the realization linearly.
  CHECK(field.shadow_db(3, 9, 16.0) == doctest::Approx(2.0 * a));
}

TEST_CASE("scatterer scene generation") {
  const ScattererScene scene = gen_scatterer_scene(10, 5, 80, 500.0, 123);
  CHECK(scene.scatterers.size() == 10);
  CHECK(scene.rrhs.size() == 5);
  CHECK(scene.cbs_antennas == 80);

  const ScattererScene again = gen_scatterer_scene(10, 5, 80, 500.0, 123);
  for (std::size_t i = 0; i < scene.scatterers.size(); ++i) {
    CHECK(scene.scatterers[i].x == again.scatterers[i].x);
    CHECK(scene.scatterers[i].y == again.scatterers[i].y);
  }
  for (const Position& p : scene.scatterers)
    CHECK(std::hypot(p.x, p.y) <= 500.0);
  for (const Position& p : scene.rrhs)
    CHECK(std::hypot(p.x, p.y) <= 500.0);

  CHECK_THROWS_AS(gen_scatterer_scene(0, 5, 80, 500.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_scatterer_scene(10, 1, 80, 500.0, 1),
                  std::invalid_argument);
}

// Independent two-path evaluation for a fixed geometry: one scatterer, two
// RRHs, two antennas. The frozen constants below come from evaluating the
// same closed form by hand (direct path plus one bounce).
TEST_CASE("sample_channel matches the two-path oracle") {
  ScattererScene scene;
  scene.cbs_antennas = 2;
  scene.antenna_spacing_wl = 0.5;
  scene.pathloss_exponent = 3.7;
  scene.amp_ref_distance_m = 1000.0;
  scene.region_radius_m = 500.0;
  scene.scatterers = {{0.0, 300.0}};
  scene.rrhs = {{0.0, 400.0}, {-200.0, 0.0}};
  const Position user{300.0, 0.0};
  const double lambda = 100.0;

  const ChannelSample sample = sample_channel(scene, user, lambda);

  // Oracle: direct + single-bounce, amplitudes on d / 1 km.
  const double two_pi = 2.0 * 3.14159265358979323846;
  auto dist = [](Position a, Position b) {
    return std::hypot(a.x - b.x, a.y - b.y);
  };
  auto amp1 = [](double d) { return std::pow(d / 1000.0, -1.85); };
  auto amp2 = [](double d1, double d2) {
    return std::pow((d1 / 1000.0) * (d2 / 1000.0), -1.85);
  };
  const double d_su = dist(scene.scatterers[0], user);
  for (std::size_t i = 0; i < scene.rrhs.size(); ++i) {
    const double d_ru = dist(scene.rrhs[i], user);
    const double d_rs = dist(scene.rrhs[i], scene.scatterers[0]);
    const std::complex<double> h =
        std::polar(amp1(d_ru), -two_pi * d_ru / lambda) +
        std::polar(amp2(d_rs, d_su), -two_pi * (d_rs + d_su) / lambda);
    CHECK(sample.rrh_gains[i] == doctest::Approx(std::norm(h)).epsilon(1e-12));
  }
  CHECK(sample.rrh_gains[0] == doctest::Approx(119732.29836753452).epsilon(1e-9));
  CHECK(sample.rrh_gains[1] == doctest::Approx(1187.3087948937784).epsilon(1e-9));
  CHECK(sample.best_rrh == 0);

  // CBS channel oracle for both antennas.
  const double d_cu = dist({0, 0}, user);
  const double d_cs = dist({0, 0}, scene.scatterers[0]);
  const double sin_u = user.x / d_cu;
  const double sin_s = scene.scatterers[0].x / d_cs;
  for (int m = 0; m < 2; ++m) {
    const std::complex<double> expected =
        std::polar(amp1(d_cu), -two_pi * d_cu / lambda - 3.14159265358979323846 * m * sin_u) +
        std::polar(amp2(d_cs, d_su),
                   -two_pi * (d_cs + d_su) / lambda -
                       3.14159265358979323846 * m * sin_s);
    CHECK(sample.cbs_channel[m].real() ==
          doctest::Approx(expected.real()).epsilon(1e-12));
    CHECK(sample.cbs_channel[m].imag() ==
          doctest::Approx(expected.imag()).epsilon(1e-12));
  }
  CHECK(sample.cbs_channel[0].real() ==
        doctest::Approx(11.36965764696069).epsilon(1e-9));
  CHECK(sample.cbs_channel[0].imag() ==
        doctest::Approx(-45.262043408129067).epsilon(1e-9));
  CHECK(sample.cbs_channel[1].real() ==
        doctest::Approx(-7.1808446847416372).epsilon(1e-9));
}

TEST_CASE("sample_channel purity and shape") {
  const ScattererScene scene = gen_scatterer_scene(15, 5, 80, 500.0, 321);
  const Position user{120.0, -40.0};
  const ChannelSample a = sample_channel(scene, user, 50.0);
  const ChannelSample b = sample_channel(scene, user, 50.0);
  REQUIRE(a.cbs_channel.size() == 80);
  REQUIRE(a.rrh_gains.size() == 5);
  for (std::size_t m = 0; m < a.cbs_channel.size(); ++m) {
    CHECK(a.cbs_channel[m] == b.cbs_channel[m]);
    CHECK(std::isfinite(a.cbs_channel[m].real()));
    CHECK(std::isfinite(a.cbs_channel[m].imag()));
  }
  for (std::size_t i = 0; i < a.rrh_gains.size(); ++i) {
    CHECK(a.rrh_gains[i] == b.rrh_gains[i]);
    CHECK(a.rrh_gains[i] > 0.0);
  }

  // best_rrh is the argmax, ties to the lowest index; a common positive
  // scaling of the gains leaves it unchanged.
  int argmax = 0;
  for (std::size_t i = 1; i < a.rrh_gains.size(); ++i)
    if (a.rrh_gains[i] > a.rrh_gains[argmax]) argmax = static_cast<int>(i);
  CHECK(a.best_rrh == argmax);
  std::vector<double> scaled = a.rrh_gains;
  for (double& g : scaled) g *= 7.25;
  int argmax_scaled = 0;
  for (std::size_t i = 1; i < scaled.size(); ++i)
    if (scaled[i] > scaled[argmax_scaled]) argmax_scaled = static_cast<int>(i);
  CHECK(argmax_scaled == a.best_rrh);
}

TEST_CASE("sample_channel rejects degenerate geometry") {
  ScattererScene scene;
  scene.cbs_antennas = 4;
  scene.scatterers = {{10.0, 10.0}};
  scene.rrhs = {{50.0, 0.0}, {0.0, 50.0}};
  CHECK_THROWS_AS(sample_channel(scene, {10.2, 10.0}, 50.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_channel(scene, {0.0, 0.5}, 50.0),
                  std::invalid_argument);
}
