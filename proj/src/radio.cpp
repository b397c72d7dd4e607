#include "hcasim/radio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hcasim/csvio.hpp"
#include "hcasim/rng.hpp"

namespace hcasim {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kMinGeometryDistanceM = 1.0;
}  // namespace

double pathloss_db(const LinkParams& link, double distance_m) {
  const double d = std::max(distance_m, kPathlossMinDistanceM);
  return link.pathloss_intercept_db +
         link.pathloss_slope_db * std::log10(d / 1000.0);
}

double noise_per_rb_w(const LinkParams& link, const RbConfig& rb) {
  return dbm_to_w(link.noise_density_dbm_hz) * rb.rb_bandwidth_hz;
}

double sinr_linear(double serving_rx_w,
                   std::span<const InterfererRx> interferers, double noise_w) {
  double denom = noise_w;
  for (const InterfererRx& i : interferers) denom += i.rx_power_w * i.load;
  return serving_rx_w / denom;
}

double rate_bps(double sinr, double n_rbs, double rb_bandwidth_hz,
                double sinr_cap) {
  if (!(sinr >= 0.0)) throw std::invalid_argument("sinr must be >= 0");
  const double s = std::min(sinr, sinr_cap);
  return n_rbs * rb_bandwidth_hz * std::log2(1.0 + s);
}

double ShadowField::shadow_db(std::uint64_t user_id, std::uint64_t site_id,
                              double sigma_db) const {
  std::uint64_t s = derive_seed(seed_, user_id, site_id);
  Rng rng(s);
  return sigma_db * rng.normal();
}

namespace {

double dist(Position a, Position b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

Position draw_in_disc(Rng& rng, double radius) {
  const double r = radius * std::sqrt(rng.uniform01());
  const double phi = kTwoPi * rng.uniform01();
  return {r * std::cos(phi), r * std::sin(phi)};
}

// Uniform in the disc, re-drawn until at least min_sep away from the origin
// and from every point already placed.
Position draw_separated(Rng& rng, double radius, double min_sep,
                        const std::vector<Position>& placed_a,
                        const std::vector<Position>& placed_b) {
  for (;;) {
    const Position p = draw_in_disc(rng, radius);
    if (std::hypot(p.x, p.y) < min_sep) continue;
    bool ok = true;
    for (const Position& q : placed_a)
      if (dist(p, q) < min_sep) { ok = false; break; }
    if (ok)
      for (const Position& q : placed_b)
        if (dist(p, q) < min_sep) { ok = false; break; }
    if (ok) return p;
  }
}

}  // namespace

ScattererScene gen_scatterer_scene(int n_scatterers, int n_rrhs,
                                   int cbs_antennas, double region_radius_m,
                                   std::uint64_t seed,
                                   double pathloss_exponent,
                                   double amp_ref_distance_m,
                                   double min_separation_m) {
  if (n_scatterers < 1) throw std::invalid_argument("need >= 1 scatterer");
  if (n_rrhs < 2) throw std::invalid_argument("need >= 2 RRHs");
  if (cbs_antennas < 1) throw std::invalid_argument("need >= 1 antenna");
  if (min_separation_m < kMinGeometryDistanceM)
    throw std::invalid_argument("min separation below the 1 m geometry floor");
  // Keep the hard-core process feasible: exclusion discs of radius sep/2
  // must stay well below the jamming density of the region disc.
  const int points = n_scatterers + n_rrhs + 1;
  const double half_sep = 0.5 * min_separation_m;
  if (points * half_sep * half_sep >
      0.3 * region_radius_m * region_radius_m)
    throw std::invalid_argument("min separation too large for the disc");

  ScattererScene scene;
  scene.cbs_antennas = cbs_antennas;
  scene.pathloss_exponent = pathloss_exponent;
  scene.amp_ref_distance_m = amp_ref_distance_m;
  scene.region_radius_m = region_radius_m;

  Rng rng(seed);
  for (int s = 0; s < n_scatterers; ++s)
    scene.scatterers.push_back(draw_separated(
        rng, region_radius_m, min_separation_m, scene.scatterers, scene.rrhs));
  for (int i = 0; i < n_rrhs; ++i)
    scene.rrhs.push_back(draw_separated(
        rng, region_radius_m, min_separation_m, scene.scatterers, scene.rrhs));
  return scene;
}

ChannelSample sample_channel(const ScattererScene& scene, Position user_pos,
                             double carrier_wavelength_m) {
  const double d0 = scene.amp_ref_distance_m;
  const double half_gamma = 0.5 * scene.pathloss_exponent;
  const Position cbs{0.0, 0.0};

  auto check = [](double d) {
    if (d < kMinGeometryDistanceM)
      throw std::invalid_argument("degenerate geometry: distance below 1 m");
    return d;
  };
  auto amp1 = [&](double d) { return std::pow(d / d0, -half_gamma); };
  auto amp2 = [&](double d1, double d2) {
    return std::pow((d1 / d0) * (d2 / d0), -half_gamma);
  };

  const double d_cbs_user = check(dist(cbs, user_pos));
  std::vector<double> d_scat_user(scene.scatterers.size());
  for (std::size_t s = 0; s < scene.scatterers.size(); ++s)
    d_scat_user[s] = check(dist(scene.scatterers[s], user_pos));

  const int m_count = scene.cbs_antennas;
  ChannelSample out;
  out.user_pos = user_pos;
  out.cbs_channel.assign(static_cast<std::size_t>(m_count), {0.0, 0.0});

  // Phase advance per antenna index for a source seen under sin(theta),
  // theta measured from broadside of the x-axis array.
  auto steer_step = [&](Position src, double d_src) {
    const double sin_theta = src.x / d_src;
    return -kTwoPi * scene.antenna_spacing_wl * sin_theta;
  };

  // Direct path CBS -> user.
  {
    const double phase0 = -kTwoPi * d_cbs_user / carrier_wavelength_m;
    const double step = steer_step(user_pos, d_cbs_user);
    const double a = amp1(d_cbs_user);
    for (int m = 0; m < m_count; ++m)
      out.cbs_channel[static_cast<std::size_t>(m)] +=
          std::polar(a, phase0 + step * m);
  }
  // Single-bounce paths CBS -> scatterer -> user.
  for (std::size_t s = 0; s < scene.scatterers.size(); ++s) {
    const double d_cs = check(dist(cbs, scene.scatterers[s]));
    const double a = amp2(d_cs, d_scat_user[s]);
    const double phase0 =
        -kTwoPi * (d_cs + d_scat_user[s]) / carrier_wavelength_m;
    const double step = steer_step(scene.scatterers[s], d_cs);
    for (int m = 0; m < m_count; ++m)
      out.cbs_channel[static_cast<std::size_t>(m)] +=
          std::polar(a, phase0 + step * m);
  }

  out.rrh_gains.resize(scene.rrhs.size());
  for (std::size_t i = 0; i < scene.rrhs.size(); ++i) {
    const double d_ru = check(dist(scene.rrhs[i], user_pos));
    std::complex<double> h =
        std::polar(amp1(d_ru), -kTwoPi * d_ru / carrier_wavelength_m);
    for (std::size_t s = 0; s < scene.scatterers.size(); ++s) {
      const double d_rs = check(dist(scene.rrhs[i], scene.scatterers[s]));
      h += std::polar(amp2(d_rs, d_scat_user[s]),
                      -kTwoPi * (d_rs + d_scat_user[s]) / carrier_wavelength_m);
    }
    out.rrh_gains[i] = std::norm(h);
  }

  out.best_rrh = static_cast<int>(std::distance(
      out.rrh_gains.begin(),
      std::max_element(out.rrh_gains.begin(), out.rrh_gains.end())));
  return out;
}

void save_samples_csv(const std::string& path,
                      std::span<const ChannelSample> samples) {
  if (samples.empty()) throw std::invalid_argument("no samples to save");
  CsvWriter w(path);
  std::vector<std::string> header;
  const std::size_t m = samples[0].cbs_channel.size();
  const std::size_t n = samples[0].rrh_gains.size();
  for (std::size_t i = 0; i < m; ++i) {
    header.push_back("re_h" + std::to_string(i));
    header.push_back("im_h" + std::to_string(i));
  }
  for (std::size_t i = 0; i < n; ++i) header.push_back("g_" + std::to_string(i));
  header.push_back("x_m");
  header.push_back("y_m");
  header.push_back("label");
  w.row(header);
  for (const ChannelSample& s : samples) {
    std::vector<std::string> row;
    for (const auto& h : s.cbs_channel) {
      row.push_back(fmt_g9(h.real()));
      row.push_back(fmt_g9(h.imag()));
    }
    for (double g : s.rrh_gains) row.push_back(fmt_g9(g));
    row.push_back(fmt_g9(s.user_pos.x));
    row.push_back(fmt_g9(s.user_pos.y));
    row.push_back(std::to_string(s.best_rrh));
    w.row(row);
  }
}

}  // namespace hcasim
