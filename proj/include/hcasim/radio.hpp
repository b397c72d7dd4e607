#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "hcasim/topology.hpp"

namespace hcasim {

// Log-distance link model, one parameter set per BS class.
struct LinkParams {
  double pathloss_intercept_db = 128.1;  // at 1 km
  double pathloss_slope_db = 37.6;       // per decade
  double shadowing_sigma_db = 8.0;
  double tx_power_dbm = 46.0;
  double noise_density_dbm_hz = -174.0;
  double carrier_freq_hz = 2.0e9;
};

struct RbConfig {
  int total_rbs = 50;
  double rb_bandwidth_hz = 180e3;
  double control_rb_fraction = 0.2;
};

inline double dbm_to_w(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double w_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// 22 dB spectral-efficiency cap applied inside rate_bps.
constexpr double kSinrCapLinear = 158.48931924611142;

// Distances below 10 m are clamped to avoid the near-field singularity.
constexpr double kPathlossMinDistanceM = 10.0;

// intercept + slope * log10(d / 1 km), clamped at kPathlossMinDistanceM.
double pathloss_db(const LinkParams& link, double distance_m);

// Thermal noise over one resource block, in watts.
double noise_per_rb_w(const LinkParams& link, const RbConfig& rb);

struct InterfererRx {
  double rx_power_w = 0.0;  // received power on one RB if transmitting
  double load = 0.0;        // probability a given RB is occupied
};

// serving_rx_w / (noise_w + sum of interferer powers weighted by load).
double sinr_linear(double serving_rx_w, std::span<const InterfererRx> interferers,
                   double noise_w);

// Shannon rate over n_rbs resource blocks (n_rbs may be a fractional share).
double rate_bps(double sinr, double n_rbs, double rb_bandwidth_hz,
                double sinr_cap = kSinrCapLinear);

// Lognormal shadowing drawn once per (user, site) pair: a stateless hash of
// (seed, user, site) feeds a normal transform, so the realization is
// independent of evaluation order.
class ShadowField {
 public:
  ShadowField(std::uint64_t seed) : seed_(seed) {}
  double shadow_db(std::uint64_t user_id, std::uint64_t site_id,
                   double sigma_db) const;

 private:
  std::uint64_t seed_;
};

// Geometric single-bounce scatterer scene for the RRH selection experiment.
// The CBS is a uniform linear array at the origin; scatterers and RRHs are
// dropped uniformly in a disc. amp_ref_distance_m is the reference distance
// of the amplitude law: path amplitudes use d / amp_ref_distance_m, which
// sets the balance between the direct and scattered paths.
struct ScattererScene {
  int cbs_antennas = 80;
  double antenna_spacing_wl = 0.5;
  std::vector<Position> scatterers;
  std::vector<Position> rrhs;
  double pathloss_exponent = 3.7;
  double amp_ref_distance_m = 1000.0;
  double region_radius_m = 500.0;
};

// min_separation_m is the hard-core spacing enforced between all scene
// points (origin, scatterers, RRHs) during generation; points drawn closer
// are re-drawn. It bounds the path-amplitude singularities the same way the
// TBS-vs-CBS exclusion does in the topology module.
ScattererScene gen_scatterer_scene(int n_scatterers, int n_rrhs,
                                   int cbs_antennas, double region_radius_m,
                                   std::uint64_t seed,
                                   double pathloss_exponent = 3.7,
                                   double amp_ref_distance_m = 200.0,
                                   double min_separation_m = 50.0);

struct ChannelSample {
  std::vector<std::complex<double>> cbs_channel;  // M entries
  std::vector<double> rrh_gains;                  // N linear power gains
  Position user_pos;
  int best_rrh = 0;  // argmax of rrh_gains, ties to the lowest index
};

// Pure function of (scene, user position, wavelength). Throws on degenerate
// geometry (any involved pairwise distance < 1 m).
ChannelSample sample_channel(const ScattererScene& scene, Position user_pos,
                             double carrier_wavelength_m);

// Dataset CSV, schema:
// re_h0,im_h0,...,re_h{M-1},im_h{M-1},g_0,...,g_{N-1},x_m,y_m,label
void save_samples_csv(const std::string& path,
                      std::span<const ChannelSample> samples);

}  // namespace hcasim
