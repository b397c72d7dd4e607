#pragma once

#include <vector>

namespace hcasim {

// Affine load-dependent BS power model: active power grows linearly with the
// fraction of occupied resource blocks; sleeping draws a flat floor.
struct PowerParams {
  double p0_w = 130.0;      // static power while active, per TRX
  double delta_p = 4.7;     // slope applied to the RF output
  double p_max_tx_w = 20.0; // maximum RF output power
  double p_sleep_w = 75.0;
  int n_trx = 1;

  bool valid() const {
    return p0_w > p_sleep_w && p_sleep_w >= 0.0 && delta_p > 0.0 &&
           p_max_tx_w > 0.0 && n_trx >= 1;
  }
};

enum class PowerState { ACTIVE, SLEEPING, TRANSITION };

// load is the fraction of occupied RBs (control + data) in [0, 1].
// TRANSITION is billed at zero-load active power: the BS is powered but
// serves nothing while switching state.
double bs_power_w(const PowerParams& params, double load, PowerState state);

struct PowerSegment {
  double t_start_s = 0.0;
  double t_end_s = 0.0;
  double power_w = 0.0;
};

// Contiguous, non-overlapping segments ordered in time.
struct PowerTrace {
  std::vector<PowerSegment> segments;

  void append(double t_start_s, double t_end_s, double power_w);
};

// Total energy of the trace. Rejects gaps and overlaps.
double integrate_energy_j(const PowerTrace& trace);

// Average power per hour-of-day bucket: energy in the hour / 3600. Segments
// must not straddle hour boundaries.
std::vector<double> hourly_avg_power_w(const PowerTrace& trace, int hours);

}  // namespace hcasim
