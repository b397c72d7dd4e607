#include "hcasim/powermodel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hcasim {

double bs_power_w(const PowerParams& params, double load, PowerState state) {
  if (!(load >= 0.0 && load <= 1.0))
    throw std::invalid_argument("load out of range [0,1]: " +
                                std::to_string(load));
  const double n = static_cast<double>(params.n_trx);
  switch (state) {
    case PowerState::ACTIVE:
      return n * (params.p0_w + params.delta_p * load * params.p_max_tx_w);
    case PowerState::SLEEPING:
      return n * params.p_sleep_w;
    case PowerState::TRANSITION:
      return n * params.p0_w;
  }
  throw std::logic_error("unreachable power state");
}

void PowerTrace::append(double t_start_s, double t_end_s, double power_w) {
  if (!(t_end_s > t_start_s))
    throw std::invalid_argument("power segment must have t_end > t_start");
  segments.push_back({t_start_s, t_end_s, power_w});
}

namespace {

void check_contiguous(const PowerTrace& trace) {
  for (std::size_t i = 0; i < trace.segments.size(); ++i) {
    const PowerSegment& s = trace.segments[i];
    if (!(s.t_end_s > s.t_start_s))
      throw std::invalid_argument("malformed power segment");
    if (i > 0 && s.t_start_s != trace.segments[i - 1].t_end_s)
      throw std::invalid_argument("power trace has a gap or overlap at t=" +
                                  std::to_string(s.t_start_s));
  }
}

}  // namespace

double integrate_energy_j(const PowerTrace& trace) {
  check_contiguous(trace);
  double energy = 0.0;
  for (const PowerSegment& s : trace.segments)
    energy += s.power_w * (s.t_end_s - s.t_start_s);
  return energy;
}

std::vector<double> hourly_avg_power_w(const PowerTrace& trace, int hours) {
  check_contiguous(trace);
  std::vector<double> energy(static_cast<std::size_t>(hours), 0.0);
  for (const PowerSegment& s : trace.segments) {
    const int h = static_cast<int>(std::floor(s.t_start_s / 3600.0));
    if (h < 0 || h >= hours || s.t_end_s > (h + 1) * 3600.0 + 1e-9)
      throw std::invalid_argument("segment outside hour buckets");
    energy[static_cast<std::size_t>(h)] += s.power_w * (s.t_end_s - s.t_start_s);
  }
  for (double& e : energy) e /= 3600.0;
  return energy;
}

}  // namespace hcasim
