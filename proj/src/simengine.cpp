#include "hcasim/simengine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "hcasim/csvio.hpp"
#include "hcasim/rng.hpp"

namespace hcasim {

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::HETNET: return "HETNET";
    case Scheme::HCA_NO_SLEEP: return "HCA_NO_SLEEP";
    case Scheme::HCA_SLEEP: return "HCA_SLEEP";
  }
  throw std::logic_error("unreachable scheme");
}

Scheme scheme_from_name(const std::string& name) {
  std::string up;
  for (char c : name) up.push_back(static_cast<char>(std::toupper(c)));
  if (up == "HETNET") return Scheme::HETNET;
  if (up == "HCA_NO_SLEEP") return Scheme::HCA_NO_SLEEP;
  if (up == "HCA_SLEEP") return Scheme::HCA_SLEEP;
  throw std::invalid_argument("unknown scheme: " + name);
}

TrafficProfile make_synthetic_profile() {
  TrafficProfile profile;
  constexpr double kPi = 3.14159265358979323846;
  for (int h = 0; h < 24; ++h) {
    const int since_trough = (h - 5 + 24) % 24;  // trough 05:00, peak 21:00
    double s;
    if (since_trough <= 16) {
      const double x = since_trough / 16.0;
      s = std::sin(kPi * x / 2.0);
    } else {
      const double x = (since_trough - 16) / 8.0;
      s = std::cos(kPi * x / 2.0);
    }
    profile.multipliers[static_cast<std::size_t>(h)] = 0.1 + 0.9 * s * s;
  }
  return profile;
}

double hourly_rate_fps(const TrafficProfile& profile, int hour) {
  if (hour < 0 || hour >= 24) throw std::invalid_argument("hour out of range");
  return profile.base_rate_fps *
         profile.multipliers[static_cast<std::size_t>(hour)];
}

namespace {

enum class BsState { ACTIVE, SLEEPING, TRANSITION_OFF, TRANSITION_ON };

// Event kinds double as the processing priority at equal timestamps: hour
// boundaries settle accounting first, state changes complete before new
// arrivals, departures run last.
enum EventKind : int {
  kHour = 0,
  kState = 1,
  kCheck = 2,
  kArrive = 3,
  kDepart = 4,
};

struct Event {
  double t = 0.0;
  int kind = 0;
  int bs = -1;
  long flow = -1;
  std::uint64_t version = 0;  // departures only
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    if (a.kind != b.kind) return a.kind > b.kind;
    if (a.bs != b.bs) return a.bs > b.bs;
    return a.flow > b.flow;
  }
};

constexpr double kFlowDoneEpsBits = 1e-6;

class Engine {
 public:
  Engine(const ScenarioParams& params, Scheme scheme, std::uint64_t seed,
         const SimOptions& options)
      : p_(params), scheme_(scheme), seed_(seed), opt_(options),
        shadows_(derive_seed(seed, 0x5ad0u)) {
    if (p_.duration_s <= 0.0 ||
        std::fmod(p_.duration_s, 3600.0) != 0.0)
      throw std::invalid_argument("duration must be a positive multiple of 1 h");
    setup_layout();
    validate_feasibility();
    pregenerate_arrivals();
  }

  SimReport run();

 private:
  struct Bs {
    int id = 0;
    SiteRole role = SiteRole::CBS;
    Position pos;
    BsState state = BsState::ACTIVE;
    double zoom_db = 0.0;
    std::vector<long> flows;       // served flow ids, insertion order
    std::vector<long> wake_queue;  // flows waiting for this BS to wake
    // hour accumulators
    double hour_energy_j = 0.0;
    double hour_load_integral = 0.0;
    double hour_sleep_s = 0.0;
    // policy-window accumulator: time with at least one flow
    double window_busy_s = 0.0;
  };

  enum class FlowState { SERVED, WAITING, BLOCKED };

  struct Flow {
    long id = 0;
    double arrival_t = 0.0;
    double size_bits = 0.0;
    double remaining_bits = 0.0;
    Position pos;
    FlowState state = FlowState::BLOCKED;
    int serving = -1;
    double rate_bps = 0.0;
    std::vector<double> rx_w;  // per-RB received power per BS, before zoom
    bool ever_blocked = false;
  };

  struct Arrival {
    double t = 0.0;
    Position pos;
  };

  // --- setup -------------------------------------------------------------

  void setup_layout() {
    if (!p_.fixed_sites.empty()) {
      sites_ = p_.fixed_sites;
      for (std::size_t i = 0; i < sites_.size(); ++i)
        if (sites_[i].id != static_cast<int>(i))
          throw std::invalid_argument("fixed_sites ids must be dense from 0");
      region_ = p_.fixed_region.width > 0.0
                    ? p_.fixed_region
                    : hex_region(p_.rings, p_.inter_site_distance_m, p_.wrap);
    } else {
      sites_ = build_hex_sites(p_.rings, p_.inter_site_distance_m);
      region_ = hex_region(p_.rings, p_.inter_site_distance_m, p_.wrap);
      const SiteList tbs =
          drop_tbs_ppp(p_.tbs_expected, region_, derive_seed(seed_, 0x7b5u),
                       sites_, p_.tbs_min_separation_m);
      for (const Site& t : tbs)
        sites_.push_back({static_cast<int>(sites_.size()), SiteRole::TBS,
                          t.pos});
    }
    bs_.resize(sites_.size());
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      bs_[i].id = sites_[i].id;
      bs_[i].role = sites_[i].role;
      bs_[i].pos = sites_[i].pos;
    }
    occ_.assign(bs_.size(), 0.0);
    zoom_lin_.assign(bs_.size(), 1.0);
    noise_rb_w_ = noise_per_rb_w(p_.macro_link, p_.rb);
    per_rb_corr_db_ = 10.0 * std::log10(static_cast<double>(p_.rb.total_rbs));
  }

  void validate_feasibility() {
    if (scheme_ != Scheme::HETNET) {
      double best_rate = 0.0;
      bool any_tbs = false;
      for (const Bs& b : bs_) {
        if (b.role != SiteRole::TBS) continue;
        any_tbs = true;
        // Interference-free rate for a user at the BS itself.
        best_rate = std::max(
            best_rate, rate_bps(p_.sinr_cap_linear, data_rbs(b),
                                p_.rb.rb_bandwidth_hz, p_.sinr_cap_linear));
      }
      if (!any_tbs)
        throw std::runtime_error("config inconsistency: no TBS in layout");
      if (best_rate < p_.policy.rate_floor_bps)
        throw std::runtime_error(
            "config inconsistency: no TBS can meet rate_floor_bps even "
            "interference-free (best " +
            std::to_string(best_rate) + " bps)");
    }
  }

  void pregenerate_arrivals() {
    if (p_.use_scripted_arrivals) {
      for (const auto& a : p_.scripted_arrivals)
        arrivals_.push_back({a.first, a.second});
      std::sort(arrivals_.begin(), arrivals_.end(),
                [](const Arrival& a, const Arrival& b) { return a.t < b.t; });
      return;
    }
    Rng rng(derive_seed(seed_, 0xa331u));
    const int hours = static_cast<int>(p_.duration_s / 3600.0);
    for (int h = 0; h < hours; ++h) {
      const double rate = hourly_rate_fps(p_.traffic, h % 24);
      if (rate <= 0.0) continue;
      double t = h * 3600.0;
      for (;;) {
        t += rng.exponential(rate);
        if (t >= (h + 1) * 3600.0) break;
        const double x = region_.min_x + region_.width * rng.uniform01();
        const double y = region_.min_y + region_.height * rng.uniform01();
        arrivals_.push_back({t, {x, y}});
      }
    }
  }

  // --- per-BS helpers ----------------------------------------------------

  const LinkParams& link_of(const Bs& b) const {
    return b.role == SiteRole::CBS ? p_.macro_link : p_.micro_link;
  }
  const PowerParams& power_of(const Bs& b) const {
    return b.role == SiteRole::CBS ? p_.macro_power : p_.micro_power;
  }

  double data_rbs(const Bs& b) const {
    if (scheme_ != Scheme::HETNET && b.role == SiteRole::CBS)
      return 0.0;  // CBSs carry control signaling only
    return p_.rb.total_rbs * (1.0 - p_.rb.control_rb_fraction);
  }

  // Fraction of occupied RBs (control + data): the load fed to the power
  // model and to occupancy-weighted interference.
  double occupancy(const Bs& b) const {
    const double busy = b.flows.empty() ? 0.0 : 1.0;
    const double data_frac = 1.0 - p_.rb.control_rb_fraction;
    if (scheme_ == Scheme::HETNET)
      return std::min(1.0, p_.rb.control_rb_fraction + data_frac * busy);
    if (b.role == SiteRole::CBS) return p_.rb.control_rb_fraction;
    if (b.state != BsState::ACTIVE) return 0.0;  // control RBs muted on TBSs
    return std::min(1.0, data_frac * busy);
  }

  double bs_power_now(const Bs& b) const {
    switch (b.state) {
      case BsState::ACTIVE:
        return bs_power_w(power_of(b), occ_[static_cast<std::size_t>(b.id)],
                          PowerState::ACTIVE);
      case BsState::SLEEPING:
        return bs_power_w(power_of(b), 0.0, PowerState::SLEEPING);
      case BsState::TRANSITION_OFF:
      case BsState::TRANSITION_ON:
        return bs_power_w(power_of(b), 0.0, PowerState::TRANSITION);
    }
    throw std::logic_error("unreachable BS state");
  }

  double rx_w(const Flow& f, const Bs& b) const {
    return f.rx_w[static_cast<std::size_t>(b.id)] *
           zoom_lin_[static_cast<std::size_t>(b.id)];
  }

  // --- rate recomputation -------------------------------------------------

  void update_flow_rates() {
    for (auto& [id, f] : flows_) {
      if (f.state != FlowState::SERVED) {
        f.rate_bps = 0.0;
        continue;
      }
      const Bs& sb = bs_[static_cast<std::size_t>(f.serving)];
      if (sb.state != BsState::ACTIVE)
        throw std::logic_error("flow served by a non-ACTIVE BS");
      double denom = noise_rb_w_;
      for (const Bs& b : bs_) {
        if (b.id == sb.id) continue;
        const double load = occ_[static_cast<std::size_t>(b.id)];
        if (load > 0.0) denom += rx_w(f, b) * load;
      }
      const double sinr = rx_w(f, sb) / denom;
      const double share =
          data_rbs(sb) / static_cast<double>(sb.flows.size());
      f.rate_bps = rate_bps(sinr, share, p_.rb.rb_bandwidth_hz,
                            p_.sinr_cap_linear);
    }
  }

  // Interference is coupled through per-BS occupancy. Occupancies depend on
  // flow counts only, so the fixed point settles after one sweep; the loop
  // bounds the iteration if a rate-dependent load definition is plugged in.
  void recompute_rates() {
    ++rates_version_;
    for (int sweep = 0; sweep < 20; ++sweep) {
      double diff = 0.0;
      for (const Bs& b : bs_) {
        const double o = occupancy(b);
        diff = std::max(diff,
                        std::abs(o - occ_[static_cast<std::size_t>(b.id)]));
        occ_[static_cast<std::size_t>(b.id)] = o;
      }
      if (sweep > 0 && diff < 1e-3) break;
      update_flow_rates();
    }
    schedule_next_departure();
  }

  void schedule_next_departure() {
    double best_t = std::numeric_limits<double>::infinity();
    long best_flow = -1;
    for (const auto& [id, f] : flows_) {
      if (f.state != FlowState::SERVED || f.rate_bps <= 0.0) continue;
      const double t = now_ + f.remaining_bits / f.rate_bps;
      if (t < best_t) {
        best_t = t;
        best_flow = id;
      }
    }
    if (best_flow >= 0 && best_t <= p_.duration_s)
      pq_.push({best_t, kDepart, -1, best_flow, rates_version_});
  }

  // --- accounting ----------------------------------------------------------

  void settle(double t) {
    const double dt = t - now_;
    if (dt < 0.0) throw std::logic_error("time went backwards");
    if (dt > 0.0) {
      users_integral_ += static_cast<double>(flows_.size()) * dt;
      for (Bs& b : bs_) {
        const double power = bs_power_now(b);
        b.hour_energy_j += power * dt;
        b.hour_load_integral += occ_[static_cast<std::size_t>(b.id)] * dt;
        if (b.state == BsState::SLEEPING) b.hour_sleep_s += dt;
        if (b.state == BsState::ACTIVE && !b.flows.empty())
          b.window_busy_s += dt;
        if (opt_.record_power_traces) append_trace(b, t, power);
      }
      for (auto& [id, f] : flows_) {
        if (f.state != FlowState::SERVED || f.rate_bps <= 0.0) continue;
        const double delta = std::min(f.rate_bps * dt, f.remaining_bits);
        f.remaining_bits -= delta;
        report_.served_bits_integral += delta;
      }
    }
    now_ = t;
  }

  void append_trace(const Bs& b, double t_end, double power) {
    PowerTrace& trace = report_.power_traces[b.id];
    if (!trace.segments.empty() &&
        trace.segments.back().power_w == power &&
        trace.segments.back().t_end_s == now_) {
      trace.segments.back().t_end_s = t_end;  // merge equal-power segments
    } else {
      trace.append(now_, t_end, power);
    }
  }

  void log_event(const char* kind, int bs, long flow) {
    if (opt_.record_events) report_.events.push_back({now_, kind, bs, flow});
  }

  void finalize_hour(int hour) {
    double hour_energy = 0.0;
    for (Bs& b : bs_) {
      hour_energy += b.hour_energy_j;
      report_.bs_hours.push_back({hour, b.id, b.role, b.hour_sleep_s / 3600.0,
                                  b.hour_load_integral / 3600.0,
                                  b.hour_energy_j / 3600.0});
      b.hour_energy_j = 0.0;
      b.hour_load_integral = 0.0;
      b.hour_sleep_s = 0.0;
    }
    report_.daily_energy_j += hour_energy;
    report_.hours.push_back({users_integral_ / 3600.0, hour_energy / 3600.0});
    users_integral_ = 0.0;
  }

  // --- association ----------------------------------------------------------

  double offered_rate(const Flow& f, const Bs& b, int extra_flows) const {
    double denom = noise_rb_w_;
    for (const Bs& other : bs_) {
      if (other.id == b.id) continue;
      const double load = occ_[static_cast<std::size_t>(other.id)];
      if (load > 0.0) denom += rx_w(f, other) * load;
    }
    const double sinr = rx_w(f, b) / denom;
    const double share =
        data_rbs(b) /
        static_cast<double>(b.flows.size() + 1 + extra_flows);
    return rate_bps(sinr, share, p_.rb.rb_bandwidth_hz, p_.sinr_cap_linear);
  }

  void assign_flow(Flow& f, Bs& b) {
    f.serving = b.id;
    f.state = FlowState::SERVED;
    b.flows.push_back(f.id);
    log_event("assoc", b.id, f.id);
  }

  void start_wake(Bs& b) {
    b.state = BsState::TRANSITION_ON;
    pq_.push({now_ + p_.policy.set_up_delay_s, kState, b.id, -1, 0});
    log_event("wake_start", b.id, -1);
  }

  void mark_blocked(Flow& f) {
    f.state = FlowState::BLOCKED;
    f.serving = -1;
    if (!f.ever_blocked) {
      f.ever_blocked = true;
      ++report_.blocked;
    }
    log_event("block", -1, f.id);
  }

  void associate_flow(Flow& f) {
    if (scheme_ == Scheme::HETNET) {
      // Strongest received power among all BSs, lowest id on ties.
      Bs* best = nullptr;
      double best_rx = -1.0;
      for (Bs& b : bs_) {
        const double r = rx_w(f, b);
        if (r > best_rx) {
          best_rx = r;
          best = &b;
        }
      }
      assign_flow(f, *best);
      return;
    }

    // HCA schemes: strongest ACTIVE TBS whose offered rate meets the floor.
    Bs* best = nullptr;
    double best_rx = -1.0;
    for (Bs& b : bs_) {
      if (b.role != SiteRole::TBS || b.state != BsState::ACTIVE) continue;
      const double r = rx_w(f, b);
      if (r > best_rx && offered_rate(f, b, 0) >= p_.policy.rate_floor_bps) {
        best_rx = r;
        best = &b;
      }
    }
    if (best) {
      assign_flow(f, *best);
      return;
    }

    if (scheme_ == Scheme::HCA_NO_SLEEP) {
      // No sleeping in this scheme; fall back to the strongest TBS.
      for (Bs& b : bs_) {
        if (b.role != SiteRole::TBS) continue;
        const double r = rx_w(f, b);
        if (r > best_rx) {
          best_rx = r;
          best = &b;
        }
      }
      if (best) assign_flow(f, *best);
      else mark_blocked(f);
      return;
    }

    // HCA_SLEEP: wake the strongest sleeping TBS and queue the flow.
    Bs* wake = nullptr;
    double wake_rx = -1.0;
    for (Bs& b : bs_) {
      if (b.role != SiteRole::TBS) continue;
      if (b.state != BsState::SLEEPING && b.state != BsState::TRANSITION_ON)
        continue;
      const double r = rx_w(f, b);
      if (r > wake_rx) {
        wake_rx = r;
        wake = &b;
      }
    }
    if (wake) {
      if (wake->state == BsState::SLEEPING) start_wake(*wake);
      wake->wake_queue.push_back(f.id);
      f.state = FlowState::WAITING;
      f.serving = -1;
      log_event("queue", wake->id, f.id);
    } else {
      mark_blocked(f);
    }
  }

  // --- sleeping and zooming --------------------------------------------------

  // Close-down guard and re-dispatch plan: every flow on b must fit on some
  // other ACTIVE TBS at rate_floor or better, accounting for the flows this
  // plan already moves. All-or-nothing.
  bool try_close(Bs& b) {
    std::vector<long> orphan_ids = b.flows;
    std::sort(orphan_ids.begin(), orphan_ids.end());
    std::vector<int> extra(bs_.size(), 0);
    std::vector<std::pair<long, int>> plan;
    for (const long fid : orphan_ids) {
      const Flow& f = flows_.at(fid);
      Bs* best = nullptr;
      double best_rx = -1.0;
      for (Bs& b2 : bs_) {
        if (b2.id == b.id || b2.role != SiteRole::TBS ||
            b2.state != BsState::ACTIVE)
          continue;
        const double r = rx_w(f, b2);
        if (r > best_rx &&
            offered_rate(f, b2, extra[static_cast<std::size_t>(b2.id)]) >=
                p_.policy.rate_floor_bps) {
          best_rx = r;
          best = &b2;
        }
      }
      if (!best) return false;
      plan.emplace_back(fid, best->id);
      ++extra[static_cast<std::size_t>(best->id)];
    }

    b.state = BsState::TRANSITION_OFF;
    b.flows.clear();
    pq_.push({now_ + p_.policy.close_down_delay_s, kState, b.id, -1, 0});
    log_event("off_start", b.id, -1);
    for (const auto& [fid, target] : plan) {
      Flow& f = flows_.at(fid);
      assign_flow(f, bs_[static_cast<std::size_t>(target)]);
    }
    return true;
  }

  void set_zoom(Bs& b, double zoom_db) {
    zoom_db = std::clamp(zoom_db, -p_.zoom.max_db, p_.zoom.max_db);
    if (zoom_db == b.zoom_db) return;
    b.zoom_db = zoom_db;
    zoom_lin_[static_cast<std::size_t>(b.id)] = db_to_linear(zoom_db);
    log_event("zoom", b.id, -1);
  }

  void zoom_step(double window_s) {
    std::vector<double> util(bs_.size(), 0.0);
    std::vector<int> overloaded;
    for (const Bs& b : bs_) {
      if (b.role != SiteRole::TBS || b.state != BsState::ACTIVE) continue;
      util[static_cast<std::size_t>(b.id)] = b.window_busy_s / window_s;
      if (util[static_cast<std::size_t>(b.id)] > p_.zoom.high_load)
        overloaded.push_back(b.id);
    }
    for (Bs& b : bs_) {
      if (b.role != SiteRole::TBS || b.state != BsState::ACTIVE) continue;
      const double u = util[static_cast<std::size_t>(b.id)];
      if (u > p_.zoom.high_load) {
        set_zoom(b, b.zoom_db - p_.zoom.step_db);  // shrink overloaded cell
        continue;
      }
      bool near_overloaded = false;
      if (u < p_.zoom.low_load) {
        for (const int o : overloaded) {
          if (o == b.id) continue;
          if (distance(b.pos, bs_[static_cast<std::size_t>(o)].pos, region_) <=
              p_.zoom.neighbor_radius_m) {
            near_overloaded = true;
            break;
          }
        }
      }
      if (near_overloaded) {
        set_zoom(b, b.zoom_db + p_.zoom.step_db);  // absorb neighbor load
      } else if (b.zoom_db > 0.0) {
        set_zoom(b, std::max(0.0, b.zoom_db - p_.zoom.step_db));
      } else if (b.zoom_db < 0.0) {
        set_zoom(b, std::min(0.0, b.zoom_db + p_.zoom.step_db));
      }
    }
  }

  void policy_check() {
    const double window = now_ - last_check_;
    if (scheme_ == Scheme::HCA_SLEEP && window > 0.0) {
      for (Bs& b : bs_) {
        if (b.role != SiteRole::TBS || b.state != BsState::ACTIVE) continue;
        const double util = b.window_busy_s / window;
        if (util < p_.policy.load_threshold_off) try_close(b);
      }
      // Blocked flows retry once per check.
      std::vector<long> blocked_ids;
      for (const auto& [id, f] : flows_)
        if (f.state == FlowState::BLOCKED) blocked_ids.push_back(id);
      for (const long id : blocked_ids) associate_flow(flows_.at(id));
    }
    if (p_.zoom.enabled && scheme_ != Scheme::HETNET && window > 0.0)
      zoom_step(window);
    for (Bs& b : bs_) b.window_busy_s = 0.0;
    last_check_ = now_;
  }

  // --- event handlers ---------------------------------------------------------

  void handle_arrival(std::size_t arrival_index) {
    const Arrival& a = arrivals_[arrival_index];
    Flow f;
    f.id = static_cast<long>(arrival_index);
    f.arrival_t = a.t;
    f.size_bits = p_.traffic.flow_size_bits;
    f.remaining_bits = f.size_bits;
    f.pos = a.pos;
    f.rx_w.resize(bs_.size());
    for (const Bs& b : bs_) {
      const LinkParams& link = link_of(b);
      const double d = distance(f.pos, b.pos, region_);
      const double shadow = shadows_.shadow_db(
          static_cast<std::uint64_t>(f.id), static_cast<std::uint64_t>(b.id),
          link.shadowing_sigma_db);
      const double rx_dbm = link.tx_power_dbm - per_rb_corr_db_ -
                            pathloss_db(link, d) - shadow;
      f.rx_w[static_cast<std::size_t>(b.id)] = dbm_to_w(rx_dbm);
    }
    auto [it, inserted] = flows_.emplace(f.id, std::move(f));
    ++report_.arrivals;
    log_event("arrive", -1, it->first);
    associate_flow(it->second);
  }

  void handle_departure() {
    std::vector<long> done;
    for (auto& [id, f] : flows_)
      if (f.state == FlowState::SERVED &&
          f.remaining_bits <= kFlowDoneEpsBits)
        done.push_back(id);
    for (const long id : done) {
      Flow& f = flows_.at(id);
      report_.served_bits_by_flow += f.size_bits - f.remaining_bits;
      flow_duration_sum_ += now_ - f.arrival_t;
      ++report_.completed;
      Bs& b = bs_[static_cast<std::size_t>(f.serving)];
      b.flows.erase(std::find(b.flows.begin(), b.flows.end(), id));
      log_event("depart", b.id, id);
      flows_.erase(id);
    }
  }

  void handle_state_change(Bs& b) {
    if (b.state == BsState::TRANSITION_OFF) {
      b.state = BsState::SLEEPING;
      log_event("off_done", b.id, -1);
    } else if (b.state == BsState::TRANSITION_ON) {
      b.state = BsState::ACTIVE;
      log_event("wake_done", b.id, -1);
      std::vector<long> waiters;
      waiters.swap(b.wake_queue);
      for (const long id : waiters) {
        auto it = flows_.find(id);
        if (it != flows_.end() && it->second.state == FlowState::WAITING)
          associate_flow(it->second);
      }
    }
  }

 public:
  // defined after member declarations for readability

 private:
  const ScenarioParams& p_;
  Scheme scheme_;
  std::uint64_t seed_;
  SimOptions opt_;

  SiteList sites_;
  Region region_;
  std::vector<Bs> bs_;
  std::vector<double> occ_;
  std::vector<double> zoom_lin_;
  double noise_rb_w_ = 0.0;
  double per_rb_corr_db_ = 0.0;
  ShadowField shadows_;

  std::vector<Arrival> arrivals_;
  std::map<long, Flow> flows_;
  std::priority_queue<Event, std::vector<Event>, EventLater> pq_;

  double now_ = 0.0;
  double last_check_ = 0.0;
  std::uint64_t rates_version_ = 0;
  double users_integral_ = 0.0;
  double flow_duration_sum_ = 0.0;

  SimReport report_;
};

SimReport Engine::run() {
  report_.scheme = scheme_;
  report_.seed = seed_;

  const int hours = static_cast<int>(p_.duration_s / 3600.0);
  for (int h = 1; h <= hours; ++h)
    pq_.push({h * 3600.0, kHour, h - 1, -1, 0});
  if (scheme_ != Scheme::HETNET) {
    const double period = p_.policy.check_period_s;
    for (double t = period; t < p_.duration_s; t += period)
      pq_.push({t, kCheck, -1, -1, 0});
  }
  for (std::size_t i = 0; i < arrivals_.size(); ++i) {
    if (arrivals_[i].t >= p_.duration_s) break;
    pq_.push({arrivals_[i].t, kArrive, -1, static_cast<long>(i), 0});
  }

  recompute_rates();

  while (!pq_.empty()) {
    const Event ev = pq_.top();
    pq_.pop();
    if (ev.t > p_.duration_s) continue;
    if (ev.kind == kDepart && ev.version != rates_version_) continue;  // stale

    settle(ev.t);
    switch (ev.kind) {
      case kHour:
        finalize_hour(ev.bs);
        continue;  // accounting only; rates unchanged
      case kState:
        handle_state_change(bs_[static_cast<std::size_t>(ev.bs)]);
        break;
      case kCheck:
        policy_check();
        break;
      case kArrive:
        handle_arrival(static_cast<std::size_t>(ev.flow));
        break;
      case kDepart:
        handle_departure();
        break;
      default:
        throw std::logic_error("unknown event kind");
    }
    recompute_rates();
  }

  settle(p_.duration_s);
  report_.mean_flow_duration_s =
      report_.completed > 0
          ? flow_duration_sum_ / static_cast<double>(report_.completed)
          : 0.0;
  // Flows still in flight contribute their partial progress.
  for (const auto& [id, f] : flows_)
    report_.served_bits_by_flow += f.size_bits - f.remaining_bits;
  return report_;
}

}  // namespace

SimReport run_scenario(const ScenarioParams& params, Scheme scheme,
                       std::uint64_t seed, const SimOptions& options) {
  Engine engine(params, scheme, seed, options);
  return engine.run();
}

void write_bs_energy_csv(const std::string& path, const SimReport& report) {
  CsvWriter w(path);
  w.row({"hour", "bs_id", "role", "state_fraction_sleep", "avg_load",
         "avg_power_w"});
  for (const BsHourRow& r : report.bs_hours) {
    w.row({std::to_string(r.hour), std::to_string(r.bs_id),
           r.role == SiteRole::CBS ? "CBS" : "TBS", fmt_g9(r.frac_sleep),
           fmt_g9(r.avg_load), fmt_g9(r.avg_power_w)});
  }
}

void write_events_log(const std::string& path, const SimReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const EventRec& e : report.events)
    out << fmt_g9(e.t) << ',' << e.kind << ',' << e.bs << ',' << e.flow
        << '\n';
}

}  // namespace hcasim
