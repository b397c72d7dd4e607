#include "hcasim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "hcasim/csvio.hpp"

namespace hcasim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + v + "'");
  }
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

struct Entry {
  std::string key;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::string comment;  // emitted above the key when serializing
};

constexpr double kInf = 1e300;

Entry dbl(const std::string& key, double& (*ref)(ScenarioConfig&), double lo,
          double hi, const std::string& comment = "") {
  return Entry{
      key,
      [ref](const ScenarioConfig& c) {
        return fmt_g9(ref(const_cast<ScenarioConfig&>(c)));
      },
      [key, ref, lo, hi](ScenarioConfig& c, const std::string& v) {
        const double x = parse_double(key, v);
        if (!(x >= lo && x <= hi))
          throw ConfigError("key '" + key + "': value " + v +
                            " out of range [" + fmt_g9(lo) + ", " +
                            fmt_g9(hi) + "]");
        ref(c) = x;
      },
      comment};
}

Entry integer(const std::string& key, int& (*ref)(ScenarioConfig&), long lo,
              long hi, const std::string& comment = "") {
  return Entry{
      key,
      [ref](const ScenarioConfig& c) {
        return std::to_string(ref(const_cast<ScenarioConfig&>(c)));
      },
      [key, ref, lo, hi](ScenarioConfig& c, const std::string& v) {
        const long x = parse_int(key, v);
        if (x < lo || x > hi)
          throw ConfigError("key '" + key + "': value " + v +
                            " out of range [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
        ref(c) = static_cast<int>(x);
      },
      comment};
}

Entry boolean(const std::string& key, bool& (*ref)(ScenarioConfig&),
              const std::string& comment = "") {
  return Entry{
      key,
      [ref](const ScenarioConfig& c) {
        return ref(const_cast<ScenarioConfig&>(c)) ? std::string("true")
                                                   : std::string("false");
      },
      [key, ref](ScenarioConfig& c, const std::string& v) {
        ref(c) = parse_bool(key, v);
      },
      comment};
}

// Each entry names one config key and binds it to one field.
std::vector<Entry> registry() {
  std::vector<Entry> e;

  auto D = [](const std::string& key, double& (*ref)(ScenarioConfig&),
              double lo, double hi, const std::string& comment = "") {
    return dbl(key, ref, lo, hi, comment);
  };

  // topology
  e.push_back(integer("topology.rings",
                      [](ScenarioConfig& c) -> int& { return c.sim.rings; }, 0,
                      8, "hex CBS grid"));
  e.push_back(D("topology.inter_site_distance_m",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.inter_site_distance_m;
                },
                1.0, kInf));
  e.push_back(D("topology.tbs_expected",
                [](ScenarioConfig& c) -> double& { return c.sim.tbs_expected; },
                1e-9, 1e4, "mean of the Poisson TBS count"));
  e.push_back(boolean("topology.wrap", [](ScenarioConfig& c) -> bool& {
    return c.sim.wrap;
  }));
  e.push_back(D("topology.tbs_min_separation_m",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.tbs_min_separation_m;
                },
                0.0, kInf, "TBSs closer than this to a CBS are re-dropped"));

  // radio
  e.push_back(D("radio.macro.pathloss_intercept_db",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.macro_link.pathloss_intercept_db;
                },
                0.0, kInf, "macro link budget (CBS class)"));
  e.push_back(D("radio.macro.pathloss_slope_db",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.macro_link.pathloss_slope_db;
                },
                1e-9, kInf));
  e.push_back(D("radio.macro.shadowing_sigma_db",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.macro_link.shadowing_sigma_db;
                },
                0.0, kInf));
  e.push_back(D("radio.macro.tx_power_dbm",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.macro_link.tx_power_dbm;
                },
                -kInf, kInf));
  e.push_back(D("radio.micro.pathloss_intercept_db",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.micro_link.pathloss_intercept_db;
                },
                0.0, kInf, "micro link budget (TBS class)"));
  e.push_back(D("radio.micro.pathloss_slope_db",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.micro_link.pathloss_slope_db;
                },
                1e-9, kInf));
  e.push_back(D("radio.micro.shadowing_sigma_db",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.micro_link.shadowing_sigma_db;
                },
                0.0, kInf));
  e.push_back(D("radio.micro.tx_power_dbm",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.micro_link.tx_power_dbm;
                },
                -kInf, kInf));
  e.push_back(Entry{
      "radio.noise_density_dbm_hz",
      [](const ScenarioConfig& c) {
        return fmt_g9(c.sim.macro_link.noise_density_dbm_hz);
      },
      [](ScenarioConfig& c, const std::string& v) {
        const double x = parse_double("radio.noise_density_dbm_hz", v);
        c.sim.macro_link.noise_density_dbm_hz = x;
        c.sim.micro_link.noise_density_dbm_hz = x;
      },
      ""});
  e.push_back(Entry{
      "radio.carrier_freq_hz",
      [](const ScenarioConfig& c) {
        return fmt_g9(c.sim.macro_link.carrier_freq_hz);
      },
      [](ScenarioConfig& c, const std::string& v) {
        const double x = parse_double("radio.carrier_freq_hz", v);
        if (!(x > 0)) throw ConfigError("key 'radio.carrier_freq_hz': must be > 0");
        c.sim.macro_link.carrier_freq_hz = x;
        c.sim.micro_link.carrier_freq_hz = x;
      },
      ""});
  e.push_back(integer("radio.total_rbs",
                      [](ScenarioConfig& c) -> int& {
                        return c.sim.rb.total_rbs;
                      },
                      1, 100000));
  e.push_back(D("radio.rb_bandwidth_hz",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.rb.rb_bandwidth_hz;
                },
                1.0, kInf));
  e.push_back(D("radio.control_rb_fraction",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.rb.control_rb_fraction;
                },
                0.0, 1.0, "share of RBs reserved for control signaling"));
  e.push_back(D("radio.sinr_cap_db",
                [](ScenarioConfig& c) -> double& { return c.sinr_cap_db; },
                0.0, 100.0, "spectral-efficiency cap"));

  // power (EARTH-style parameters per BS class)
  e.push_back(D("power.macro.p0_w",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.macro_power.p0_w;
                },
                1e-9, kInf, "macro class (CBS)"));
  e.push_back(D("power.macro.delta_p",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.macro_power.delta_p;
                },
                1e-9, kInf));
  e.push_back(D("power.macro.p_max_tx_w",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.macro_power.p_max_tx_w;
                },
                1e-9, kInf));
  e.push_back(D("power.macro.p_sleep_w",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.macro_power.p_sleep_w;
                },
                0.0, kInf));
  e.push_back(integer("power.macro.n_trx",
                      [](ScenarioConfig& c) -> int& {
                        return c.sim.macro_power.n_trx;
                      },
                      1, 1024));
  e.push_back(D("power.micro.p0_w",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.micro_power.p0_w;
                },
                1e-9, kInf, "micro class (TBS)"));
  e.push_back(D("power.micro.delta_p",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.micro_power.delta_p;
                },
                1e-9, kInf));
  e.push_back(D("power.micro.p_max_tx_w",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.micro_power.p_max_tx_w;
                },
                1e-9, kInf));
  e.push_back(D("power.micro.p_sleep_w",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.micro_power.p_sleep_w;
                },
                0.0, kInf));
  e.push_back(integer("power.micro.n_trx",
                      [](ScenarioConfig& c) -> int& {
                        return c.sim.micro_power.n_trx;
                      },
                      1, 1024));

  // traffic
  e.push_back(D("traffic.base_rate_fps",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.traffic.base_rate_fps;
                },
                0.0, kInf, "flow arrivals per second at multiplier 1"));
  e.push_back(D("traffic.flow_size_bits",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.traffic.flow_size_bits;
                },
                1.0, kInf));
  e.push_back(Entry{
      "traffic.profile",
      [](const ScenarioConfig& c) {
        std::string out;
        for (int h = 0; h < 24; ++h) {
          if (h) out += ',';
          out += fmt_g9(c.sim.traffic.multipliers[static_cast<std::size_t>(h)]);
        }
        return out;
      },
      [](ScenarioConfig& c, const std::string& v) {
        const auto parts = split_list(v);
        if (parts.size() != 24)
          throw ConfigError("key 'traffic.profile': need 24 values, got " +
                            std::to_string(parts.size()));
        for (int h = 0; h < 24; ++h) {
          const double x = parse_double("traffic.profile", parts[h]);
          if (!(x > 0.0 && x <= 1.0))
            throw ConfigError(
                "key 'traffic.profile': multipliers must be in (0, 1]");
          c.sim.traffic.multipliers[static_cast<std::size_t>(h)] = x;
        }
      },
      "synthetic day shape (not measured data): trough 0.1 at 05:00, peak "
      "1.0 at 21:00"});

  // sleep policy
  e.push_back(D("policy.load_threshold_off",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.policy.load_threshold_off;
                },
                0.0, 1.0, "on the data-RB utilization over a check window"));
  e.push_back(D("policy.rate_floor_bps",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.policy.rate_floor_bps;
                },
                0.0, kInf));
  e.push_back(D("policy.check_period_s",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.policy.check_period_s;
                },
                1e-9, kInf));
  e.push_back(D("policy.close_down_delay_s",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.policy.close_down_delay_s;
                },
                0.0, kInf));
  e.push_back(D("policy.set_up_delay_s",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.policy.set_up_delay_s;
                },
                0.0, kInf));

  // cell zooming
  e.push_back(boolean("zoom.enabled", [](ScenarioConfig& c) -> bool& {
    return c.sim.zoom.enabled;
  }));
  e.push_back(D("zoom.max_db",
                [](ScenarioConfig& c) -> double& { return c.sim.zoom.max_db; },
                0.0, 30.0));
  e.push_back(D("zoom.step_db",
                [](ScenarioConfig& c) -> double& { return c.sim.zoom.step_db; },
                1e-9, 30.0));
  e.push_back(D("zoom.high_load",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.zoom.high_load;
                },
                0.0, 1.0));
  e.push_back(D("zoom.low_load",
                [](ScenarioConfig& c) -> double& { return c.sim.zoom.low_load; },
                0.0, 1.0));
  e.push_back(D("zoom.neighbor_radius_m",
                [](ScenarioConfig& c) -> double& {
                  return c.sim.zoom.neighbor_radius_m;
                },
                0.0, kInf));

  // simulation horizon
  e.push_back(Entry{
      "sim.duration_hours",
      [](const ScenarioConfig& c) {
        return std::to_string(
            static_cast<long>(std::llround(c.sim.duration_s / 3600.0)));
      },
      [](ScenarioConfig& c, const std::string& v) {
        const long h = parse_int("sim.duration_hours", v);
        if (h < 1 || h > 24 * 365)
          throw ConfigError("key 'sim.duration_hours': out of range [1, 8760]");
        c.sim.duration_s = static_cast<double>(h) * 3600.0;
      },
      ""});

  // learning experiment
  e.push_back(Entry{
      "learn.scatterer_counts",
      [](const ScenarioConfig& c) {
        std::string out;
        for (std::size_t i = 0; i < c.learn.scatterer_counts.size(); ++i) {
          if (i) out += ',';
          out += std::to_string(c.learn.scatterer_counts[i]);
        }
        return out;
      },
      [](ScenarioConfig& c, const std::string& v) {
        const auto parts = split_list(v);
        std::vector<int> counts;
        for (const auto& part : parts) {
          const long s = parse_int("learn.scatterer_counts", part);
          if (s < 1 || s > 100000)
            throw ConfigError("key 'learn.scatterer_counts': out of range");
          counts.push_back(static_cast<int>(s));
        }
        if (counts.empty())
          throw ConfigError("key 'learn.scatterer_counts': empty list");
        c.learn.scatterer_counts = std::move(counts);
      },
      ""});
  e.push_back(integer("learn.cbs_antennas",
                      [](ScenarioConfig& c) -> int& {
                        return c.learn.cbs_antennas;
                      },
                      1, 4096));
  e.push_back(integer("learn.n_rrh",
                      [](ScenarioConfig& c) -> int& { return c.learn.n_rrhs; },
                      2, 1024));
  e.push_back(D("learn.region_radius_m",
                [](ScenarioConfig& c) -> double& {
                  return c.learn.region_radius_m;
                },
                3.0, kInf));
  e.push_back(D("learn.wavelength_m",
                [](ScenarioConfig& c) -> double& {
                  return c.learn.wavelength_m;
                },
                1e-9, kInf, "scatterer-channel carrier wavelength"));
  e.push_back(D("learn.pathloss_exponent",
                [](ScenarioConfig& c) -> double& {
                  return c.learn.pathloss_exponent;
                },
                1e-9, 20.0));
  e.push_back(D("learn.amp_ref_distance_m",
                [](ScenarioConfig& c) -> double& {
                  return c.learn.amp_ref_distance_m;
                },
                1e-9, kInf,
                "reference distance of the path amplitude law"));
  e.push_back(integer("learn.n_samples",
                      [](ScenarioConfig& c) -> int& { return c.learn.n_samples; },
                      10, 100000000));
  e.push_back(D("learn.train_fraction",
                [](ScenarioConfig& c) -> double& {
                  return c.learn.train_fraction;
                },
                0.01, 0.99));
  e.push_back(D("learn.log_floor",
                [](ScenarioConfig& c) -> double& { return c.learn.log_floor; },
                1e-300, kInf));
  e.push_back(integer("learn.lloyd_levels",
                      [](ScenarioConfig& c) -> int& {
                        return c.learn.lloyd_levels;
                      },
                      2, 65536));
  e.push_back(integer("learn.lloyd_max_iters",
                      [](ScenarioConfig& c) -> int& {
                        return c.learn.lloyd_max_iters;
                      },
                      1, 1000000));
  e.push_back(D("learn.lloyd_tol",
                [](ScenarioConfig& c) -> double& { return c.learn.lloyd_tol; },
                0.0, kInf));
  e.push_back(integer("learn.hidden1",
                      [](ScenarioConfig& c) -> int& { return c.learn.hidden1; },
                      1, 65536));
  e.push_back(integer("learn.hidden2",
                      [](ScenarioConfig& c) -> int& { return c.learn.hidden2; },
                      1, 65536));
  e.push_back(D("learn.learning_rate",
                [](ScenarioConfig& c) -> double& {
                  return c.learn.learning_rate;
                },
                0.0, kInf));
  e.push_back(integer("learn.batch_size",
                      [](ScenarioConfig& c) -> int& {
                        return c.learn.batch_size;
                      },
                      1, 1000000));
  e.push_back(integer("learn.epochs",
                      [](ScenarioConfig& c) -> int& { return c.learn.epochs; },
                      0, 1000000));
  e.push_back(integer("learn.knn_k",
                      [](ScenarioConfig& c) -> int& { return c.learn.knn_k; },
                      1, 1000000));

  // run control
  e.push_back(Entry{
      "run.seeds",
      [](const ScenarioConfig& c) {
        std::string out;
        for (std::size_t i = 0; i < c.seeds.size(); ++i) {
          if (i) out += ',';
          out += std::to_string(c.seeds[i]);
        }
        return out;
      },
      [](ScenarioConfig& c, const std::string& v) {
        const auto parts = split_list(v);
        std::vector<std::uint64_t> seeds;
        for (const auto& part : parts) {
          try {
            std::size_t pos = 0;
            const unsigned long long s = std::stoull(part, &pos);
            if (pos != part.size()) throw std::invalid_argument("trailing");
            seeds.push_back(s);
          } catch (const std::exception&) {
            throw ConfigError("key 'run.seeds': not an integer: '" + part +
                              "'");
          }
        }
        if (seeds.empty()) throw ConfigError("key 'run.seeds': empty list");
        c.seeds = std::move(seeds);
      },
      ""});
  e.push_back(Entry{
      "run.out_dir",
      [](const ScenarioConfig& c) { return c.out_dir; },
      [](ScenarioConfig& c, const std::string& v) {
        if (v.empty()) throw ConfigError("key 'run.out_dir': empty path");
        c.out_dir = v;
      },
      ""});
  e.push_back(boolean("run.record_events", [](ScenarioConfig& c) -> bool& {
    return c.record_events;
  }));

  return e;
}

void apply_derived(ScenarioConfig& c) {
  c.sim.sinr_cap_linear = db_to_linear(c.sinr_cap_db);
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig config;
  const auto entries = registry();
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it =
        std::find_if(entries.begin(), entries.end(),
                     [&](const Entry& e) { return e.key == key; });
    if (it == entries.end())
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" +
                        key + "'");
    try {
      it->set(config, value);
    } catch (const ConfigError& err) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + err.what());
    }
  }
  apply_derived(config);
  validate_config(config);
  return config;
}

ScenarioConfig load_config_file(const std::string& path) {
  if (path.empty()) {
    ScenarioConfig config;
    apply_derived(config);
    validate_config(config);
    return config;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& config) {
  std::string out = "# hcasim scenario configuration\n";
  const auto entries = registry();
  std::string section;
  for (const Entry& e : entries) {
    const std::string sec = e.key.substr(0, e.key.find('.'));
    if (sec != section) {
      section = sec;
      out += "\n# --- " + section + " ---\n";
    }
    if (!e.comment.empty()) out += "# " + e.comment + "\n";
    out += e.key + " = " + e.get(config) + "\n";
  }
  return out;
}

void validate_config(const ScenarioConfig& config) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid config: " + what);
  };
  require(config.sim.macro_power.valid(),
          "power.macro: requires p0_w > p_sleep_w >= 0, delta_p > 0, "
          "p_max_tx_w > 0, n_trx >= 1");
  require(config.sim.micro_power.valid(),
          "power.micro: requires p0_w > p_sleep_w >= 0, delta_p > 0, "
          "p_max_tx_w > 0, n_trx >= 1");
  require(config.sim.zoom.low_load <= config.sim.zoom.high_load,
          "zoom.low_load must not exceed zoom.high_load");
  for (const double m : config.sim.traffic.multipliers)
    require(m > 0.0 && m <= 1.0, "traffic.profile multipliers must be in (0,1]");
  require(config.learn.n_samples >= 10, "learn.n_samples must be >= 10");
  const double train_n =
      std::floor(config.learn.train_fraction * config.learn.n_samples);
  require(train_n >= config.learn.lloyd_levels,
          "train split smaller than learn.lloyd_levels");
  require(train_n >= 1 && train_n < config.learn.n_samples,
          "learn.train_fraction leaves an empty split");
}

std::uint64_t config_checksum(const ScenarioConfig& config) {
  const std::string text = serialize_config(config);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace hcasim
