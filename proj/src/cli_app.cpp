#include "hcasim/cli_app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "json.hpp"

#include "hcasim/csvio.hpp"
#include "hcasim/parallel.hpp"
#include "hcasim/rrhlearn.hpp"
#include "hcasim/simengine.hpp"

namespace fs = std::filesystem;

namespace hcasim {

namespace {

constexpr const char* kArtifactVersion = "hcasim 0.1.0";

std::string checksum_hex(std::uint64_t checksum) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(checksum));
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const ScenarioConfig& config,
                    const std::vector<std::uint64_t>& seeds,
                    const nlohmann::json& runs,
                    const std::vector<std::string>& outputs) {
  nlohmann::json manifest;
  manifest["artifact"] = kArtifactVersion;
  manifest["command"] = command;
  manifest["config_checksum"] = checksum_hex(config_checksum(config));
  manifest["seeds"] = seeds;
  manifest["runs"] = runs;
  manifest["outputs"] = outputs;
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  write_text(out_dir / "config_used.cfg", serialize_config(config));
}

}  // namespace

int cmd_sim(const ScenarioConfig& config, const std::vector<Scheme>& schemes,
            const std::vector<std::uint64_t>& seeds, const std::string& out_dir,
            int jobs) {
  try {
    if (schemes.empty() || seeds.empty()) {
      std::cerr << "sim: need at least one scheme and one seed\n";
      return 2;
    }
    fs::create_directories(out_dir);

    struct RunSpec {
      Scheme scheme;
      std::uint64_t seed;
      std::string dir_name;
    };
    std::vector<RunSpec> specs;
    for (const Scheme scheme : schemes)
      for (const std::uint64_t seed : seeds)
        specs.push_back({scheme, seed,
                         "run_" + scheme_name(scheme) + "_" +
                             std::to_string(seed)});

    std::vector<SimReport> reports(specs.size());
    SimOptions options;
    options.record_events = config.record_events;
    parallel_for_index(specs.size(), jobs, [&](std::size_t i) {
      reports[i] =
          run_scenario(config.sim, specs[i].scheme, specs[i].seed, options);
    });

    // Per-run outputs.
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const fs::path run_dir = fs::path(out_dir) / specs[i].dir_name;
      fs::create_directories(run_dir);
      write_bs_energy_csv((run_dir / "bs_energy.csv").string(), reports[i]);
      if (config.record_events)
        write_events_log((run_dir / "events.log").string(), reports[i]);
    }

    // Merged hourly.csv: per (scheme, hour), averaged over seeds.
    const std::size_t n_seeds = seeds.size();
    {
      CsvWriter w((fs::path(out_dir) / "hourly.csv").string());
      w.row({"hour", "scheme", "avg_users", "avg_power_w"});
      for (std::size_t s = 0; s < schemes.size(); ++s) {
        const std::size_t hours = reports[s * n_seeds].hours.size();
        for (std::size_t h = 0; h < hours; ++h) {
          double users = 0.0, power = 0.0;
          for (std::size_t k = 0; k < n_seeds; ++k) {
            const SimReport& r = reports[s * n_seeds + k];
            users += r.hours[h].avg_users;
            power += r.hours[h].avg_power_w;
          }
          w.row({std::to_string(h), scheme_name(schemes[s]),
                 fmt_g9(users / static_cast<double>(n_seeds)),
                 fmt_g9(power / static_cast<double>(n_seeds))});
        }
      }
    }

    // summary.csv: per scheme, averaged over seeds.
    {
      CsvWriter w((fs::path(out_dir) / "summary.csv").string());
      w.row({"scheme", "daily_energy_j", "mean_flow_s", "blocked"});
      for (std::size_t s = 0; s < schemes.size(); ++s) {
        double energy = 0.0, flow_s = 0.0, blocked = 0.0;
        for (std::size_t k = 0; k < n_seeds; ++k) {
          const SimReport& r = reports[s * n_seeds + k];
          energy += r.daily_energy_j;
          flow_s += r.mean_flow_duration_s;
          blocked += static_cast<double>(r.blocked);
        }
        const double inv = 1.0 / static_cast<double>(n_seeds);
        w.row({scheme_name(schemes[s]), fmt_g9(energy * inv),
               fmt_g9(flow_s * inv), fmt_g9(blocked * inv)});
      }
    }

    nlohmann::json runs = nlohmann::json::array();
    for (const RunSpec& spec : specs)
      runs.push_back({{"scheme", scheme_name(spec.scheme)},
                      {"seed", spec.seed},
                      {"dir", spec.dir_name}});
    write_manifest(out_dir, "sim", config, seeds, runs,
                   {"hourly.csv", "summary.csv"});
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "sim failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_learn(const ScenarioConfig& config,
              const std::vector<std::uint64_t>& seeds,
              const std::string& out_dir, int jobs) {
  try {
    if (seeds.empty()) {
      std::cerr << "learn: need at least one seed\n";
      return 2;
    }
    fs::create_directories(out_dir);

    struct Unit {
      std::uint64_t seed;
      int scatterers;
    };
    std::vector<Unit> units;
    for (const std::uint64_t seed : seeds)
      for (const int s : config.learn.scatterer_counts)
        units.push_back({seed, s});

    std::vector<std::vector<MethodResult>> cells(units.size());
    parallel_for_index(units.size(), jobs, [&](std::size_t i) {
      cells[i] = run_methods_for_scene(config.learn, units[i].scatterers,
                                       units[i].seed);
    });

    CsvWriter w((fs::path(out_dir) / "table3.csv").string());
    w.row({"method", "scatterers", "accuracy", "relative_error", "seed"});
    for (std::size_t i = 0; i < units.size(); ++i)
      for (const MethodResult& r : cells[i])
        w.row({r.method, std::to_string(r.scatterers), fmt_g9(r.eval.accuracy),
               fmt_g9(r.eval.relative_error), std::to_string(units[i].seed)});

    // Mean / std summary block over seeds, keyed by (method, scatterers).
    const char* method_order[] = {"RS", "KNN", "NN-CR", "NN-LO"};
    for (const char* method : method_order) {
      for (const int s : config.learn.scatterer_counts) {
        std::vector<double> accs, errs;
        for (std::size_t i = 0; i < units.size(); ++i) {
          if (units[i].scatterers != s) continue;
          for (const MethodResult& r : cells[i]) {
            if (r.method != method) continue;
            accs.push_back(r.eval.accuracy);
            errs.push_back(r.eval.relative_error);
          }
        }
        auto mean = [](const std::vector<double>& v) {
          double sum = 0.0;
          for (double x : v) sum += x;
          return sum / static_cast<double>(v.size());
        };
        auto stddev = [&](const std::vector<double>& v, double m) {
          if (v.size() < 2) return 0.0;
          double acc = 0.0;
          for (double x : v) acc += (x - m) * (x - m);
          return std::sqrt(acc / static_cast<double>(v.size() - 1));
        };
        const double acc_mean = mean(accs), err_mean = mean(errs);
        w.row({method, std::to_string(s), fmt_g9(acc_mean), fmt_g9(err_mean),
               "mean"});
        w.row({method, std::to_string(s), fmt_g9(stddev(accs, acc_mean)),
               fmt_g9(stddev(errs, err_mean)), "std"});
      }
    }

    nlohmann::json runs = nlohmann::json::array();
    for (const std::uint64_t seed : seeds) runs.push_back({{"seed", seed}});
    write_manifest(out_dir, "learn", config, seeds, runs, {"table3.csv"});
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "learn failed: " << e.what() << "\n";
    return 1;
  }
}

namespace {

struct Check {
  std::string name;
  bool ok = false;
  std::string detail;
};

std::vector<Check> run_invariant_checks(const ScenarioConfig& config) {
  std::vector<Check> checks;
  auto add = [&](const std::string& name, bool ok, const std::string& detail) {
    checks.push_back({name, ok, detail});
  };

  // 1-2. Power parameter invariants straight from the loaded config.
  add("power.macro_params", config.sim.macro_power.valid(),
      "p0 > p_sleep >= 0, delta_p > 0, p_max_tx > 0, n_trx >= 1");
  add("power.micro_params", config.sim.micro_power.valid(),
      "p0 > p_sleep >= 0, delta_p > 0, p_max_tx > 0, n_trx >= 1");

  // 3. Power model arithmetic against the closed form.
  {
    const PowerParams& pp = config.sim.macro_power;
    bool ok = true;
    try {
      ok = bs_power_w(pp, 0.0, PowerState::ACTIVE) == pp.n_trx * pp.p0_w &&
           std::abs(bs_power_w(pp, 0.5, PowerState::ACTIVE) -
                    pp.n_trx * (pp.p0_w + pp.delta_p * 0.5 * pp.p_max_tx_w)) <
               1e-12 * pp.p0_w &&
           bs_power_w(pp, 1.0, PowerState::SLEEPING) ==
               pp.n_trx * pp.p_sleep_w;
    } catch (const std::exception&) {
      ok = false;
    }
    add("power.linear_model", ok, "active/sleep arithmetic");
  }

  // 4. DFT Parseval on a deterministic vector.
  {
    Rng rng(7);
    std::vector<std::complex<double>> h(64);
    double power = 0.0;
    for (auto& v : h) {
      v = {rng.normal(), rng.normal()};
      power += std::norm(v);
    }
    const auto mag = dft_magnitude(h);
    double spec = 0.0;
    for (double m : mag) spec += m * m;
    add("dft.parseval", std::abs(spec - power) <= 1e-9 * power,
        "unitary DFT energy conservation");
  }

  // 5. MLP analytic gradient vs central finite differences on a 3-4-2 net.
  {
    Mlp net = mlp_init({3, 4, 2}, 11);
    FeatureMatrix x;
    x.rows = 8;
    x.cols = 3;
    x.data.resize(24);
    Rng rng(12);
    for (double& v : x.data) v = rng.normal();
    std::vector<int> y(8);
    for (auto& label : y) label = rng.uniform_int(2);
    std::vector<std::vector<double>> gw, gb;
    mlp_loss_and_grad(net, x, y, &gw, &gb);
    double max_rel = 0.0;
    const double eps = 1e-5;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      for (std::size_t i = 0; i < net.weights[l].size(); ++i) {
        const double orig = net.weights[l][i];
        net.weights[l][i] = orig + eps;
        const double up = mlp_loss_and_grad(net, x, y, nullptr, nullptr);
        net.weights[l][i] = orig - eps;
        const double down = mlp_loss_and_grad(net, x, y, nullptr, nullptr);
        net.weights[l][i] = orig;
        const double fd = (up - down) / (2.0 * eps);
        const double scale = std::max({std::abs(fd), std::abs(gw[l][i]), 1e-8});
        max_rel = std::max(max_rel, std::abs(fd - gw[l][i]) / scale);
      }
    }
    add("mlp.gradient_check", max_rel < 1e-4,
        "max relative error " + fmt_g9(max_rel));
  }

  // 6. Softmax normalization.
  {
    Mlp net = mlp_init({5, 7, 4}, 21);
    Rng rng(22);
    bool ok = true;
    for (int trial = 0; trial < 16 && ok; ++trial) {
      std::vector<double> x(5);
      for (double& v : x) v = 3.0 * rng.normal();
      const auto p = mlp_forward(net, x);
      double sum = 0.0;
      for (double v : p) {
        sum += v;
        ok = ok && v >= 0.0 && v <= 1.0;
      }
      ok = ok && std::abs(sum - 1.0) <= 1e-12;
    }
    add("mlp.softmax_normalized", ok, "probabilities sum to 1 within 1e-12");
  }

  // 7. Lloyd distortion monotonicity.
  {
    Rng rng(31);
    std::vector<double> samples(20000);
    for (double& v : samples) v = rng.uniform01();
    std::vector<double> trace;
    lloyd_train(samples, 8, 60, 0.0, &trace);
    bool ok = trace.size() >= 2;
    for (std::size_t i = 1; i < trace.size(); ++i)
      ok = ok && trace[i] <= trace[i - 1] + 1e-12;
    add("lloyd.distortion_monotone", ok,
        std::to_string(trace.size()) + " iterations");
  }

  // 8. Quantizer idempotence.
  {
    Rng rng(41);
    std::vector<double> samples(5000);
    for (double& v : samples) v = rng.normal();
    const LloydCodebook cb = lloyd_train(samples, 8, 60, 1e-12);
    std::vector<double> probe(256);
    for (double& v : probe) v = 3.0 * rng.normal();
    const auto q1 = quantize(cb, probe);
    const auto q2 = quantize(cb, q1);
    add("lloyd.quantize_idempotent", q1 == q2, "quantize(quantize(v)) == quantize(v)");
  }

  // 9. Hex lattice counts.
  {
    bool ok = true;
    for (int r = 0; r <= 5; ++r)
      ok = ok && static_cast<int>(build_hex_sites(r, 500.0).size()) ==
                     hex_site_count(r);
    add("topology.hex_count", ok, "1 + 3r(r+1) for r in 0..5");
  }

  // 10. Shannon rate sanity from the configured RB width.
  {
    const double rate = rate_bps(1.0, 1.0, config.sim.rb.rb_bandwidth_hz,
                                 config.sim.sinr_cap_linear);
    add("radio.rate_formula",
        std::abs(rate - config.sim.rb.rb_bandwidth_hz) <=
            1e-9 * config.sim.rb.rb_bandwidth_hz,
        "rate(sinr=1, 1 RB) == rb_bandwidth");
  }

  return checks;
}

}  // namespace

int cmd_validate(const ScenarioConfig& config) {
  const auto checks = run_invariant_checks(config);
  bool all_ok = true;
  for (const Check& c : checks) {
    std::cout << (c.ok ? "PASS" : "FAIL") << "  " << c.name;
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
    all_ok = all_ok && c.ok;
  }
  std::cout << (all_ok ? "all checks passed" : "some checks FAILED") << "\n";
  return all_ok ? 0 : 1;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Flow-level simulator for control/traffic-decoupled RAN "
               "sleeping plus an RRH-selection learning harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string schemes_arg = "hetnet,hca_no_sleep,hca_sleep";
  std::string seeds_arg;
  std::string out_arg;
  int jobs = 1;

  CLI::App* sim = app.add_subcommand("sim", "run the day-long system simulation");
  sim->add_option("--config", config_path, "config file (defaults when omitted)");
  sim->add_option("--schemes", schemes_arg, "comma list: hetnet,hca_no_sleep,hca_sleep");
  sim->add_option("--seeds", seeds_arg, "comma list of seeds (overrides config)");
  sim->add_option("--out", out_arg, "output directory (overrides config)");
  sim->add_option("--jobs", jobs, "worker threads across runs");

  CLI::App* learn = app.add_subcommand("learn", "run the RRH selection experiment");
  learn->add_option("--config", config_path, "config file (defaults when omitted)");
  learn->add_option("--seeds", seeds_arg, "comma list of seeds (overrides config)");
  learn->add_option("--out", out_arg, "output directory (overrides config)");
  learn->add_option("--jobs", jobs, "worker threads across runs");

  CLI::App* validate = app.add_subcommand("validate", "run the fast invariant suite");
  validate->add_option("--config", config_path, "config file (defaults when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  ScenarioConfig config;
  try {
    config = load_config_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  std::vector<std::uint64_t> seeds = config.seeds;
  if (!seeds_arg.empty()) {
    seeds.clear();
    for (const auto& part : [&] {
           std::vector<std::string> parts;
           std::string cur;
           for (char c : seeds_arg) {
             if (c == ',') {
               parts.push_back(cur);
               cur.clear();
             } else {
               cur.push_back(c);
             }
           }
           parts.push_back(cur);
           return parts;
         }()) {
      try {
        seeds.push_back(std::stoull(part));
      } catch (const std::exception&) {
        std::cerr << "bad seed: '" << part << "'\n";
        return 2;
      }
    }
  }
  const std::string out_dir = out_arg.empty() ? config.out_dir : out_arg;

  if (sim->parsed()) {
    std::vector<Scheme> schemes;
    std::string cur;
    for (char c : schemes_arg + ",") {
      if (c == ',') {
        if (!cur.empty()) {
          try {
            schemes.push_back(scheme_from_name(cur));
          } catch (const std::exception& e) {
            std::cerr << e.what() << "\n";
            return 2;
          }
          cur.clear();
        }
      } else {
        cur.push_back(c);
      }
    }
    return cmd_sim(config, schemes, seeds, out_dir, jobs);
  }
  if (learn->parsed()) return cmd_learn(config, seeds, out_dir, jobs);
  return cmd_validate(config);
}

}  // namespace hcasim
