// Command-line front end: simulate / verify / study.
//
// Exit codes: 0 success, 2 configuration error, 3 simulation error,
// 4 verification failure, 5 study assertion failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sticky1d/config.hpp"
#include "sticky1d/entropy.hpp"
#include "sticky1d/errors.hpp"
#include "sticky1d/experiments.hpp"
#include "sticky1d/flux.hpp"
#include "sticky1d/io.hpp"
#include "sticky1d/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;
constexpr int kExitVerification = 4;
constexpr int kExitStudy = 5;

namespace fs = std::filesystem;
using namespace sticky1d;

Config load_config_file(const std::string& path) {
  return normalize_config(parse_config(read_text_file(path)));
}

std::vector<double> snapshot_plan(const Config& c) {
  std::vector<double> t = c.snapshots;
  t.push_back(c.t_final);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

std::string cdf_filename(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "cdf_%03zu.csv", k);
  return std::string(buf);
}

// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& config_path) {
  Config cfg;
  Kernel kernel = Kernel::zero();
  ParticleState initial;
  try {
    cfg = load_config_file(config_path);
    kernel = make_kernel(cfg.kernel);
    initial = make_initial(cfg);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }

  try {
    const std::vector<double> times = snapshot_plan(cfg);
    const Trajectory tr =
        simulate(initial, kernel, cfg.t_final, times, make_sim_options(cfg));

    fs::create_directories(cfg.output_dir);
    const fs::path out(cfg.output_dir);
    write_text_file(out / "config.json", serialize_config(cfg));
    write_text_file(out / "trajectory.csv", trajectory_to_csv(tr.states()));
    write_text_file(out / "events.json", events_to_json(tr.events()));

    std::vector<std::vector<ShockInfo>> reports;
    std::string index = "k,t,file\n";
    for (std::size_t k = 0; k < times.size(); ++k) {
      const ParticleState st = tr.at(times[k]);
      reports.push_back(shock_report(st));
      write_text_file(out / cdf_filename(k), step_to_csv(empirical_cdf(st)));
      index += std::to_string(k) + "," + to_g17(times[k]) + "," +
               cdf_filename(k) + "\n";
    }
    write_text_file(out / "snapshots.csv", index);
    write_text_file(out / "shocks.csv", shocks_to_csv(times, reports));
    return kExitOk;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSimulation;
  }
}

// ---------------------------------------------------------------------------

int cmd_verify(const std::string& dir) {
  const fs::path in(dir);
  Config cfg;
  Kernel kernel = Kernel::zero();
  ParticleState initial;
  try {
    cfg = load_config_file((in / "config.json").string());
    kernel = make_kernel(cfg.kernel);
    initial = make_initial(cfg);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }

  // Battery construction errors are configuration errors.
  std::vector<TestFunction> chis;
  try {
    for (const WindowConfig& w : cfg.verify.windows)
      chis.push_back(make_doubling_probe(
          w.sigma, w.tau, w.delta, w.epsilon,
          std::abs(w.y) + w.epsilon + 1.0, cfg.t_final, w.s, w.y));
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }

  try {
    // Reload the trajectory artifact and re-check every state invariant.
    std::vector<ParticleState> loaded;
    try {
      loaded =
          trajectory_from_csv(read_text_file((in / "trajectory.csv").string()));
    } catch (const Error& e) {
      std::fprintf(stderr, "verify: %s\n", e.what());
      return kExitVerification;
    }

    // The run is deterministic, so the committed states must match a re-run
    // exactly (%.17g round-trips doubles).
    const Trajectory tr = simulate(initial, kernel, cfg.t_final,
                                   snapshot_plan(cfg), make_sim_options(cfg));
    const std::vector<ParticleState>& fresh = tr.states();
    bool match = loaded.size() == fresh.size();
    for (std::size_t k = 0; match && k < fresh.size(); ++k) {
      match = loaded[k].t == fresh[k].t && loaded[k].x == fresh[k].x &&
              loaded[k].m == fresh[k].m &&
              loaded[k].cluster == fresh[k].cluster;
    }
    if (!match) {
      std::fprintf(
          stderr,
          "verify: trajectory artifact does not match the configured run\n");
      return kExitVerification;
    }

    // Shock battery at every snapshot.
    for (double t : snapshot_plan(cfg)) {
      for (const ShockInfo& info : shock_report(tr.at(t))) {
        if (info.rh_residual > 1e-8) {
          std::fprintf(stderr,
                       "verify: speed residual %.3e at t=%.6g cluster %d\n",
                       info.rh_residual, t, info.cluster);
          return kExitVerification;
        }
        if (info.min_oleinik_margin < -1e-10) {
          std::fprintf(stderr,
                       "verify: admissibility margin %.3e at t=%.6g "
                       "cluster %d\n",
                       info.min_oleinik_margin, t, info.cluster);
          return kExitVerification;
        }
      }
    }

    // Entropy battery.
    if (cfg.verify.alphas.empty() || chis.empty()) {
      std::fprintf(stderr, "verify: empty battery, vacuous pass\n");
      write_text_file(in / "entropy.csv", entropy_to_csv({}));
      return kExitOk;
    }
    const TrajectoryField field(tr);
    const TrajectoryLadderFlux flux(tr);
    const std::vector<ProbeResult> results = kruzkov_battery(
        field, flux, cfg.verify.alphas, chis, cfg.t_final);
    write_text_file(in / "entropy.csv", entropy_to_csv(results));
    for (const ProbeResult& r : results)
      if (!r.pass) {
        std::fprintf(stderr,
                     "verify: entropy probe %d failed (alpha=%.6g, "
                     "window=[%.6g,%.6g], value=%.6e, tolerance=%.6e)\n",
                     r.probe_id, r.alpha, r.sigma, r.tau, r.value,
                     r.tolerance);
        return kExitVerification;
      }
    return kExitOk;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitVerification;
  }
}

// ---------------------------------------------------------------------------

struct Assertion {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

std::string summary_json(const std::string& kind,
                         const std::vector<Assertion>& asserts) {
  bool all = true;
  std::string s = "{\n  \"study\": \"" + kind + "\",\n  \"assertions\": [\n";
  for (std::size_t i = 0; i < asserts.size(); ++i) {
    const Assertion& a = asserts[i];
    all = all && a.pass;
    s += "    {\"name\": \"" + a.name + "\", \"value\": " + to_g17(a.value) +
         ", \"bound\": " + to_g17(a.bound) +
         ", \"pass\": " + (a.pass ? "true" : "false") + "}";
    if (i + 1 < asserts.size()) s += ",";
    s += "\n";
  }
  s += "  ],\n  \"pass\": " + std::string(all ? "true" : "false") + "\n}\n";
  return s;
}

int cmd_study(const std::string& config_path) {
  Config cfg;
  Kernel kernel = Kernel::zero();
  try {
    cfg = load_config_file(config_path);
    if (!cfg.study)
      throw ConfigError("config: study subcommand needs a study block");
    kernel = make_kernel(cfg.kernel);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }

  const StudyConfig& st = *cfg.study;
  const SimOptions opt = make_sim_options(cfg);
  std::vector<Assertion> asserts;
  std::string csv;
  try {
    fs::create_directories(cfg.output_dir);
    const fs::path out(cfg.output_dir);

    if (st.kind == "converge") {
      const ConvergenceTable table = meanfield_convergence(
          [&](double x) { return eval_cdf(cfg.initial.cdf, x); }, st.n_values,
          kernel, cfg.t_final, cfg.snapshots, st.fv_cells, opt);
      csv = "n,dist_self,dist_fv\n";
      for (const ConvergenceRow& r : table.rows)
        csv += std::to_string(r.n_particles) + "," + to_g17(r.dist_self) +
               "," + to_g17(r.dist_fv) + "\n";
      write_text_file(out / "study_converge.csv", csv);
      asserts.push_back({"self_distance_trend", table.rows.back().dist_self,
                         table.rows.front().dist_self,
                         table.rows.back().dist_self <=
                             table.rows.front().dist_self + 1e-12});
    } else if (st.kind == "stability") {
      const ParticleState a0 = make_initial(cfg);
      ParticleState b0 = a0;
      for (double& x : b0.x) x += st.perturbation;
      const StabilityReport rep = stability_check(
          a0, b0, kernel, cfg.t_final, cfg.snapshots, opt);
      csv = "t,distance,ratio\n";
      for (std::size_t k = 0; k < rep.times.size(); ++k)
        csv += to_g17(rep.times[k]) + "," + to_g17(rep.distance[k]) + "," +
               to_g17(rep.ratio[k]) + "\n";
      write_text_file(out / "study_stability.csv", csv);
      asserts.push_back(
          {"growth_rate_ceiling", rep.c_hat, rep.c_paper,
           rep.c_hat <= rep.c_paper});
    } else {  // time_lipschitz
      const ParticleState a0 = make_initial(cfg);
      const int n_times = st.n_times;
      std::vector<double> times;
      for (int k = 0; k < n_times; ++k)
        times.push_back(k + 1 == n_times ? cfg.t_final
                                         : cfg.t_final * (k + 1) /
                                               static_cast<double>(n_times));
      const Trajectory tr = simulate(a0, kernel, cfg.t_final, times, opt);
      const TimeLipschitzReport rep = time_lipschitz_check(tr, times);
      csv = "measured,c_bound,pairs\n";
      csv += to_g17(rep.measured) + "," + to_g17(rep.c_bound) + "," +
             std::to_string(rep.pairs) + "\n";
      write_text_file(out / "study_time_lipschitz.csv", csv);
      asserts.push_back(
          {"time_lipschitz_ceiling", rep.measured, rep.c_bound, rep.pass});
    }
  } catch (const ZeroInitialDistance& e) {
    std::fprintf(stderr, "study: %s\n", e.what());
    return kExitStudy;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSimulation;
  }

  bool all = true;
  for (const Assertion& a : asserts) all = all && a.pass;
  try {
    write_text_file(fs::path(cfg.output_dir) / "summary.json",
                    summary_json(st.kind, asserts));
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSimulation;
  }
  if (!all) {
    std::fprintf(stderr, "study: hard assertion failed\n");
    return kExitStudy;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sticky-particle dynamics for the nonlocal aggregation "
               "equation: simulate, verify, study"};
  app.require_subcommand(1);

  std::string sim_config, study_config, verify_dir;
  CLI::App* sim =
      app.add_subcommand("simulate", "Run a particle simulation from a config");
  sim->add_option("-c,--config", sim_config, "JSON config path")->required();
  CLI::App* ver = app.add_subcommand(
      "verify", "Re-check the invariants and entropy battery of a run");
  ver->add_option("-d,--dir", verify_dir, "output directory of a simulate run")
      ->required();
  CLI::App* stu =
      app.add_subcommand("study", "Run a convergence/stability/Lipschitz study");
  stu->add_option("-c,--config", study_config, "JSON config path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (sim->parsed()) return cmd_simulate(sim_config);
  if (ver->parsed()) return cmd_verify(verify_dir);
  if (stu->parsed()) return cmd_study(study_config);
  return kExitConfig;
}
