// Command-line driver: single runs, convergence / spatial / efficiency
// studies and the selftest battery for the Klein-Gordon spectral integrator
// library.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kglri/config.hpp"
#include "kglri/harness.hpp"
#include "kglri/selftest.hpp"
#include "kglri/state_io.hpp"
#include "kglri/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitSelftest = 3;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  int threads = 0;
  long seed = -1;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Config file (ini sections)");
  cmd->add_option("--set", args.sets,
                  "Override a config value, section.key=value (repeatable)");
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--threads", args.threads, "Worker threads for study cells");
  cmd->add_option("--seed", args.seed, "Base RNG seed");
  cmd->add_flag("--quiet", args.quiet, "Suppress progress output");
}

kglri::RunConfig load_config(const CommonArgs& args) {
  std::vector<std::string> sets = args.sets;
  if (!args.out_dir.empty()) sets.push_back("output.dir=" + args.out_dir);
  if (args.threads > 0)
    sets.push_back("study.threads=" + std::to_string(args.threads));
  if (args.seed >= 0) sets.push_back("data.seed=" + std::to_string(args.seed));
  if (args.quiet) sets.push_back("output.quiet=true");
  return kglri::parse_config(args.config_path, sets);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

void emit_report(const kglri::RunConfig& cfg,
                 const kglri::ConvergenceReport& report,
                 const std::string& stem) {
  namespace fs = std::filesystem;
  fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  write_text(dir / (stem + ".json"), kglri::report_to_json(report));
  write_text(dir / (stem + ".csv"), kglri::report_to_csv(report));
  if (cfg.write_plot_data)
    for (const auto& [name, contents] : kglri::report_plot_data(report))
      write_text(dir / name, contents);
  if (!cfg.quiet) {
    std::cout << stem << ": wrote " << (dir / (stem + ".json")).string()
              << "\n";
    for (const auto& fit : report.fits)
      std::cout << "  " << fit.method << " fitted slope " << fit.slope_mean
                << " (residual rms " << fit.residual_rms_mean << ")\n";
    for (const auto& t : report.time_to_target)
      if (t.reached)
        std::cout << "  " << t.method << " reached err<="
                  << report.spec.target_err << " in " << t.wall_ns * 1e-9
                  << " s (h=2^-" << t.k << ")\n";
  }
}

int cmd_run(const CommonArgs& args) {
  kglri::RunConfig cfg = load_config(args);
  const kglri::StudySpec& spec = cfg.study;

  kglri::Problem problem = kglri::make_problem(spec);
  kglri::SymbolTable symbols = kglri::make_symbols(problem.grid, problem.rho);
  kglri::SpectralContext ctx(problem.grid);
  kglri::State s0 = kglri::make_initial_state(spec, problem.grid);

  kglri::StepperOptions sopts{spec.dealias};
  auto stepper = kglri::make_stepper(cfg.run_method, ctx, symbols, problem,
                                     cfg.run_h, sopts);
  kglri::EvolveOptions eopts;
  eopts.sample_every = cfg.sample_every;
  eopts.diagnostics = cfg.diag_norms || cfg.diag_energy;
  eopts.with_energy = cfg.diag_energy;

  auto t0 = std::chrono::steady_clock::now();
  kglri::EvolveResult res = kglri::evolve(s0, spec.T, *stepper, eopts);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();

  namespace fs = std::filesystem;
  fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  nlohmann::json j;
  j["version"] = kglri::kVersion;
  j["config"] = nlohmann::json::parse(cfg.echo_json());
  j["t"] = res.final_state.t;
  j["wall_seconds"] = wall;
  j["h1_u"] = kglri::sobolev_norm(res.final_state.u, 1.0);
  j["l2_v"] = kglri::sobolev_norm(res.final_state.v, 0.0);
  if (problem.nl.has_antiderivative)
    j["energy"] = kglri::energy(res.final_state, problem, ctx);
  if (!res.diagnostics.empty()) {
    j["diagnostics"] = nlohmann::json::array();
    for (const auto& row : res.diagnostics) {
      nlohmann::json d{{"t", row.t}, {"h1_u", row.h1_u}, {"l2_v", row.l2_v}};
      if (row.energy) d["energy"] = *row.energy;
      j["diagnostics"].push_back(d);
    }
  }
  if (res.energy_skipped)
    j["notes"] = "energy diagnostic skipped: no antiderivative registered";
  write_text(dir / "run.json", j.dump(2) + "\n");
  if (cfg.write_state_file)
    kglri::write_state((dir / "state.bin").string(), res.final_state,
                       problem.rho);
  if (!cfg.quiet)
    std::cout << "run: t=" << res.final_state.t << " wall=" << wall
              << "s -> " << (dir / "run.json").string() << "\n";
  return kExitOk;
}

int cmd_study(const CommonArgs& args, const std::string& which) {
  kglri::RunConfig cfg = load_config(args);
  kglri::ConvergenceReport report;
  if (which == "converge") {
    report = kglri::temporal_study(cfg.study);
  } else if (which == "spatial") {
    report = kglri::spatial_study(cfg.study);
  } else {
    report = kglri::efficiency_study(cfg.study);
  }
  emit_report(cfg, report, which);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier-pseudospectral Klein-Gordon integrator benchmark"};
  app.set_version_flag("--version", kglri::kVersion);
  app.require_subcommand(1);

  CommonArgs run_args, conv_args, spat_args, eff_args;
  bool corrupt_psi2 = false;

  CLI::App* run = app.add_subcommand("run", "Single evolve, write final state");
  add_common(run, run_args);
  CLI::App* conv =
      app.add_subcommand("converge", "Temporal convergence study");
  add_common(conv, conv_args);
  CLI::App* spat = app.add_subcommand("spatial", "Spatial accuracy study");
  add_common(spat, spat_args);
  CLI::App* eff = app.add_subcommand("efficiency", "Error vs wall-time study");
  add_common(eff, eff_args);
  CLI::App* self = app.add_subcommand("selftest", "Fast invariant battery");
  self->add_flag("--corrupt-psi2-threshold", corrupt_psi2,
                 "Break the Psi2 branch threshold (failure-path hook)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (conv->parsed()) return cmd_study(conv_args, "converge");
    if (spat->parsed()) return cmd_study(spat_args, "spatial");
    if (eff->parsed()) return cmd_study(eff_args, "efficiency");
    if (self->parsed()) {
      kglri::SelftestOptions opts;
      opts.corrupt_psi2_threshold = corrupt_psi2;
      return kglri::run_selftest(std::cout, opts) == 0 ? kExitOk
                                                       : kExitSelftest;
    }
  } catch (const kglri::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
