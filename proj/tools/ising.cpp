// Command line driver: `simulate` and `sweep` produce run files + a sweep
// log, `analyze` turns a directory of run files into figure data and the
// critical temperature estimate.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ising/analysis.hpp"
#include "ising/config.hpp"
#include "ising/engine.hpp"
#include "ising/version.hpp"

namespace {

int report_outcome(const ising::SweepOutcome& outcome, bool list_skipped) {
  for (const std::string& f : outcome.failures) std::cerr << "failed: " << f << "\n";
  if (list_skipped) {
    for (const auto& p : outcome.skipped) {
      std::cout << "skipped existing " << p.string() << " (use --force to rerun)\n";
    }
  }
  std::cout << "done: " << outcome.written.size() << " written, "
            << outcome.skipped.size() << " skipped, " << outcome.failures.size()
            << " failed\n";
  return outcome.ok() ? 0 : 1;
}

struct AnalyzeArgs {
  std::string kind;
  std::string data_dir;
  std::string out_dir;
  std::string config_file;
  std::string fit_kind;
  int min_l = -1;
  int max_l = -1;
  int bins = -1;
  double tc = 0.0;
  double nu = 0.0;
};

int run_analyze(const AnalyzeArgs& args) {
  ising::CliConfig config =
      args.config_file.empty() ? ising::default_config() : ising::load_config(args.config_file);
  if (!args.fit_kind.empty()) {
    config.analysis.binder_crossing_fit_kind = ising::fit_kind_from_string(args.fit_kind);
  }
  if (args.min_l >= 0) config.analysis.finite_size_min_l = args.min_l;
  if (args.max_l >= 0) config.analysis.finite_size_max_l = args.max_l;
  if (args.bins > 0) config.analysis.jackknife_bins = args.bins;
  ising::validate_config(config.analysis);

  const std::filesystem::path data_dir =
      args.data_dir.empty() ? config.data_dir : std::filesystem::path(args.data_dir);
  const std::filesystem::path out_dir =
      args.out_dir.empty() ? config.output_dir : std::filesystem::path(args.out_dir);

  const ising::Dataset data = ising::load_dataset(data_dir, config.analysis.jackknife_bins);

  if (args.kind == "susceptibility") {
    const auto path = ising::analyze_susceptibility(data, config.analysis, out_dir);
    std::cout << "wrote " << path.string() << "\n";
    return 0;
  }
  if (args.kind == "binder") {
    const ising::BinderAnalysis result = ising::analyze_binder(data, config.analysis, out_dir);
    std::printf("Tc_star = %.7f +/- %.7f  (A=%.5g, chi2=%.5g, crossings=%zu, fit=%s)\n",
                result.fss.tc_star, result.fss.tc_star_error, result.fss.slope,
                result.fss.chi_squared, result.fss.crossings_used.size(),
                ising::to_string(result.fss.fit_kind).c_str());
    std::cout << "wrote " << result.binder_figure.string() << "\n";
    std::cout << "wrote " << result.sizescaling_figure.string() << "\n";
    std::cout << "wrote " << result.tc_file.string() << "\n";
    return 0;
  }
  // collapse: flag > config Tc > the estimate file written by `analyze binder`
  double tc = args.tc;
  double nu = args.nu > 0.0 ? args.nu : config.analysis.nu;
  if (!(tc > 0.0)) tc = config.analysis.tc;
  if (!(tc > 0.0)) {
    const std::filesystem::path tc_file = out_dir / "tc_estimate.txt";
    if (!std::filesystem::exists(tc_file)) {
      throw std::runtime_error("no Tc for the collapse: run `analyze binder` first or pass --tc");
    }
    tc = ising::read_tc_estimate(tc_file).tc_star;
  }
  const auto path = ising::analyze_collapse(data, config.analysis, tc, nu, out_dir);
  std::printf("collapse at Tc=%.7f nu=%.4g\n", tc, nu);
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wolff-cluster Monte Carlo and Binder-cumulant analysis for the "
               "2D square-lattice Ising model"};
  app.set_version_flag("--version", ising::kVersion);
  app.require_subcommand(1);

  // ---- simulate ----
  auto* simulate = app.add_subcommand(
      "simulate", "Run one chain per inverse temperature at a fixed system size");
  int sim_size = 0;
  std::size_t sim_measurements = 0;
  std::vector<double> sim_betas, sim_temps;
  std::uint64_t sim_seed = 1;
  std::string sim_out = "data";
  int sim_threads = 1;
  bool sim_force = false;
  double sim_coupling = 1.0;
  double sim_therm = 0.10;
  simulate->add_option("-L,--size", sim_size, "linear system size L (even, >= 2)")->required();
  simulate->add_option("-n,--measurements", sim_measurements, "measurements per chain")
      ->required();
  auto* beta_opt =
      simulate->add_option("-b,--beta", sim_betas, "inverse temperatures (comma separated)")
          ->delimiter(',');
  auto* temp_opt =
      simulate->add_option("-T,--temps", sim_temps, "temperatures (comma separated)")
          ->delimiter(',');
  beta_opt->excludes(temp_opt);
  temp_opt->excludes(beta_opt);
  simulate->add_option("-s,--seed", sim_seed, "base seed (per-point seeds derive from it)");
  simulate->add_option("-o,--out", sim_out, "output directory for run files");
  simulate->add_option("-j,--threads", sim_threads, "worker threads");
  simulate->add_option("--coupling", sim_coupling, "coupling J in units of energy");
  simulate->add_option("--therm-fraction", sim_therm,
                       "fraction of extra updates discarded for thermalization");
  simulate->add_flag("--force", sim_force, "rerun points whose files already exist");

  // ---- sweep ----
  auto* sweep = app.add_subcommand(
      "sweep", "Run the full (L, T) parameter sweep described by a config file");
  std::string sweep_config;
  bool sweep_dry = false;
  bool sweep_force = false;
  int sweep_threads = 0;
  sweep->add_option("-c,--config", sweep_config, "config file (defaults used when omitted)");
  sweep->add_flag("--dry-run", sweep_dry, "list the points without simulating");
  sweep->add_flag("--force", sweep_force, "rerun points whose files already exist");
  sweep->add_option("-j,--threads", sweep_threads, "override the thread budget");

  // ---- analyze ----
  auto* analyze = app.add_subcommand("analyze", "Evaluate run files into figure data");
  AnalyzeArgs an;
  analyze->add_option("kind", an.kind, "what to compute")
      ->required()
      ->check(CLI::IsMember({"susceptibility", "binder", "collapse"}));
  analyze->add_option("-d,--data", an.data_dir, "directory of run files");
  analyze->add_option("-o,--out", an.out_dir, "output directory for figures");
  analyze->add_option("-c,--config", an.config_file, "config file");
  analyze->add_option("--fit-kind", an.fit_kind, "crossing fit kind: cubic or linear")
      ->check(CLI::IsMember({"cubic", "linear"}));
  analyze->add_option("--min-L", an.min_l, "smallest crossing size used in the fit");
  analyze->add_option("--max-L", an.max_l, "largest crossing size used in the fit");
  analyze->add_option("--bins", an.bins, "jackknife bins (>= 78)");
  analyze->add_option("--tc", an.tc, "collapse: override the critical temperature");
  analyze->add_option("--nu", an.nu, "collapse: override the critical exponent nu");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      if (sim_betas.empty() && sim_temps.empty()) {
        std::cerr << "error: simulate needs --beta or --temps\n";
        return 1;
      }
      ising::SweepPlan plan;
      plan.sizes = {sim_size};
      if (!sim_betas.empty()) {
        for (double b : sim_betas) {
          if (!(b > 0.0)) throw std::invalid_argument("beta must be positive");
          plan.temperatures.push_back(1.0 / b);
        }
      } else {
        plan.temperatures = sim_temps;
      }
      std::sort(plan.temperatures.begin(), plan.temperatures.end());
      plan.measurements = sim_measurements;
      plan.coupling = sim_coupling;
      plan.thermalization_fraction = sim_therm;
      plan.base_seed = sim_seed;
      plan.threads = sim_threads;
      plan.force = sim_force;
      const ising::SweepOutcome outcome = ising::run_sweep(plan, sim_out);
      return report_outcome(outcome, /*list_skipped=*/true);
    }

    if (*sweep) {
      ising::CliConfig config = sweep_config.empty() ? ising::default_config()
                                                     : ising::load_config(sweep_config);
      if (sweep_threads > 0) config.plan.threads = sweep_threads;
      config.plan.force = sweep_force;
      if (sweep_dry) {
        for (const ising::SweepPoint& pt : ising::plan_points(config.plan)) {
          const ising::RunParams params = ising::make_run_params(
              pt.size, pt.beta, config.plan.coupling, config.plan.measurements, pt.seed,
              config.plan.thermalization_fraction);
          std::printf("L=%d T=%.6f beta=%.6f seed=%u file=%s\n", pt.size, pt.temperature,
                      pt.beta, pt.seed, ising::run_file_name(params).c_str());
        }
        return 0;
      }
      const ising::SweepOutcome outcome = ising::run_sweep(config.plan, config.data_dir);
      return report_outcome(outcome, /*list_skipped=*/false);
    }

    return run_analyze(an);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
