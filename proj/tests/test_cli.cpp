#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ising/analysis.hpp"
#include "ising/config.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_binary() {
  const char* env = std::getenv("ISING_CLI");
  return env ? env : "./tools/ising";
}

struct CommandResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

CommandResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path out_file = scratch / "cmd_output.txt";
  const std::string cmd = cli_binary() + " " + args + " > " + out_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out_file);
  std::ostringstream out;
  out << in.rdbuf();
  return {WEXITSTATUS(status), out.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ising_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t count_run_files(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".dat") ++n;
  }
  return n;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return ising::parse_config(in, "test.cfg");
  };

  // defaults: the desk-scale grid
  const ising::CliConfig defaults = parse("");
  CHECK(defaults.plan.sizes == std::vector<int>{8, 16, 32, 64});
  CHECK(defaults.plan.temperatures.size() == 25);
  CHECK(defaults.plan.temperatures.front() == doctest::Approx(2.21));
  CHECK(defaults.plan.temperatures.back() == doctest::Approx(2.33));
  CHECK(defaults.plan.measurements == 200000);
  CHECK(defaults.analysis.jackknife_bins == 100);
  CHECK(defaults.analysis.nu == 1.0);

  const ising::CliConfig parsed = parse(
      "# comment\n"
      "sizes = 4, 8\n"
      "temps = 2.2, 2.3\n"
      "measurements = 1000\n"
      "base_seed = 9\n"
      "threads = 3\n"
      "binder_crossing_fit_kind = linear\n"
      "finite_size_min_L = 8\n"
      "jackknife_bins = 80\n"
      "nu = 0.9\n"
      "data_dir = mydata\n");
  CHECK(parsed.plan.sizes == std::vector<int>{4, 8});
  CHECK(parsed.plan.temperatures == std::vector<double>{2.2, 2.3});
  CHECK(parsed.plan.base_seed == 9);
  CHECK(parsed.plan.threads == 3);
  CHECK(parsed.analysis.binder_crossing_fit_kind == ising::FitKind::linear);
  CHECK(parsed.analysis.finite_size_min_l == 8);
  CHECK(parsed.analysis.jackknife_bins == 80);
  CHECK(parsed.analysis.nu == doctest::Approx(0.9));
  CHECK(parsed.data_dir == fs::path("mydata"));

  CHECK_THROWS_WITH_AS(parse("unknown_key = 3\n"), doctest::Contains("test.cfg:1"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse("sizes = 8\nmeasurements = oops\n"),
                       doctest::Contains("test.cfg:2"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse("temps = 2.2,2.3\ntemp_min = 2.2\n"),
                       doctest::Contains("mutually exclusive"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse("sizes = 8,24\n"), doctest::Contains("no matching 12"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse("jackknife_bins = 50\n"), doctest::Contains(">= 78"),
                       std::runtime_error);
  CHECK_THROWS_AS(parse("sizes =\n"), std::runtime_error);
}

TEST_CASE("help and version") {
  const fs::path dir = fresh_dir("help");
  CHECK(run_cli("--help", dir).exit_code == 0);
  CHECK(run_cli("simulate --help", dir).exit_code == 0);
  CHECK(run_cli("sweep --help", dir).exit_code == 0);
  const CommandResult analyze_help = run_cli("analyze --help", dir);
  CHECK(analyze_help.exit_code == 0);
  CHECK(analyze_help.output.find("--fit-kind") != std::string::npos);
  CHECK(run_cli("--version", dir).exit_code == 0);
}

TEST_CASE("simulate validates its arguments") {
  const fs::path dir = fresh_dir("sim_validate");
  const fs::path data = dir / "data";

  const CommandResult odd = run_cli("simulate --size 7 --measurements 100 --beta 0.4 --out " +
                                        data.string(), dir);
  CHECK(odd.exit_code != 0);
  CHECK(count_run_files(data) == 0);

  CHECK(run_cli("simulate --size 8 --beta 0.4 --out " + data.string(), dir).exit_code != 0);
  CHECK(run_cli("simulate --size 8 --measurements 0 --beta 0.4 --out " + data.string(), dir)
            .exit_code != 0);
  CHECK(run_cli("simulate --size 8 --measurements 10 --beta 0.4 --temps 2.3 --out " +
                    data.string(), dir)
            .exit_code != 0);  // mutually exclusive
  CHECK(run_cli("simulate --size 8 --measurements 10 --beta nope --out " + data.string(), dir)
            .exit_code != 0);
  CHECK(run_cli("simulate --size 8 --measurements 10 --out " + data.string(), dir).exit_code !=
        0);  // neither beta nor temps
}

TEST_CASE("simulate runs chains and resumes") {
  const fs::path dir = fresh_dir("sim_run");
  const fs::path data = dir / "data";

  const CommandResult first =
      run_cli("simulate --size 8 --measurements 1000 --beta 0.42,0.44 --seed 5 --out " +
                  data.string(), dir);
  CHECK(first.exit_code == 0);
  CHECK(count_run_files(data) == 2);

  // rerun: skip with notice
  const CommandResult second =
      run_cli("simulate --size 8 --measurements 1000 --beta 0.42,0.44 --seed 5 --out " +
                  data.string(), dir);
  CHECK(second.exit_code == 0);
  CHECK(second.output.find("skipped existing") != std::string::npos);
  CHECK(count_run_files(data) == 2);
}

TEST_CASE("sweep rejects bad configs and supports dry runs") {
  const fs::path dir = fresh_dir("sweep");
  const fs::path cfg = dir / "bad.cfg";
  {
    std::ofstream out(cfg);
    out << "sizes = 8,24\n";
  }
  const CommandResult bad = run_cli("sweep --config " + cfg.string(), dir);
  CHECK(bad.exit_code != 0);
  CHECK(bad.output.find("no matching 12") != std::string::npos);

  const fs::path good = dir / "good.cfg";
  {
    std::ofstream out(good);
    out << "sizes = 4,8\n"
        << "temps = 2.2,2.3\n"
        << "measurements = 200\n"
        << "data_dir = " << (dir / "data").string() << "\n";
  }
  const CommandResult dry = run_cli("sweep --config " + good.string() + " --dry-run", dir);
  CHECK(dry.exit_code == 0);
  CHECK(count_run_files(dir / "data") == 0);
  std::size_t lines = 0, pos = 0;
  while ((pos = dry.output.find("L=", pos)) != std::string::npos) {
    ++lines;
    ++pos;
  }
  CHECK(lines == 4);
}

TEST_CASE("analyze fails cleanly without data") {
  const fs::path dir = fresh_dir("an_empty");
  const CommandResult missing =
      run_cli("analyze binder --data " + (dir / "nope").string() + " --out " +
                  (dir / "figs").string(), dir);
  CHECK(missing.exit_code != 0);
  CHECK(missing.output.find("error:") != std::string::npos);
}

TEST_CASE("end-to-end workflow: sweep, analyze, override, idempotence") {
  const fs::path dir = fresh_dir("workflow");
  const fs::path data = dir / "data";
  const fs::path figs = dir / "figures";
  const fs::path cfg = dir / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "sizes = 4,8,16\n"
        << "temps = 2.1,2.2,2.3,2.4,2.5\n"
        << "measurements = 20000\n"
        << "base_seed = 77\n"
        << "threads = 2\n"
        << "binder_crossing_fit_kind = linear\n"
        << "finite_size_min_L = 8\n"
        << "data_dir = " << data.string() << "\n"
        << "output_dir = " << figs.string() << "\n";
  }

  const CommandResult sweep = run_cli("sweep --config " + cfg.string(), dir);
  CHECK(sweep.exit_code == 0);
  CHECK(count_run_files(data) == 15);

  const CommandResult chi = run_cli("analyze susceptibility --config " + cfg.string(), dir);
  CHECK(chi.exit_code == 0);
  CHECK(fs::exists(figs / "fig_susceptibility" / "fig_susceptibility.txt"));

  const CommandResult binder = run_cli("analyze binder --config " + cfg.string(), dir);
  CHECK(binder.exit_code == 0);
  CHECK(binder.output.find("Tc_star = ") != std::string::npos);
  CHECK(fs::exists(figs / "fig_binder_cumulant" / "fig_binder_cumulant.txt"));
  CHECK(fs::exists(figs / "fig_sizescaling" / "fig_sizescaling.txt"));
  CHECK(fs::exists(figs / "tc_estimate.txt"));
  const ising::FssResult estimate = ising::read_tc_estimate(figs / "tc_estimate.txt");
  CHECK(estimate.fit_kind == ising::FitKind::linear);
  CHECK(estimate.min_l == 8);

  // restricting the crossing sizes is recorded in the estimate file
  const CommandResult restricted =
      run_cli("analyze binder --config " + cfg.string() + " --min-L 16 --out " +
                  (dir / "figs_minl").string(), dir);
  CHECK(restricted.exit_code != 0);  // only one crossing remains in range
  CHECK(restricted.output.find("at least 2 crossings") != std::string::npos);

  const CommandResult collapse = run_cli("analyze collapse --config " + cfg.string(), dir);
  CHECK(collapse.exit_code == 0);
  const fs::path collapse_file = figs / "fig_binder_collapse" / "fig_binder_collapse.txt";
  CHECK(fs::exists(collapse_file));
  const std::string collapse_default = slurp(collapse_file);

  // an explicit Tc override changes the collapse abscissa
  const CommandResult collapse_tc =
      run_cli("analyze collapse --config " + cfg.string() + " --tc 2.0", dir);
  CHECK(collapse_tc.exit_code == 0);
  CHECK(collapse_tc.output.find("Tc=2.0") != std::string::npos);
  CHECK(slurp(collapse_file) != collapse_default);

  // idempotence: identical reruns produce byte-identical outputs
  const std::string binder_figure = slurp(figs / "fig_binder_cumulant" / "fig_binder_cumulant.txt");
  const CommandResult binder_again = run_cli("analyze binder --config " + cfg.string(), dir);
  CHECK(binder_again.exit_code == 0);
  CHECK(slurp(figs / "fig_binder_cumulant" / "fig_binder_cumulant.txt") == binder_figure);
}
