#include "ising/engine.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ising/rng.hpp"
#include "ising/version.hpp"
#include "ising/wolff.hpp"

namespace ising {

namespace {

std::string iso_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string sanitized_hostname() {
  char buf[256] = {0};
  if (gethostname(buf, sizeof(buf) - 1) != 0) return "unknown";
  std::string host(buf);
  if (host.empty()) return "unknown";
  for (char& c : host) {
    if (std::isspace(static_cast<unsigned char>(c))) c = '_';
  }
  return host;
}

std::string format_beta(double beta) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", beta);
  return buf;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error(path.string() + ": malformed header: " + what);
}

}  // namespace

double canonical_beta(double beta) { return std::round(beta * 1e6) / 1e6; }

RunParams make_run_params(int size, double beta, double coupling,
                          std::size_t measurements, std::uint32_t seed,
                          double thermalization_fraction) {
  if (size < 2 || size % 2 != 0) {
    throw std::invalid_argument("run params: L must be even and >= 2");
  }
  if (!(coupling > 0.0)) throw std::invalid_argument("run params: J must be > 0");
  if (measurements == 0) throw std::invalid_argument("run params: measurements must be >= 1");
  if (!(thermalization_fraction >= 0.0 && thermalization_fraction < 1.0)) {
    throw std::invalid_argument("run params: thermalization fraction must be in [0, 1)");
  }
  const double b = canonical_beta(beta);
  if (!(b > 0.0)) throw std::invalid_argument("run params: beta must be positive");

  RunParams p;
  p.size = size;
  p.beta = b;
  p.coupling = coupling;
  p.measurements = measurements;
  p.thermalization = static_cast<std::size_t>(
      std::ceil(thermalization_fraction * static_cast<double>(measurements)));
  p.seed = seed;
  return p;
}

MeasurementSeries run_chain(const RunParams& params) {
  MeasurementSeries series;
  series.metadata.start_time = iso_utc_now();
  series.metadata.hostname = sanitized_hostname();
  series.metadata.code_version = kVersion;
  series.metadata.format_version = "v1";
  series.metadata.params = params;

  SpinConfig config(params.size, params.coupling, /*up=*/true);
  RandomStream rng(params.seed);
  WolffUpdater updater(config);

  for (std::size_t i = 0; i < params.thermalization; ++i) {
    updater.update(config, params.beta, rng);
  }

  series.records.reserve(params.measurements);
  for (std::size_t i = 0; i < params.measurements; ++i) {
    const UpdateResult r = updater.update(config, params.beta, rng);
    series.records.push_back({static_cast<std::int32_t>(config.total_spin()),
                              r.cluster_size});
  }
  return series;
}

std::string run_file_name(const RunParams& params) {
  std::ostringstream name;
  name << "ising_L" << params.size << "_beta" << format_beta(params.beta)
       << "_seed" << params.seed << ".dat";
  return name.str();
}

std::filesystem::path write_run_file(const MeasurementSeries& series,
                                     const std::filesystem::path& directory,
                                     bool force) {
  const RunParams& p = series.metadata.params;
  const std::filesystem::path path = directory / run_file_name(p);
  if (!force && std::filesystem::exists(path)) {
    throw std::runtime_error("write_run_file: refusing to overwrite " + path.string() +
                             " (use force)");
  }
  std::filesystem::create_directories(directory);

  // write to a temp name, rename when complete; a crash never leaves a
  // plausible-looking partial file behind
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("write_run_file: cannot open " + tmp.string());
    out << "# ising-run v1\n";
    char line[256];
    std::snprintf(line, sizeof(line), "# L=%d beta=%s J=%g seed=%u\n", p.size,
                  format_beta(p.beta).c_str(), p.coupling, p.seed);
    out << line;
    std::snprintf(line, sizeof(line), "# measurements=%zu thermalization=%zu\n",
                  p.measurements, p.thermalization);
    out << line;
    out << "# start=" << series.metadata.start_time
        << " host=" << series.metadata.hostname
        << " version=" << series.metadata.code_version << "\n";
    out << "# columns: S cluster_size\n";
    for (const MeasurementRecord& r : series.records) {
      std::snprintf(line, sizeof(line), "%d %d\n", r.total_spin, r.cluster_size);
      out << line;
    }
    if (!out) throw std::runtime_error("write_run_file: I/O error on " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  return path;
}

MeasurementSeries read_run_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_run_file: cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line) || line != "# ising-run v1") {
    parse_fail(path, "expected '# ising-run v1'");
  }

  MeasurementSeries series;
  series.metadata.format_version = "v1";
  RunParams& p = series.metadata.params;

  if (!std::getline(in, line)) parse_fail(path, "missing parameter line");
  if (std::sscanf(line.c_str(), "# L=%d beta=%lf J=%lf seed=%u", &p.size, &p.beta,
                  &p.coupling, &p.seed) != 4) {
    parse_fail(path, "bad parameter line '" + line + "'");
  }
  if (!std::getline(in, line)) parse_fail(path, "missing measurement-count line");
  if (std::sscanf(line.c_str(), "# measurements=%zu thermalization=%zu",
                  &p.measurements, &p.thermalization) != 2) {
    parse_fail(path, "bad measurement-count line '" + line + "'");
  }
  if (!std::getline(in, line)) parse_fail(path, "missing provenance line");
  {
    char start[64] = {0}, host[128] = {0}, version[64] = {0};
    if (std::sscanf(line.c_str(), "# start=%63s host=%127s version=%63s", start, host,
                    version) != 3) {
      parse_fail(path, "bad provenance line '" + line + "'");
    }
    series.metadata.start_time = start;
    series.metadata.hostname = host;
    series.metadata.code_version = version;
  }
  if (!std::getline(in, line) || line != "# columns: S cluster_size") {
    parse_fail(path, "expected '# columns: S cluster_size'");
  }
  if (p.size < 2 || p.size % 2 != 0 || !(p.coupling > 0.0) || !(p.beta > 0.0) ||
      p.measurements == 0) {
    parse_fail(path, "invalid parameters");
  }

  const long long n_sites = static_cast<long long>(p.size) * p.size;
  series.records.reserve(p.measurements);
  std::size_t count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    MeasurementRecord r{};
    if (std::sscanf(line.c_str(), "%d %d", &r.total_spin, &r.cluster_size) != 2) {
      throw std::runtime_error(path.string() + ": record " + std::to_string(count + 1) +
                               ": unparsable line '" + line + "'");
    }
    ++count;
    if (count > p.measurements) break;  // counted below as a mismatch
    const std::string where = path.string() + ": record " + std::to_string(count);
    if (std::llabs(r.total_spin) > n_sites) {
      throw std::runtime_error(where + ": invariant violation: |S| > L^2");
    }
    if (((r.total_spin % 2) + 2) % 2 != ((n_sites % 2) + 2) % 2) {
      throw std::runtime_error(where + ": invariant violation: S and L^2 differ in parity");
    }
    if (r.cluster_size < 1 || r.cluster_size > n_sites) {
      throw std::runtime_error(where + ": invariant violation: cluster size outside [1, L^2]");
    }
    series.records.push_back(r);
  }
  if (count != p.measurements) {
    throw std::runtime_error(path.string() + ": record count mismatch: header says " +
                             std::to_string(p.measurements) + ", file has " +
                             std::to_string(count) + (count > p.measurements ? "+" : ""));
  }
  return series;
}

void validate_plan(const SweepPlan& plan) {
  if (plan.sizes.empty()) throw std::invalid_argument("sweep plan: no sizes");
  if (plan.temperatures.empty()) throw std::invalid_argument("sweep plan: no temperatures");
  if (plan.measurements == 0) throw std::invalid_argument("sweep plan: measurements must be >= 1");
  if (plan.threads < 1) throw std::invalid_argument("sweep plan: threads must be >= 1");
  if (!(plan.coupling > 0.0)) throw std::invalid_argument("sweep plan: J must be > 0");

  for (std::size_t i = 0; i < plan.sizes.size(); ++i) {
    const int L = plan.sizes[i];
    if (L < 2 || L % 2 != 0) {
      throw std::invalid_argument("sweep plan: size " + std::to_string(L) +
                                  " must be even and >= 2");
    }
    if (i > 0 && plan.sizes[i] <= plan.sizes[i - 1]) {
      throw std::invalid_argument("sweep plan: sizes must be strictly ascending");
    }
    if (i > 0 && std::find(plan.sizes.begin(), plan.sizes.end(), L / 2) == plan.sizes.end()) {
      throw std::invalid_argument("sweep plan: size " + std::to_string(L) +
                                  " has no matching " + std::to_string(L / 2) +
                                  " for the crossing analysis");
    }
  }
  for (std::size_t i = 0; i < plan.temperatures.size(); ++i) {
    if (!(plan.temperatures[i] > 0.0)) {
      throw std::invalid_argument("sweep plan: temperatures must be positive");
    }
    if (i > 0 && plan.temperatures[i] <= plan.temperatures[i - 1]) {
      throw std::invalid_argument("sweep plan: temperatures must be strictly increasing");
    }
  }
  // distinct grid temperatures must stay distinct as canonical betas
  for (std::size_t i = 1; i < plan.temperatures.size(); ++i) {
    if (canonical_beta(1.0 / plan.temperatures[i]) ==
        canonical_beta(1.0 / plan.temperatures[i - 1])) {
      throw std::invalid_argument("sweep plan: temperature grid too fine, betas collide at 6 decimals");
    }
  }
}

std::vector<SweepPoint> plan_points(const SweepPlan& plan) {
  validate_plan(plan);
  std::vector<SweepPoint> points;
  points.reserve(plan.sizes.size() * plan.temperatures.size());
  for (int L : plan.sizes) {
    for (std::size_t t = 0; t < plan.temperatures.size(); ++t) {
      SweepPoint pt;
      pt.size = L;
      pt.temperature = plan.temperatures[t];
      pt.beta = canonical_beta(1.0 / plan.temperatures[t]);
      pt.seed = derive_seed(plan.base_seed, static_cast<std::uint32_t>(L),
                            static_cast<std::uint32_t>(t));
      pt.temp_index = t;
      points.push_back(pt);
    }
  }
  return points;
}

std::vector<std::filesystem::path> SweepOutcome::all_files() const {
  std::vector<std::filesystem::path> files = written;
  files.insert(files.end(), skipped.begin(), skipped.end());
  std::sort(files.begin(), files.end());
  return files;
}

namespace {

// Serialized append-only sweep log; one line per event.
class SweepLogger {
 public:
  explicit SweepLogger(const std::filesystem::path& directory)
      : out_(directory / "sweep.log", std::ios::app) {}

  void event(const std::string& name, const std::string& detail) {
    std::lock_guard<std::mutex> lock(mutex_);
    out_ << iso_utc_now() << " " << name;
    if (!detail.empty()) out_ << " " << detail;
    out_ << "\n";
    out_.flush();
  }

 private:
  std::ofstream out_;
  std::mutex mutex_;
};

std::string point_detail(const SweepPoint& pt) {
  std::ostringstream s;
  s << "L=" << pt.size << " beta=" << format_beta(pt.beta) << " seed=" << pt.seed;
  return s.str();
}

// Runs one grid point: skip if a valid file already exists, otherwise
// simulate and write. Returns through the outcome vectors.
void process_point(const SweepPoint& pt, const SweepPlan& plan,
                   const std::filesystem::path& directory, SweepLogger& log,
                   std::vector<std::filesystem::path>& written,
                   std::vector<std::filesystem::path>& skipped,
                   std::vector<std::string>& failures, std::mutex& outcome_mutex) {
  try {
    const RunParams params = make_run_params(pt.size, pt.beta, plan.coupling,
                                             plan.measurements, pt.seed,
                                             plan.thermalization_fraction);
    const std::filesystem::path path = directory / run_file_name(params);
    bool rerun_invalid = false;
    if (!plan.force && std::filesystem::exists(path)) {
      try {
        read_run_file(path);
        log.event("point_skipped", point_detail(pt) + " file=" + path.filename().string());
        std::lock_guard<std::mutex> lock(outcome_mutex);
        skipped.push_back(path);
        return;
      } catch (const std::exception& e) {
        rerun_invalid = true;
        log.event("point_invalid", point_detail(pt) + " error=" + e.what());
      }
    }
    const MeasurementSeries series = run_chain(params);
    const std::filesystem::path out =
        write_run_file(series, directory, plan.force || rerun_invalid);
    log.event("point_done", point_detail(pt) + " file=" + out.filename().string() +
                                " updates=" +
                                std::to_string(params.thermalization + params.measurements));
    std::lock_guard<std::mutex> lock(outcome_mutex);
    written.push_back(out);
  } catch (const std::exception& e) {
    log.event("point_failed", point_detail(pt) + " error=" + e.what());
    std::lock_guard<std::mutex> lock(outcome_mutex);
    failures.push_back(point_detail(pt) + ": " + e.what());
  }
}

std::string plan_detail(const SweepPlan& plan) {
  std::ostringstream s;
  s << "host=" << sanitized_hostname() << " version=" << kVersion << " sizes=";
  for (std::size_t i = 0; i < plan.sizes.size(); ++i) {
    s << (i ? "," : "") << plan.sizes[i];
  }
  s << " temperatures=" << plan.temperatures.size()
    << " measurements=" << plan.measurements << " base_seed=" << plan.base_seed
    << " threads=" << plan.threads;
  return s.str();
}

SweepOutcome run_sweep_impl(const SweepPlan& plan, const std::filesystem::path& directory,
                            bool parallel) {
  const std::vector<SweepPoint> points = plan_points(plan);
  std::filesystem::create_directories(directory);
  SweepLogger log(directory);
  log.event("sweep_start", plan_detail(plan));

  SweepOutcome outcome;
  std::mutex outcome_mutex;

  if (parallel) {
#ifdef _OPENMP
    const int n = static_cast<int>(points.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(plan.threads)
    for (int i = 0; i < n; ++i) {
      process_point(points[static_cast<std::size_t>(i)], plan, directory, log,
                    outcome.written, outcome.skipped, outcome.failures, outcome_mutex);
    }
#else
    for (const SweepPoint& pt : points) {
      process_point(pt, plan, directory, log, outcome.written, outcome.skipped,
                    outcome.failures, outcome_mutex);
    }
#endif
  } else {
    for (const SweepPoint& pt : points) {
      process_point(pt, plan, directory, log, outcome.written, outcome.skipped,
                    outcome.failures, outcome_mutex);
    }
  }

  std::sort(outcome.written.begin(), outcome.written.end());
  std::sort(outcome.skipped.begin(), outcome.skipped.end());
  std::sort(outcome.failures.begin(), outcome.failures.end());
  log.event("sweep_done", "written=" + std::to_string(outcome.written.size()) +
                              " skipped=" + std::to_string(outcome.skipped.size()) +
                              " failed=" + std::to_string(outcome.failures.size()));
  return outcome;
}

}  // namespace

SweepOutcome run_sweep_serial(const SweepPlan& plan, const std::filesystem::path& directory) {
  return run_sweep_impl(plan, directory, /*parallel=*/false);
}

SweepOutcome run_sweep_parallel(const SweepPlan& plan, const std::filesystem::path& directory) {
  return run_sweep_impl(plan, directory, /*parallel=*/true);
}

SweepOutcome run_sweep(const SweepPlan& plan, const std::filesystem::path& directory) {
  if (plan.threads > 1) return run_sweep_parallel(plan, directory);
  return run_sweep_serial(plan, directory);
}

}  // namespace ising
