#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ising {

// Inverse temperatures are carried to six decimal places everywhere: run
// files record beta with six digits, so the value used by a simulation and
// the value read back must be the same number.
double canonical_beta(double beta);

struct RunParams {
  int size = 0;                  // L, even and >= 2
  double beta = 0.0;             // 1/T with k_B = 1, canonical form
  double coupling = 1.0;         // J > 0
  std::size_t measurements = 0;  // N >= 1
  std::size_t thermalization = 0;
  std::uint32_t seed = 0;

  double temperature() const { return 1.0 / beta; }
};

// Validates, canonicalizes beta and resolves the discarded update count as
// ceil(thermalization_fraction * measurements).
RunParams make_run_params(int size, double beta, double coupling,
                          std::size_t measurements, std::uint32_t seed,
                          double thermalization_fraction = 0.10);

struct RunMetadata {
  std::string start_time;      // ISO-8601 UTC, e.g. 2026-08-09T12:00:00Z
  std::string hostname;
  std::string code_version;
  std::string format_version;  // "v1"
  RunParams params;
};

struct MeasurementRecord {
  std::int32_t total_spin;
  std::int32_t cluster_size;
};

struct MeasurementSeries {
  RunMetadata metadata;
  std::vector<MeasurementRecord> records;

  int size() const { return metadata.params.size; }
  double beta() const { return metadata.params.beta; }
  double magnetization(std::size_t i) const {
    return static_cast<double>(records[i].total_spin) /
           (metadata.params.size * metadata.params.size);
  }
};

// Runs one chain: an all-up start, `thermalization` discarded updates, then
// one recorded measurement after each of the N measurement updates.
// Deterministic given the seed.
MeasurementSeries run_chain(const RunParams& params);

// Canonical run file name: ising_L{L}_beta{beta:.6f}_seed{seed}.dat
std::string run_file_name(const RunParams& params);

// Text run file, format v1:
//   # ising-run v1
//   # L=<int> beta=<6 decimals> J=<decimal> seed=<uint32>
//   # measurements=<int> thermalization=<int>
//   # start=<ISO-8601 UTC> host=<string> version=<string>
//   # columns: S cluster_size
//   <S> <cluster_size>  (one line per measurement)
// Refuses to overwrite an existing file unless force is set. Returns the
// path written.
std::filesystem::path write_run_file(const MeasurementSeries& series,
                                     const std::filesystem::path& directory,
                                     bool force = false);

// Parses and fully validates a v1 run file; malformed headers, record count
// mismatches and invariant violations each get a distinct diagnostic.
MeasurementSeries read_run_file(const std::filesystem::path& path);

struct SweepPlan {
  std::vector<int> sizes;              // ascending, even, L/2 of each present
  std::vector<double> temperatures;    // units of J, ascending
  std::size_t measurements = 0;
  double coupling = 1.0;
  double thermalization_fraction = 0.10;
  std::uint64_t base_seed = 1;
  int threads = 1;
  bool force = false;                  // rerun points whose files exist
};

// Throws if the plan violates its invariants (sizes sorted ascending, every
// size except the smallest accompanied by its half, temperatures strictly
// increasing, ...).
void validate_plan(const SweepPlan& plan);

struct SweepPoint {
  int size;
  double temperature;
  double beta;          // canonical
  std::uint32_t seed;   // derive_seed(base_seed, size, temp_index)
  std::size_t temp_index;
};

// The (L, T) grid in deterministic order: sizes ascending, temperatures in
// plan order within each size.
std::vector<SweepPoint> plan_points(const SweepPlan& plan);

struct SweepOutcome {
  std::vector<std::filesystem::path> written;
  std::vector<std::filesystem::path> skipped;  // existing valid files
  std::vector<std::string> failures;           // "L=.. beta=..: reason"

  bool ok() const { return failures.empty(); }
  std::vector<std::filesystem::path> all_files() const;
};

// One chain per grid point, a run file per chain plus one sweep.log shared
// by the whole sweep. Existing valid files are skipped (resumable); invalid
// ones are regenerated. Point failures are logged and collected without
// aborting the remaining points. Results depend only on (plan, base_seed),
// never on scheduling.
SweepOutcome run_sweep(const SweepPlan& plan, const std::filesystem::path& directory);

// Reference single-threaded driver and the OpenMP driver it is checked
// against; run_sweep dispatches on plan.threads.
SweepOutcome run_sweep_serial(const SweepPlan& plan, const std::filesystem::path& directory);
SweepOutcome run_sweep_parallel(const SweepPlan& plan, const std::filesystem::path& directory);

}  // namespace ising
