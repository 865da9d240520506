// Benchmark comparing the serial reference sweep against the OpenMP one on
// an identical plan, plus raw single-chain update throughput per size.
// Usage: bench_sweep [measurements] [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "ising/engine.hpp"
#include "ising/lattice.hpp"
#include "ising/rng.hpp"
#include "ising/wolff.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double time_sweep(const ising::SweepPlan& plan, const std::filesystem::path& dir,
                  bool parallel) {
  std::filesystem::remove_all(dir);
  const auto start = std::chrono::steady_clock::now();
  const ising::SweepOutcome outcome = parallel ? ising::run_sweep_parallel(plan, dir)
                                               : ising::run_sweep_serial(plan, dir);
  const double elapsed = seconds_since(start);
  if (!outcome.ok()) {
    std::fprintf(stderr, "sweep failed (%zu failures)\n", outcome.failures.size());
    std::exit(1);
  }
  return elapsed;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t measurements = argc > 1 ? std::stoull(argv[1]) : 20000;
  const int threads = argc > 2 ? std::stoi(argv[2]) : 2;

  std::printf("single-chain update throughput near the critical point:\n");
  for (int size : {8, 16, 32, 64}) {
    ising::SpinConfig config(size, 1.0, true);
    ising::RandomStream rng(1);
    ising::WolffUpdater updater(config);
    const double beta = 0.4406868;
    for (int i = 0; i < 2000; ++i) updater.update(config, beta, rng);
    const int n = 50000;
    long long flipped = 0;
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < n; ++i) flipped += updater.update(config, beta, rng).cluster_size;
    const double elapsed = seconds_since(start);
    std::printf("  L=%3d  %8.0f updates/s  mean cluster %8.1f  %6.1f Msites/s\n", size,
                n / elapsed, static_cast<double>(flipped) / n,
                static_cast<double>(flipped) / elapsed / 1e6);
  }

  ising::SweepPlan plan;
  plan.sizes = {8, 16, 32};
  plan.temperatures = {2.22, 2.25, 2.28, 2.31};
  plan.measurements = measurements;
  plan.base_seed = 1;

  const std::filesystem::path dir = "bench_sweep_work";
  std::printf("\nsweep of %zu points, %zu measurements each:\n",
              plan.sizes.size() * plan.temperatures.size(), plan.measurements);

  plan.threads = 1;
  const double serial = time_sweep(plan, dir, /*parallel=*/false);
  std::printf("  serial reference: %7.2f s\n", serial);

  plan.threads = threads;
  const double parallel = time_sweep(plan, dir, /*parallel=*/true);
  std::printf("  OpenMP x%d:       %7.2f s  (speedup %.2f)\n", threads, parallel,
              serial / parallel);

  std::filesystem::remove_all(dir);
  return 0;
}
