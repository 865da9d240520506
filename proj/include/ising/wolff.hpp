#pragma once

#include <cstdint>
#include <vector>

#include "ising/lattice.hpp"
#include "ising/rng.hpp"

namespace ising {

struct UpdateResult {
  std::int32_t cluster_size;  // number of flipped sites, 1 <= size <= L^2
  std::int32_t seed_site;
};

// Bond activation probability 1 - exp(-2 beta J).
double add_probability(double beta, double coupling);

// Single-cluster update: pick a uniform seed site, grow a cluster of aligned
// spins breadth-first (FIFO frontier, neighbors visited in right, left,
// down, up order), adding each aligned unvisited neighbor with the bond
// probability, then flip the whole cluster. One unit-real draw per tested
// bond, acceptance iff draw < p, so the RNG sequence of an update is fully
// determined by the configuration and the seed.
//
// Visited marks use a generation counter so repeated updates do no O(L^2)
// clearing; scratch buffers live here and are reused across calls.
class WolffUpdater {
 public:
  explicit WolffUpdater(const SpinConfig& config);

  UpdateResult update(SpinConfig& config, double beta, RandomStream& rng);

 private:
  std::vector<std::uint64_t> mark_;
  std::uint64_t generation_ = 0;
  std::vector<std::int32_t> cluster_;  // doubles as the BFS queue
};

}  // namespace ising
