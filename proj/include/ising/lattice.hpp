#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ising {

// Spin configuration on an L x L periodic square lattice, sites row-major.
// Total spin and the bond sum are cached and maintained incrementally;
// flip_sites keeps them exact (integer arithmetic throughout).
//
// Energy convention: H = -J * bond_sum with
//   bond_sum = sum_i s_i * (s_right(i) + s_down(i)),
// i.e. 2 L^2 bond terms, each counted once via the (right, down) offsets.
// For L = 2 the right and left neighbors coincide, so each geometric pair
// contributes twice; any exact cross-check must use the same convention.
class SpinConfig {
 public:
  struct Neighbors {
    std::int32_t right, left, down, up;
  };

  // Uniform initial configuration, all spins +1 (up) or -1. L must be even
  // and at least 2; the analysis pairs sizes L and L/2.
  SpinConfig(int size, double coupling, bool up);

  int size() const { return size_; }
  int num_sites() const { return size_ * size_; }
  double coupling() const { return coupling_; }

  int spin(int site) const { return spins_[static_cast<std::size_t>(site)]; }
  std::span<const std::int8_t> spins() const { return spins_; }

  long long total_spin() const { return total_spin_; }
  long long bond_sum() const { return bond_sum_; }

  double energy() const { return -coupling_ * static_cast<double>(bond_sum_); }
  double magnetization() const {
    return static_cast<double>(total_spin_) / num_sites();
  }

  // Neighbor sites in fixed (right, left, down, up) order under periodic
  // wrap. Throws on an out-of-range site.
  const Neighbors& neighbors(int site) const;

  // Negates the listed spins. Indices must be in range and free of
  // duplicates; the call validates before mutating anything.
  void flip_sites(std::span<const std::int32_t> sites);

  // O(L^2) recomputations used to validate the incremental bookkeeping.
  long long recompute_total_spin() const;
  long long recompute_bond_sum() const;

 private:
  int size_;
  double coupling_;
  std::vector<std::int8_t> spins_;
  std::vector<Neighbors> neighbors_;
  long long total_spin_;
  long long bond_sum_;
  // generation-stamped scratch for duplicate detection in flip_sites
  mutable std::vector<std::uint64_t> stamp_;
  mutable std::uint64_t stamp_generation_ = 0;
};

}  // namespace ising
