#include "ising/lattice.hpp"

#include <stdexcept>
#include <string>

namespace ising {

SpinConfig::SpinConfig(int size, double coupling, bool up)
    : size_(size), coupling_(coupling) {
  if (size < 2 || size % 2 != 0) {
    throw std::invalid_argument("SpinConfig: L must be even and >= 2, got " +
                                std::to_string(size));
  }
  if (!(coupling > 0.0)) {
    throw std::invalid_argument("SpinConfig: coupling J must be positive");
  }
  const int n = size * size;
  spins_.assign(static_cast<std::size_t>(n), up ? std::int8_t{1} : std::int8_t{-1});
  total_spin_ = up ? n : -n;

  neighbors_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int row = i / size;
    const int col = i % size;
    neighbors_[static_cast<std::size_t>(i)] = {
        row * size + (col + 1) % size,
        row * size + (col + size - 1) % size,
        ((row + 1) % size) * size + col,
        ((row + size - 1) % size) * size + col,
    };
  }
  bond_sum_ = recompute_bond_sum();
  stamp_.assign(static_cast<std::size_t>(n), 0);
}

const SpinConfig::Neighbors& SpinConfig::neighbors(int site) const {
  if (site < 0 || site >= num_sites()) {
    throw std::out_of_range("SpinConfig::neighbors: site " + std::to_string(site) +
                            " out of range for L=" + std::to_string(size_));
  }
  return neighbors_[static_cast<std::size_t>(site)];
}

void SpinConfig::flip_sites(std::span<const std::int32_t> sites) {
  const int n = num_sites();
  ++stamp_generation_;
  for (std::int32_t site : sites) {
    if (site < 0 || site >= n) {
      throw std::out_of_range("flip_sites: site " + std::to_string(site) +
                              " out of range");
    }
    if (stamp_[static_cast<std::size_t>(site)] == stamp_generation_) {
      throw std::invalid_argument("flip_sites: duplicate site " +
                                  std::to_string(site));
    }
    stamp_[static_cast<std::size_t>(site)] = stamp_generation_;
  }
  for (std::int32_t site : sites) {
    const auto& nb = neighbors_[static_cast<std::size_t>(site)];
    const int s = spins_[static_cast<std::size_t>(site)];
    const int around = spins_[static_cast<std::size_t>(nb.right)] +
                       spins_[static_cast<std::size_t>(nb.left)] +
                       spins_[static_cast<std::size_t>(nb.down)] +
                       spins_[static_cast<std::size_t>(nb.up)];
    bond_sum_ -= 2LL * s * around;
    total_spin_ -= 2LL * s;
    spins_[static_cast<std::size_t>(site)] = static_cast<std::int8_t>(-s);
  }
}

long long SpinConfig::recompute_total_spin() const {
  long long sum = 0;
  for (std::int8_t s : spins_) sum += s;
  return sum;
}

long long SpinConfig::recompute_bond_sum() const {
  long long sum = 0;
  const int n = num_sites();
  for (int i = 0; i < n; ++i) {
    const auto& nb = neighbors_[static_cast<std::size_t>(i)];
    sum += static_cast<long long>(spins_[static_cast<std::size_t>(i)]) *
           (spins_[static_cast<std::size_t>(nb.right)] +
            spins_[static_cast<std::size_t>(nb.down)]);
  }
  return sum;
}

}  // namespace ising
