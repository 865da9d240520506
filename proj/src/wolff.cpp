#include "ising/wolff.hpp"

#include <cmath>
#include <stdexcept>

namespace ising {

double add_probability(double beta, double coupling) {
  if (beta < 0.0) throw std::invalid_argument("add_probability: beta must be >= 0");
  if (!(coupling > 0.0)) throw std::invalid_argument("add_probability: J must be > 0");
  return 1.0 - std::exp(-2.0 * beta * coupling);
}

WolffUpdater::WolffUpdater(const SpinConfig& config) {
  mark_.assign(static_cast<std::size_t>(config.num_sites()), 0);
  cluster_.reserve(static_cast<std::size_t>(config.num_sites()));
}

UpdateResult WolffUpdater::update(SpinConfig& config, double beta, RandomStream& rng) {
  const double p = add_probability(beta, config.coupling());
  const int n = config.num_sites();
  if (mark_.size() != static_cast<std::size_t>(n)) {
    mark_.assign(static_cast<std::size_t>(n), 0);
    generation_ = 0;
  }
  ++generation_;

  const auto seed_site =
      static_cast<std::int32_t>(rng.next_site_index(static_cast<std::uint32_t>(n)));
  const int cluster_spin = config.spin(seed_site);

  cluster_.clear();
  cluster_.push_back(seed_site);
  mark_[static_cast<std::size_t>(seed_site)] = generation_;

  for (std::size_t head = 0; head < cluster_.size(); ++head) {
    const auto& nb = config.neighbors(cluster_[head]);
    for (std::int32_t j : {nb.right, nb.left, nb.down, nb.up}) {
      if (mark_[static_cast<std::size_t>(j)] == generation_) continue;
      if (config.spin(j) != cluster_spin) continue;
      if (rng.next_unit_real() < p) {
        mark_[static_cast<std::size_t>(j)] = generation_;
        cluster_.push_back(j);
      }
    }
  }

  config.flip_sites(cluster_);
  return {static_cast<std::int32_t>(cluster_.size()), seed_site};
}

}  // namespace ising
