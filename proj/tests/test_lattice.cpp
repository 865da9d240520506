#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "ising/lattice.hpp"
#include "ising/rng.hpp"

using ising::SpinConfig;

namespace {

// checkerboard via flips of one sublattice
SpinConfig checkerboard(int size) {
  SpinConfig config(size, 1.0, true);
  std::vector<std::int32_t> odd_sites;
  for (int i = 0; i < size * size; ++i) {
    if ((i / size + i % size) % 2 == 1) odd_sites.push_back(i);
  }
  config.flip_sites(odd_sites);
  return config;
}

}  // namespace

TEST_CASE("uniform construction") {
  SpinConfig up(4, 1.0, true);
  CHECK(up.total_spin() == 16);
  CHECK(up.magnetization() == 1.0);

  SpinConfig down(8, 1.0, false);
  CHECK(down.total_spin() == -64);
  CHECK(down.magnetization() == -1.0);

  CHECK_THROWS_AS(SpinConfig(3, 1.0, true), std::invalid_argument);
  CHECK_THROWS_AS(SpinConfig(1, 1.0, true), std::invalid_argument);
  CHECK_THROWS_AS(SpinConfig(0, 1.0, true), std::invalid_argument);
  CHECK_THROWS_AS(SpinConfig(4, 0.0, true), std::invalid_argument);
}

TEST_CASE("energy of reference configurations") {
  SpinConfig up(4, 1.0, true);
  CHECK(up.energy() == -32.0);  // 2 L^2 = 32 bonds, all aligned

  CHECK(checkerboard(4).energy() == 32.0);

  SpinConfig one_flip(4, 1.0, true);
  one_flip.flip_sites(std::vector<std::int32_t>{5});
  CHECK(one_flip.energy() == -24.0);  // 4 bonds change sign, 2J each
  CHECK(one_flip.total_spin() == 14);
  CHECK(one_flip.magnetization() == doctest::Approx(0.875));

  // L = 2: the (right, down) convention keeps 2 L^2 = 8 bond terms, each
  // geometric pair counted twice
  SpinConfig tiny(2, 1.0, true);
  CHECK(tiny.energy() == -8.0);
}

TEST_CASE("energy scales with the coupling") {
  SpinConfig up(4, 2.5, true);
  CHECK(up.energy() == doctest::Approx(-80.0));
}

TEST_CASE("checkerboard has zero magnetization") {
  CHECK(checkerboard(4).total_spin() == 0);
  CHECK(checkerboard(4).magnetization() == 0.0);
}

TEST_CASE("neighbor order is right, left, down, up with periodic wrap") {
  SpinConfig config(4, 1.0, true);
  const auto& nb0 = config.neighbors(0);
  CHECK(nb0.right == 1);
  CHECK(nb0.left == 3);
  CHECK(nb0.down == 4);
  CHECK(nb0.up == 12);

  const auto& nb5 = config.neighbors(5);
  CHECK(nb5.right == 6);
  CHECK(nb5.left == 4);
  CHECK(nb5.down == 9);
  CHECK(nb5.up == 1);

  CHECK_THROWS_AS(config.neighbors(-1), std::out_of_range);
  CHECK_THROWS_AS(config.neighbors(16), std::out_of_range);
}

TEST_CASE("every site appears in exactly four neighbor lists") {
  SpinConfig config(6, 1.0, true);
  std::vector<int> appearances(36, 0);
  for (int i = 0; i < 36; ++i) {
    const auto& nb = config.neighbors(i);
    appearances[nb.right]++;
    appearances[nb.left]++;
    appearances[nb.down]++;
    appearances[nb.up]++;
  }
  for (int count : appearances) CHECK(count == 4);
}

TEST_CASE("flip_sites edge cases") {
  SpinConfig config(4, 1.0, true);

  config.flip_sites(std::vector<std::int32_t>{});
  CHECK(config.total_spin() == 16);

  // global flip: S negates, energy invariant
  std::vector<std::int32_t> all(16);
  for (int i = 0; i < 16; ++i) all[i] = i;
  config.flip_sites(all);
  CHECK(config.total_spin() == -16);
  CHECK(config.energy() == -32.0);

  CHECK_THROWS_AS(config.flip_sites(std::vector<std::int32_t>{1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(config.flip_sites(std::vector<std::int32_t>{16}), std::out_of_range);
  CHECK_THROWS_AS(config.flip_sites(std::vector<std::int32_t>{-1}), std::out_of_range);
}

TEST_CASE("incremental bookkeeping matches recomputation over random flips") {
  SpinConfig config(8, 1.0, true);
  ising::RandomStream rng(77);
  for (int round = 0; round < 200; ++round) {
    // a random subset of sites, no duplicates
    std::vector<std::int32_t> sites;
    for (int i = 0; i < 64; ++i) {
      if (rng.next_unit_real() < 0.3) sites.push_back(i);
    }
    config.flip_sites(sites);
    REQUIRE(config.total_spin() == config.recompute_total_spin());
    REQUIRE(config.bond_sum() == config.recompute_bond_sum());
    REQUIRE(config.energy() >= -2.0 * 64);
    REQUIRE(config.energy() <= 2.0 * 64);
    REQUIRE(std::abs(config.total_spin()) <= 64);
    REQUIRE(((config.total_spin() % 2) + 2) % 2 == 0);  // S parity matches L^2

    // global flip symmetry at an arbitrary configuration
    const double h = config.energy();
    const long long s = config.total_spin();
    std::vector<std::int32_t> all(64);
    for (int i = 0; i < 64; ++i) all[i] = i;
    config.flip_sites(all);
    REQUIRE(config.energy() == h);
    REQUIRE(config.total_spin() == -s);
    config.flip_sites(all);  // restore
  }
}
