#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mimosel {

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Stream key for (seed, i, j, ...): each index is folded in through one
/// splitmix64 round, so distinct index tuples give unrelated streams.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> indices) noexcept;

/// mt19937_64 with its own uniform and normal transforms, so the sample
/// sequence is identical on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal via Box-Muller.
  double normal() noexcept;

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mimosel
