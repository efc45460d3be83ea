#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace multisiam {

/// xoshiro256** seeded through splitmix64.
///
/// Every derived draw (uniform doubles, bounded integers, shuffles) is defined
/// here rather than delegated to <random> distributions, whose output is
/// implementation-specific, so a seed gives the same sequence on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;
  /// Uniform integer in [0, n); n must be positive. Rejection-sampled, unbiased.
  std::uint64_t below(std::uint64_t n) noexcept;

  /// Fisher-Yates, drawing from the back.
  template <typename T>
  void shuffle(std::vector<T>& items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Independent generator derived from this one's stream.
  SeededRng split() noexcept { return SeededRng(next_u64()); }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace multisiam
