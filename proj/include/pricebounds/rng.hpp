#pragma once

#include <cstddef>
#include <cstdint>

namespace pricebounds {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Child seed for an independent stream identified by `tag` under `parent`.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) noexcept;

/// Counter-based generator: the k-th draw is mix64(key + k * golden), so a
/// stream is fully described by its key and produces identical bits on every
/// platform. Normal deviates use Box-Muller so we do not depend on the
/// standard library's unspecified distribution algorithms.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;

  /// Uniform integer on [0, n). n must be positive.
  std::size_t index(std::size_t n) noexcept;

  double normal() noexcept;
  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pricebounds
