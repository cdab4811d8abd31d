#pragma once

#include <cstdint>

#include "rootdoa/common.hpp"

namespace rootdoa {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

/// Combines a master seed with stream coordinates into an independent key.
/// The result depends only on the arguments, never on call order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

/// Counter-based generator: the n-th draw is mix64(key + n * golden gamma).
/// Gaussian draws use Box-Muller so the stream is identical on every
/// platform and standard library.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double uniform();

  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  Complex complex_gaussian(double variance);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rootdoa
