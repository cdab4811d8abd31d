#include "rootdoa/rng.hpp"

#include <cmath>

namespace rootdoa {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = mix64(master + kGamma);
  h = mix64(h ^ (a + 2 * kGamma));
  h = mix64(h ^ (b + 3 * kGamma));
  return h;
}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double CounterRng::uniform() {
  // 53 random bits, shifted off zero so log() below stays finite.
  const std::uint64_t bits = next_u64() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

Complex CounterRng::complex_gaussian(double variance) {
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-variance * std::log(u1));
  const double angle = 2.0 * kPi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace rootdoa
