#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace mvlab {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= std::uint64_t(static_cast<unsigned char>(c));
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Stream key for (master seed, role, index).
constexpr std::uint64_t derive_key(std::uint64_t master, std::string_view role, std::uint64_t index) noexcept {
  return mix64(mix64(master ^ fnv1a64(role)) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Counter-based generator: every draw is a pure function of
/// (key, a, b), so values never depend on evaluation order or thread count.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t bits(std::uint64_t a, std::uint64_t b) const noexcept {
    return mix64(key_ ^ mix64(a ^ mix64(b ^ 0xd1b54a32d192ed03ULL)));
  }

  /// Uniform in (0, 1).
  double uniform(std::uint64_t a, std::uint64_t b) const noexcept {
    return (double(bits(a, b) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on two independent counters.
  double normal(std::uint64_t a, std::uint64_t b) const noexcept {
    const double u1 = uniform(a, 2 * b);
    const double u2 = uniform(a, 2 * b + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
};

}  // namespace mvlab
