#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

// Deterministic randomness utilities. Everything here is a pure function of
// its inputs, so simulated-oracle draws and episode logs reproduce bit-exactly
// across runs and platforms. std::random distributions are avoided on purpose
// (their output is implementation-defined).

namespace commcp {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Order-sensitive accumulator for building seeds out of heterogeneous keys.
class HashKey {
 public:
  explicit HashKey(std::uint64_t seed = 0) : state_(splitmix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

  HashKey& add(std::uint64_t v) {
    state_ = splitmix64(state_ ^ v);
    return *this;
  }
  HashKey& add(std::int64_t v) { return add(static_cast<std::uint64_t>(v)); }
  HashKey& add(int v) { return add(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
  HashKey& add(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return add(h);
  }

  std::uint64_t value() const { return splitmix64(state_); }

 private:
  std::uint64_t state_;
};

// Uniform double in [0, 1) from 53 high bits.
inline double hash_u01(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller on two derived uniforms.
inline double hash_gauss(std::uint64_t h) {
  double u1 = hash_u01(splitmix64(h ^ 0x9e3779b97f4a7c15ULL));
  double u2 = hash_u01(splitmix64(h ^ 0x3c6ef372fe94f82aULL));
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Small counter-based generator for simulation choices (goal tie-breaks,
// scenario synthesis). Deterministic for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64(state_);
  }

  // Uniform in [0, n). Modulo bias is ~n/2^64, irrelevant at simulation scale.
  std::uint64_t next_below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

  int next_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  double next_u01() { return hash_u01(next_u64()); }

  double next_gauss() {
    double u1 = next_u01();
    double u2 = next_u01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  bool next_bool(double p_true) { return next_u01() < p_true; }

 private:
  std::uint64_t state_;
};

}  // namespace commcp
