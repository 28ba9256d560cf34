#pragma once

// Counter-based splittable RNG. Every consumer derives its own stream from
// (seed, stream id), so per-node sampling order does not depend on which
// worker runs it or in what order.

#include <cmath>
#include <cstdint>
#include <vector>

namespace a3gnn {

constexpr std::uint64_t kGolden64 = 0x9e3779b97f4a7c15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t hash2(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b + kGolden64));
}

constexpr std::uint64_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return hash2(hash2(a, b), c);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(hash2(seed, stream)) {}

  RngStream substream(std::uint64_t id) const {
    RngStream s(0);
    s.key_ = hash2(key_, id ^ 0xd6e8feb86659fd93ull);
    return s;
  }

  std::uint64_t next_u64() {
    ++draws_;
    return mix64(key_ + (++counter_) * kGolden64);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint32_t next_below(std::uint32_t bound) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  bool next_bernoulli(double p) { return next_unit() < p; }

  // Box-Muller; two draws per sample, no caching, so draw counts stay simple.
  double next_gaussian() {
    double u1 = next_unit();
    double u2 = next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
  }

  // Fisher-Yates with our own draws; std::shuffle is implementation-defined.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = next_below(static_cast<std::uint32_t>(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Instrumentation hook: number of raw draws issued so far.
  std::uint64_t draws() const { return draws_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  std::uint64_t draws_ = 0;
};

}  // namespace a3gnn
