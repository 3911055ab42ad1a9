#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gfchan {

// splitmix64 finalizer, used to derive independent substreams from
// (master_seed, index) pairs. Path i of an experiment always draws from
// substream(master, i, purpose), so parallel and serial runs match.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(master ^ 0x6a09e667f3bcc909ULL) + mix64(a) + 0x9e3779b97f4a7c15ULL * b);
}

// Deterministic generator: mt19937_64 stream with an explicit Box-Muller
// normal transform (std::normal_distribution is not bit-specified).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  Rng(std::uint64_t master, std::uint64_t stream) : gen_(substream(master, stream)) {}

  // uniform on (0, 1]
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace gfchan
