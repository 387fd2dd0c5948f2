#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <utility>
#include <vector>

namespace mcd {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic seed derivation. Every independent random stream in the
// simulator is keyed by (master seed, tag...) through this chain, so results
// never depend on scheduling or worker count.
template <typename... Tags>
uint64_t derive_seed(uint64_t base, Tags... tags) {
  uint64_t s = base;
  uint64_t h = splitmix64(s);
  ((s = h ^ static_cast<uint64_t>(tags), h = splitmix64(s)), ...);
  return h;
}

// Seed-domain tags, one per consumer.
namespace seed_tag {
inline constexpr uint64_t diffusion = 0xd1f5;
inline constexpr uint64_t channel = 0xc4a1;
inline constexpr uint64_t ldpc = 0x1d9c;
inline constexpr uint64_t interleaver = 0x17e4;
inline constexpr uint64_t frame = 0xf4a3;
inline constexpr uint64_t message = 0x3e55;
}  // namespace seed_tag

class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  uint64_t operator()() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in [0,1)
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // uniform in (0,1], safe as a log() argument
  double uniform_pos() {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

 private:
  static constexpr uint64_t rotl(uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  uint64_t s_[4];
};

namespace detail {

// Marsaglia-Tsang ziggurat tables for the standard normal, 128 layers.
struct ZigguratTables {
  uint32_t kn[128];
  double wn[128];
  double fn[128];

  ZigguratTables() {
    const double m1 = 2147483648.0;
    double dn = 3.442619855899;
    double tn = dn;
    const double vn = 9.91256303526217e-3;

    double q = vn / std::exp(-0.5 * dn * dn);
    kn[0] = static_cast<uint32_t>((dn / q) * m1);
    kn[1] = 0;
    wn[0] = q / m1;
    wn[127] = dn / m1;
    fn[0] = 1.0;
    fn[127] = std::exp(-0.5 * dn * dn);
    for (int i = 126; i >= 1; i--) {
      dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
      kn[i + 1] = static_cast<uint32_t>((dn / tn) * m1);
      tn = dn;
      fn[i] = std::exp(-0.5 * dn * dn);
      wn[i] = dn / m1;
    }
  }
};

inline const ZigguratTables& ziggurat_tables() {
  static const ZigguratTables tables;
  return tables;
}

}  // namespace detail

// Standard normal draw. Hot path is one 64-bit draw plus one multiply.
inline double normal(Xoshiro256pp& rng) {
  const auto& zt = detail::ziggurat_tables();
  for (;;) {
    const uint64_t u = rng();
    const int32_t hz = static_cast<int32_t>(u >> 32);
    const int iz = static_cast<int>(u & 127);
    if (static_cast<uint32_t>(std::abs(static_cast<int64_t>(hz))) < zt.kn[iz])
      return hz * zt.wn[iz];

    // rare path: base strip tail or wedge acceptance test
    const double r = 3.442619855899;
    double x = hz * zt.wn[iz];
    if (iz == 0) {
      double y;
      do {
        x = -std::log(rng.uniform_pos()) * (1.0 / r);
        y = -std::log(rng.uniform_pos());
      } while (y + y < x * x);
      return (hz > 0) ? r + x : -r - x;
    }
    if (zt.fn[iz] + rng.uniform() * (zt.fn[iz - 1] - zt.fn[iz]) <
        std::exp(-0.5 * x * x))
      return x;
  }
}

inline double normal(Xoshiro256pp& rng, double mean, double stddev) {
  return mean + stddev * normal(rng);
}

// uniform integer in [0, n), n >= 1
inline uint64_t bounded(Xoshiro256pp& rng, uint64_t n) {
  return static_cast<uint64_t>(
      (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

template <typename T>
void shuffle(std::vector<T>& v, Xoshiro256pp& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(bounded(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace mcd
