#pragma once

#include <cmath>
#include <cstdint>

namespace breakdate {

// Philox4x32-10 counter-based generator (Salmon et al. 2011). A stream is
// addressed by (seed, stream); successive blocks come from incrementing the
// block counter. Streams are statistically independent, so parallel code can
// hand stream i to draw i (or replication i) and get results that do not
// depend on how work is split across workers.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        ctr0_(static_cast<std::uint32_t>(stream)),
        ctr1_(static_cast<std::uint32_t>(stream >> 32)) {}

  std::uint32_t next_u32() {
    if (have_ == 0) {
      fill();
    }
    return buf_[--have_];
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform on (0,1): 53-bit mantissa, offset so 0 is excluded.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

 private:
  static void round10(std::uint32_t c[4], std::uint32_t k0, std::uint32_t k1) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int r = 0; r < 10; ++r) {
      std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c[0];
      std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c[2];
      std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      std::uint32_t t0 = hi1 ^ c[1] ^ k0;
      std::uint32_t t2 = hi0 ^ c[3] ^ k1;
      c[0] = t0;
      c[1] = lo1;
      c[2] = t2;
      c[3] = lo0;
      k0 += W0;
      k1 += W1;
    }
  }

  void fill() {
    std::uint32_t c[4] = {ctr0_, ctr1_, block_lo_, block_hi_};
    round10(c, key0_, key1_);
    buf_[0] = c[0];
    buf_[1] = c[1];
    buf_[2] = c[2];
    buf_[3] = c[3];
    have_ = 4;
    if (++block_lo_ == 0) ++block_hi_;
  }

  std::uint32_t key0_, key1_;
  std::uint32_t ctr0_, ctr1_;
  std::uint32_t block_lo_ = 0, block_hi_ = 0;
  std::uint32_t buf_[4] = {0, 0, 0, 0};
  int have_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// SplitMix64 finalizer, used to derive per-replication seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + salt * 0x9E3779B97F4A7C15ull + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace breakdate
