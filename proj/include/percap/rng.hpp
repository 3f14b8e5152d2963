#pragma once

// Counter-based random number streams. Every random decision in this library
// is a pure function of (master seed, replica index, stream tag, counter), so
// replicas can be re-run, split across workers, or queried out of order
// without changing any answer.

#include <array>
#include <cstdint>

namespace percap::rng {

struct Block {
  std::array<uint32_t, 4> w{};
};

// Philox 4x32 constants (Salmon et al., SC'11).
inline constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<uint32_t, 4>& ctr, uint32_t k0, uint32_t k1) {
  const uint64_t p0 = uint64_t(kPhiloxM0) * ctr[0];
  const uint64_t p1 = uint64_t(kPhiloxM1) * ctr[2];
  const uint32_t lo0 = uint32_t(p0), hi0 = uint32_t(p0 >> 32);
  const uint32_t lo1 = uint32_t(p1), hi1 = uint32_t(p1 >> 32);
  ctr[0] = hi1 ^ ctr[1] ^ k0;
  ctr[1] = lo1;
  ctr[2] = hi0 ^ ctr[3] ^ k1;
  ctr[3] = lo0;
}

// 10-round Philox block: bijective scramble of a 128-bit counter under a
// 64-bit key.
inline Block philox(Block b, uint64_t key) {
  uint32_t k0 = uint32_t(key);
  uint32_t k1 = uint32_t(key >> 32);
  for (int round = 0; round < 10; ++round) {
    philox_round(b.w, k0, k1);
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  return b;
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Accumulates a word stream into a 128-bit counter. Two independent
// multiply-xor lanes; the final Philox pass does the heavy scrambling.
struct Digest {
  uint64_t lo = 0x243F6A8885A308D3ull;
  uint64_t hi = 0x13198A2E03707344ull;

  void absorb(uint64_t w) {
    lo = (lo ^ w) * 0x9E3779B97F4A7C15ull;
    lo ^= lo >> 32;
    hi = (hi ^ (w + 0xA409938A7521C441ull)) * 0xC2B2AE3D27D4EB4Full;
    hi ^= hi >> 29;
  }

  Block counter() const {
    return Block{{uint32_t(lo), uint32_t(lo >> 32), uint32_t(hi), uint32_t(hi >> 32)}};
  }
};

// Stream identities. Distinct tags give statistically independent streams for
// the same (seed, replica).
enum class StreamTag : uint64_t {
  EdgeState = 0x01,
  Walk = 0x02,
  Derive = 0x03,
};

inline uint64_t stream_key(uint64_t master_seed, uint64_t replica, StreamTag tag) {
  uint64_t k = splitmix64(master_seed ^ 0x8BADF00D5EEDC0DEull);
  k = splitmix64(k ^ replica);
  k = splitmix64(k ^ (uint64_t(tag) << 56));
  return k;
}

inline uint64_t block_u64(const Block& b) {
  return (uint64_t(b.w[0]) << 32) | b.w[1];
}

// Uniform double in [0,1) with 53 random bits.
inline double unit_from_u64(uint64_t u) { return double(u >> 11) * 0x1.0p-53; }

// Keyed uniform for a digest-identified object (e.g. a lattice edge).
inline double keyed_unit(uint64_t key, const Digest& d) {
  return unit_from_u64(block_u64(philox(d.counter(), key)));
}

// Sequential stream: draws indexed 0,1,2,... under one key. One Philox block
// yields four 32-bit words; consecutive u64 draws use two words each.
class Sequence {
 public:
  explicit Sequence(uint64_t key) : key_(key) {}

  uint64_t next_u64() {
    if (pos_ >= 2) refill();
    const uint64_t hi = block_.w[2 * pos_];
    const uint64_t lo = block_.w[2 * pos_ + 1];
    ++pos_;
    return (hi << 32) | lo;
  }

  double next_unit() { return unit_from_u64(next_u64()); }

  // Uniform integer in [0, bound) via 64x64->128 multiply; the modulo-free
  // bias is below 2^-64 and irrelevant at Monte Carlo scale.
  uint64_t next_below(uint64_t bound) {
    const unsigned __int128 m = (unsigned __int128)next_u64() * bound;
    return uint64_t(m >> 64);
  }

 private:
  void refill() {
    Block ctr{{uint32_t(index_), uint32_t(index_ >> 32), 0x9E3779B9u, 0x7F4A7C15u}};
    block_ = philox(ctr, key_);
    ++index_;
    pos_ = 0;
  }

  uint64_t key_;
  uint64_t index_ = 0;
  int pos_ = 2;
  Block block_{};
};

}  // namespace percap::rng
