#include "wmbench/rng.hpp"

#include <cmath>
#include <numbers>

#include "wmbench/types.hpp"

namespace wmbench {

namespace {
constexpr uint64_t kFnvPrime = 0x100000001b3ull;
}

uint64_t fnv1a64(std::string_view bytes, uint64_t basis) {
  uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

uint64_t fnv1a64(std::span<const uint8_t> bytes, uint64_t basis) {
  uint64_t h = basis;
  for (uint8_t c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

uint64_t fnv1a64_u64(uint64_t value, uint64_t basis) {
  uint64_t h = basis;
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xff;
    h *= kFnvPrime;
  }
  return h;
}

uint64_t hash_combine(uint64_t seed, uint64_t value) {
  return fnv1a64_u64(value, fnv1a64_u64(seed));
}

uint64_t hash_combine(uint64_t seed, std::string_view text) {
  return fnv1a64(text, fnv1a64_u64(seed));
}

// --------------------------------------------------------------- SipHash --

namespace {

inline uint64_t rotl64(uint64_t x, int b) { return (x << b) | (x >> (64 - b)); }

inline void sipround(uint64_t& v0, uint64_t& v1, uint64_t& v2, uint64_t& v3) {
  v0 += v1;
  v1 = rotl64(v1, 13);
  v1 ^= v0;
  v0 = rotl64(v0, 32);
  v2 += v3;
  v3 = rotl64(v3, 16);
  v3 ^= v2;
  v0 += v3;
  v3 = rotl64(v3, 21);
  v3 ^= v0;
  v2 += v1;
  v1 = rotl64(v1, 17);
  v1 ^= v2;
  v2 = rotl64(v2, 32);
}

inline uint64_t load_le64(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t(p[i]) << (8 * i);
  return v;
}

}  // namespace

uint64_t siphash24(uint64_t k0, uint64_t k1, std::span<const uint8_t> msg) {
  uint64_t v0 = 0x736f6d6570736575ull ^ k0;
  uint64_t v1 = 0x646f72616e646f6dull ^ k1;
  uint64_t v2 = 0x6c7967656e657261ull ^ k0;
  uint64_t v3 = 0x7465646279746573ull ^ k1;

  const size_t n = msg.size();
  const size_t full = n / 8;
  for (size_t i = 0; i < full; ++i) {
    uint64_t m = load_le64(msg.data() + 8 * i);
    v3 ^= m;
    sipround(v0, v1, v2, v3);
    sipround(v0, v1, v2, v3);
    v0 ^= m;
  }

  uint64_t last = uint64_t(n & 0xff) << 56;
  for (size_t i = 0; i < (n & 7); ++i)
    last |= uint64_t(msg[full * 8 + i]) << (8 * i);
  v3 ^= last;
  sipround(v0, v1, v2, v3);
  sipround(v0, v1, v2, v3);
  v0 ^= last;

  v2 ^= 0xff;
  sipround(v0, v1, v2, v3);
  sipround(v0, v1, v2, v3);
  sipround(v0, v1, v2, v3);
  sipround(v0, v1, v2, v3);
  return v0 ^ v1 ^ v2 ^ v3;
}

// ---------------------------------------------------------------- DetRng --

uint64_t DetRng::uniform_below(uint64_t n) {
  if (n == 0) throw Error("uniform_below requires n > 0");
  // Reject values below 2^64 mod n so every residue is equally likely.
  const uint64_t threshold = (~n + 1) % n;  // == 2^64 mod n
  uint64_t x;
  do {
    x = engine_();
  } while (x < threshold);
  return x % n;
}

double DetRng::uniform01() {
  // 53 high bits -> uniform double in [0, 1).
  return double(engine_() >> 11) * 0x1.0p-53;
}

double DetRng::gaussian(double mean, double stddev) {
  if (have_spare_) {
    have_spare_ = false;
    return mean + stddev * spare_;
  }
  // u1 in (0, 1] so the log is finite; u2 in [0, 1).
  double u1 = 1.0 - uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double z0 = r * std::cos(2.0 * std::numbers::pi * u2);
  double z1 = r * std::sin(2.0 * std::numbers::pi * u2);
  spare_ = z1;
  have_spare_ = true;
  return mean + stddev * z0;
}

}  // namespace wmbench
