#pragma once

// Deterministic random number generation and stable hashing.
//
// All randomness in the framework flows through DetRng, which wraps the
// fixed-algorithm std::mt19937_64 engine and implements its own bounded-int
// and Gaussian sampling. The std::uniform_int_distribution /
// std::normal_distribution adaptors are deliberately avoided: their output
// sequences are implementation-defined and would break byte-identical
// reproducibility across standard libraries.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace wmbench {

// FNV-1a 64-bit over a byte sequence, optionally chained via `basis`.
uint64_t fnv1a64(std::string_view bytes,
                 uint64_t basis = 0xcbf29ce484222325ull);
uint64_t fnv1a64(std::span<const uint8_t> bytes,
                 uint64_t basis = 0xcbf29ce484222325ull);

// Feeds the little-endian bytes of `value` into an FNV-1a chain.
uint64_t fnv1a64_u64(uint64_t value, uint64_t basis = 0xcbf29ce484222325ull);

// Stable two-input combiner used for seed derivation (cell seeds from the
// profile seed, per-stage seeds from the pipeline seed, ...).
uint64_t hash_combine(uint64_t seed, uint64_t value);
uint64_t hash_combine(uint64_t seed, std::string_view text);

// SipHash-2-4 with a 128-bit key, 64-bit result. Fixed, portable keyed hash.
uint64_t siphash24(uint64_t k0, uint64_t k1, std::span<const uint8_t> message);

class DetRng {
 public:
  explicit DetRng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, n), unbiased via rejection sampling. n must be > 0.
  uint64_t uniform_below(uint64_t n);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  // Gaussian via the Box-Muller transform (pairs generated eagerly, second
  // value cached), so the variate sequence is fully determined by the engine.
  double gaussian(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wmbench
