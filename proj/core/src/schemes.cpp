#include "wmbench/schemes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "wmbench/dct.hpp"
#include "wmbench/rng.hpp"

namespace wmbench {

// ------------------------------------------------------ block partner map --

int BlockPartnerMap::required_distance(int blocks_in_dim) {
  if (blocks_in_dim >= 4) return 2;
  if (blocks_in_dim >= 2) return 1;
  return 0;
}

namespace {

bool partner_ok(int i, int t, int bw, int req_x, int req_y) {
  if (i == t) return false;
  int ix = i % bw, iy = i / bw;
  int tx = t % bw, ty = t / bw;
  return std::abs(ix - tx) >= req_x && std::abs(iy - ty) >= req_y;
}

}  // namespace

BlockPartnerMap BlockPartnerMap::derive(int blocks_w, int blocks_h,
                                        std::string_view key) {
  if (blocks_w <= 0 || blocks_h <= 0)
    throw SchemeError("partner map grid must be positive");
  const int n = blocks_w * blocks_h;
  if (n < 2)
    throw SchemeError("partner map needs at least two blocks");
  if (key.empty()) throw SchemeError("partner map requires a key");

  const int req_x = required_distance(blocks_w);
  const int req_y = required_distance(blocks_h);

  DetRng rng(fnv1a64(key, fnv1a64("partner-map")));

  // Seeded shuffle first.
  std::vector<int> perm(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) perm[size_t(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = int(rng.uniform_below(uint64_t(i + 1)));
    std::swap(perm[size_t(i)], perm[size_t(j)]);
  }

  auto ok = [&](int i, int t) {
    return partner_ok(i, t, blocks_w, req_x, req_y);
  };

  // Repair passes: swap the targets of violating entries with any entry for
  // which both resulting pairs satisfy the constraints.
  size_t previous_violations = size_t(n) + 1;
  for (int pass = 0; pass < 64; ++pass) {
    std::vector<int> violating;
    for (int i = 0; i < n; ++i)
      if (!ok(i, perm[size_t(i)])) violating.push_back(i);
    if (violating.empty()) break;
    if (violating.size() >= previous_violations) break;  // stuck
    previous_violations = violating.size();
    for (int i : violating) {
      if (ok(i, perm[size_t(i)])) continue;  // fixed by an earlier swap
      int start = int(rng.uniform_below(uint64_t(n)));
      for (int step = 0; step < n; ++step) {
        int j = (start + step) % n;
        if (j == i) continue;
        if (ok(i, perm[size_t(j)]) && ok(j, perm[size_t(i)])) {
          std::swap(perm[size_t(i)], perm[size_t(j)]);
          break;
        }
      }
    }
  }

  bool valid = true;
  for (int i = 0; i < n && valid; ++i) valid = ok(i, perm[size_t(i)]);

  if (!valid) {
    // Constraint-satisfying fallback for grids too small for the repair to
    // settle: a toroidal shift by the required distance in each dimension.
    int sx = std::min(req_x > 0 ? std::max(req_x, 1) : 0, blocks_w - 1);
    int sy = std::min(req_y > 0 ? std::max(req_y, 1) : 0, blocks_h - 1);
    if (sx == 0 && sy == 0) sy = blocks_h >= 2 ? 1 : 0;
    for (int i = 0; i < n; ++i) {
      int x = (i % blocks_w + sx) % blocks_w;
      int y = (i / blocks_w + sy) % blocks_h;
      perm[size_t(i)] = y * blocks_w + x;
    }
  }

  BlockPartnerMap map;
  map.blocks_w_ = blocks_w;
  map.blocks_h_ = blocks_h;
  map.partner_ = perm;
  map.source_.assign(size_t(n), 0);
  for (int i = 0; i < n; ++i) map.source_[size_t(map.partner_[size_t(i)])] = i;
  return map;
}

// ---------------------------------------------------------- recovery code --

std::array<uint8_t, 4> block_recovery_code(const Work& work, int bx, int by) {
  std::array<uint8_t, 4> code{};
  static constexpr int kQuadX[4] = {0, 4, 0, 4};
  static constexpr int kQuadY[4] = {0, 0, 4, 4};
  for (int q = 0; q < 4; ++q) {
    int sum = 0;
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x)
        sum += work.at(bx * 8 + kQuadX[q] + x, by * 8 + kQuadY[q] + y);
    // floor(mean / 4) with mean = sum / 16, i.e. floor(sum / 64): 6 bits.
    code[size_t(q)] = uint8_t(sum >> 6);
  }
  return code;
}

// ------------------------------------------------------------ common bits --

namespace {

constexpr int kRecoveryBits = 24;

struct BlockGrid {
  int bw = 0;
  int bh = 0;
  int count() const { return bw * bh; }
};

BlockGrid require_block_grid(const Work& work, const char* scheme) {
  if (!work.conforms_to_block_grid())
    throw SchemeError(std::string(scheme) +
                      " requires dimensions >= 16 and multiples of 8");
  return BlockGrid{work.width() / 8, work.height() / 8};
}

void require_key(std::string_view key, const char* scheme) {
  if (key.empty())
    throw SchemeError(std::string(scheme) + " requires a non-empty key");
  for (char c : key)
    if (c != '0' && c != '1')
      throw SchemeError(std::string(scheme) +
                        " key must be a binary string of 0/1 characters");
}

std::pair<uint64_t, uint64_t> derive_sip_keys(std::string_view tag,
                                              std::string_view key) {
  uint64_t k0 = fnv1a64(key, fnv1a64(tag, fnv1a64("k0")));
  uint64_t k1 = fnv1a64(key, fnv1a64(tag, fnv1a64("k1")));
  return {k0, k1};
}

void append_le32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(uint8_t(v & 0xff));
  out.push_back(uint8_t((v >> 8) & 0xff));
  out.push_back(uint8_t((v >> 16) & 0xff));
  out.push_back(uint8_t((v >> 24) & 0xff));
}

// 24 recovery bits in embedding order: quadrants 0..3, each 6-bit code MSB
// first.
std::array<uint8_t, kRecoveryBits> recovery_code_bits(
    const std::array<uint8_t, 4>& code) {
  std::array<uint8_t, kRecoveryBits> bits{};
  for (int q = 0; q < 4; ++q)
    for (int j = 0; j < 6; ++j)
      bits[size_t(q * 6 + j)] = uint8_t((code[size_t(q)] >> (5 - j)) & 1);
  return bits;
}

std::array<uint8_t, 4> recovery_code_from_bits(const uint8_t* bits) {
  std::array<uint8_t, 4> code{};
  for (int q = 0; q < 4; ++q) {
    int v = 0;
    for (int j = 0; j < 6; ++j) v = (v << 1) | (bits[q * 6 + j] & 1);
    code[size_t(q)] = uint8_t(v);
  }
  return code;
}

// Paints the quadrants of block b with the bucket midpoints of a code.
void paint_block_from_code(Work& work, int bx, int by,
                           const std::array<uint8_t, 4>& code) {
  static constexpr int kQuadX[4] = {0, 4, 0, 4};
  static constexpr int kQuadY[4] = {0, 0, 4, 4};
  for (int q = 0; q < 4; ++q) {
    uint8_t value = uint8_t(4 * code[size_t(q)] + 2);
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x)
        work.at(bx * 8 + kQuadX[q] + x, by * 8 + kQuadY[q] + y) = value;
  }
}

// Fills block b with the mean of its untampered 4-neighbors' mean values
// (128 when every neighbor is tampered or missing).
void paint_block_from_neighbors(Work& work, const Work& test,
                                const TamperMap& flags, int bx, int by) {
  static constexpr int kDx[4] = {-1, 1, 0, 0};
  static constexpr int kDy[4] = {0, 0, -1, 1};
  double total = 0;
  int used = 0;
  for (int d = 0; d < 4; ++d) {
    int nx = bx + kDx[d];
    int ny = by + kDy[d];
    if (nx < 0 || ny < 0 || nx >= flags.blocks_w || ny >= flags.blocks_h)
      continue;
    if (flags.at(nx, ny)) continue;
    int sum = 0;
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) sum += test.at(nx * 8 + x, ny * 8 + y);
    total += double(sum) / 64.0;
    ++used;
  }
  uint8_t value =
      used == 0 ? uint8_t(128)
                : uint8_t(std::clamp(std::lround(total / used), 0L, 255L));
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) work.at(bx * 8 + x, by * 8 + y) = value;
}

// Shared restoration walk: tampered blocks whose partner is intact are
// rebuilt from the partner-held recovery code; the rest fall back to the
// neighborhood fill.
Work restore_from_codes(
    const Work& test, const TamperMap& flags, const BlockPartnerMap& map,
    const std::vector<std::array<uint8_t, 4>>& stored_codes) {
  Work restored = test;
  const int bw = flags.blocks_w;
  std::vector<int> neighbor_fill;
  for (int b = 0; b < map.block_count(); ++b) {
    if (!flags.flags[size_t(b)]) continue;
    int holder = map.partner(b);
    if (!flags.flags[size_t(holder)]) {
      paint_block_from_code(restored, b % bw, b / bw,
                            stored_codes[size_t(holder)]);
    } else {
      neighbor_fill.push_back(b);
    }
  }
  for (int b : neighbor_fill)
    paint_block_from_neighbors(restored, test, flags, b % bw, b / bw);
  return restored;
}

std::vector<std::array<uint8_t, 4>> all_recovery_codes(const Work& work,
                                                       const BlockGrid& grid) {
  std::vector<std::array<uint8_t, 4>> codes(size_t(grid.count()));
  for (int by = 0; by < grid.bh; ++by)
    for (int bx = 0; bx < grid.bw; ++bx)
      codes[size_t(by * grid.bw + bx)] = block_recovery_code(work, bx, by);
  return codes;
}

// Builds the two standard payloads: authentication bits (per-block, fixed
// width) and restoration bits (24 per block, indexed by the block the code
// DESCRIBES, not the block that stores it).
std::vector<WatermarkPayload> standard_payloads(
    const std::vector<std::vector<uint8_t>>& auth_bits_per_block,
    const std::vector<std::array<uint8_t, 4>>& codes_by_block) {
  WatermarkPayload auth;
  auth.kind = WatermarkPayload::Kind::Authentication;
  std::vector<BitRange> auth_map;
  for (const auto& bits : auth_bits_per_block) {
    auth_map.push_back(
        {uint32_t(auth.bits.size()), uint32_t(bits.size())});
    auth.bits.insert(auth.bits.end(), bits.begin(), bits.end());
  }
  auth.block_map = std::move(auth_map);

  WatermarkPayload rest;
  rest.kind = WatermarkPayload::Kind::Restoration;
  std::vector<BitRange> rest_map;
  for (const auto& code : codes_by_block) {
    auto bits = recovery_code_bits(code);
    rest_map.push_back({uint32_t(rest.bits.size()), kRecoveryBits});
    rest.bits.insert(rest.bits.end(), bits.begin(), bits.end());
  }
  rest.block_map = std::move(rest_map);
  return {std::move(auth), std::move(rest)};
}

}  // namespace

// ------------------------------------------------------- fragile LSB (rsf) --

namespace {

constexpr int kMaxHashBits = 40;
constexpr int kHashSlotBase = 24;  // LSB slots 0..23 hold the recovery code

int rsf_hash_bits(const ParamMap& params) {
  int64_t bits = param_as_int(
      param_or_default(params, rsf_descriptor().params, "hash_bits"));
  if (bits < 8 || bits > kMaxHashBits)
    throw SchemeError("hash_bits out of range [8, 40]");
  return int(bits);
}

// Keyed block hash over the LSB-zeroed pixels, bound to the block position
// and image geometry so relocated content never verifies.
uint64_t rsf_block_hash(const Work& work, int bx, int by,
                        std::pair<uint64_t, uint64_t> keys) {
  std::vector<uint8_t> message;
  message.reserve(76);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      message.push_back(uint8_t(work.at(bx * 8 + x, by * 8 + y) & 0xfe));
  append_le32(message, uint32_t(by * (work.width() / 8) + bx));
  append_le32(message, uint32_t(work.width()));
  append_le32(message, uint32_t(work.height()));
  return siphash24(keys.first, keys.second, message);
}

// LSB slot s of block (bx, by) -> pixel coordinates, raster order.
inline std::pair<int, int> slot_pixel(int bx, int by, int s) {
  return {bx * 8 + s % 8, by * 8 + s / 8};
}

}  // namespace

SenderOutput rsf_embed(const Work& cover,
                       std::span<const WatermarkPayload> /*watermarks*/,
                       std::string_view key, const ParamMap& params) {
  const char* kName = "rs-fragile-lsb";
  BlockGrid grid = require_block_grid(cover, kName);
  require_key(key, kName);
  const int hash_bits = rsf_hash_bits(params);
  const auto sip = derive_sip_keys("auth-hash", key);
  const auto map = BlockPartnerMap::derive(grid.bw, grid.bh, key);
  const auto codes = all_recovery_codes(cover, grid);

  Work out = cover;
  std::vector<std::vector<uint8_t>> auth_bits(size_t(grid.count()));
  for (int by = 0; by < grid.bh; ++by) {
    for (int bx = 0; bx < grid.bw; ++bx) {
      int b = by * grid.bw + bx;
      // Recovery code of the block this one is partnered to hold.
      auto rec = recovery_code_bits(codes[size_t(map.source(b))]);
      for (int s = 0; s < kRecoveryBits; ++s) {
        auto [x, y] = slot_pixel(bx, by, s);
        out.at(x, y) = uint8_t((out.at(x, y) & 0xfe) | rec[size_t(s)]);
      }
      // Authentication hash over the LSB-zeroed content of this block.
      uint64_t h = rsf_block_hash(cover, bx, by, sip);
      auto& bits = auth_bits[size_t(b)];
      bits.resize(size_t(hash_bits));
      for (int j = 0; j < hash_bits; ++j) {
        bits[size_t(j)] = uint8_t((h >> j) & 1);
        auto [x, y] = slot_pixel(bx, by, kHashSlotBase + j);
        out.at(x, y) = uint8_t((out.at(x, y) & 0xfe) | bits[size_t(j)]);
      }
      // Unused trailing slots are zeroed so output is fully determined.
      for (int s = kHashSlotBase + hash_bits; s < 64; ++s) {
        auto [x, y] = slot_pixel(bx, by, s);
        out.at(x, y) = uint8_t(out.at(x, y) & 0xfe);
      }
    }
  }

  SenderOutput result;
  result.watermarked = std::move(out);
  result.embedded_watermarks = standard_payloads(auth_bits, codes);
  result.aux["auth_hash"] = "siphash-2-4";
  return result;
}

ReceiverOutput rsf_receive(const Work& test,
                           std::span<const WatermarkPayload> /*watermarks*/,
                           std::string_view key, const ParamMap& params) {
  const char* kName = "rs-fragile-lsb";
  BlockGrid grid = require_block_grid(test, kName);
  require_key(key, kName);
  const int hash_bits = rsf_hash_bits(params);
  const auto sip = derive_sip_keys("auth-hash", key);
  const auto map = BlockPartnerMap::derive(grid.bw, grid.bh, key);

  TamperMap flags(grid.bw, grid.bh);
  std::vector<std::vector<uint8_t>> auth_bits(size_t(grid.count()));
  std::vector<std::array<uint8_t, 4>> stored_codes(size_t(grid.count()));
  for (int by = 0; by < grid.bh; ++by) {
    for (int bx = 0; bx < grid.bw; ++bx) {
      int b = by * grid.bw + bx;
      uint8_t rec_bits[kRecoveryBits];
      for (int s = 0; s < kRecoveryBits; ++s) {
        auto [x, y] = slot_pixel(bx, by, s);
        rec_bits[s] = uint8_t(test.at(x, y) & 1);
      }
      stored_codes[size_t(b)] = recovery_code_from_bits(rec_bits);

      uint64_t h = rsf_block_hash(test, bx, by, sip);
      bool mismatch = false;
      auto& bits = auth_bits[size_t(b)];
      bits.resize(size_t(hash_bits));
      for (int j = 0; j < hash_bits; ++j) {
        auto [x, y] = slot_pixel(bx, by, kHashSlotBase + j);
        bits[size_t(j)] = uint8_t(test.at(x, y) & 1);
        if (bits[size_t(j)] != uint8_t((h >> j) & 1)) mismatch = true;
      }
      flags.set(bx, by, mismatch);
    }
  }

  ReceiverOutput result;
  result.restored = restore_from_codes(test, flags, map, stored_codes);
  // Report the codes by the block they describe, like the embedded payload.
  std::vector<std::array<uint8_t, 4>> codes_by_block(size_t(grid.count()));
  for (int b = 0; b < grid.count(); ++b)
    codes_by_block[size_t(b)] = stored_codes[size_t(map.partner(b))];
  result.extracted_watermarks = standard_payloads(auth_bits, codes_by_block);
  result.aux["flagged_blocks"] = std::to_string(flags.count_tampered());
  result.global_decision = flags.count_tampered() == 0;
  result.decision_map = std::move(flags);
  return result;
}

// -------------------------------------------------- semi-fragile QIM (rssf) --

namespace {

constexpr int kSigBits = 8;
constexpr int kSigQimBase = 10;   // zig-zag positions 10..17 carry the signature
constexpr int kRecQimBase = 18;   // zig-zag positions 18..41 carry the code
constexpr int kMaxEmbedIterations = 32;
// Minimum |.|-difference enforced between signature coefficient pairs so the
// comparison survives integer rounding and mild requantization.
constexpr double kSigMargin = 2.5;

// Zig-zag index pairs compared (by magnitude) to form the 8 signature bits.
constexpr int kSigPairs[kSigBits][2] = {{1, 2}, {3, 4}, {5, 6}, {7, 8},
                                        {2, 3}, {4, 5}, {6, 7}, {1, 9}};

int rssf_delta(const ParamMap& params) {
  int64_t delta = param_as_int(
      param_or_default(params, rssf_descriptor().params, "delta"));
  if (delta < 4 || delta > 40)
    throw SchemeError("delta out of range [4, 40]");
  return int(delta);
}

// Per-block keyed 8-bit mask XOR-ed onto the signature before embedding.
// Binding the embedded bits to the block position this way makes relocated
// (copy-pasted) content detectable even though it is internally consistent.
uint8_t sig_mask(std::pair<uint64_t, uint64_t> keys, int block_index) {
  std::vector<uint8_t> message;
  append_le32(message, uint32_t(block_index));
  return uint8_t(siphash24(keys.first, keys.second, message) & 0xff);
}

uint8_t signature_of(const double coefs[64]) {
  uint8_t sig = 0;
  for (int k = 0; k < kSigBits; ++k) {
    double a = std::fabs(coefs[kZigzagToNatural[size_t(kSigPairs[k][0])]]);
    double b = std::fabs(coefs[kZigzagToNatural[size_t(kSigPairs[k][1])]]);
    if (a >= b) sig |= uint8_t(1 << k);
  }
  return sig;
}

double qim_round(double x) { return std::floor(x + 0.5); }

// Quantization index modulation: move c to the nearest multiple of `step`
// whose index parity equals `bit`.
double qim_embed(double c, int bit, double step) {
  return 2.0 * step * qim_round((c - bit * step) / (2.0 * step)) +
         bit * step;
}

int qim_decode(double c, double step) {
  long long k = (long long)(qim_round(c / step));
  return int(((k % 2) + 2) % 2);
}

// Pushes signature pairs apart until each comparison holds with margin, so
// the signature survives the IDCT rounding of the embedding itself.
void enforce_sig_margin(double coefs[64], uint8_t sig) {
  for (int k = 0; k < kSigBits; ++k) {
    int ni = kZigzagToNatural[size_t(kSigPairs[k][0])];
    int nj = kZigzagToNatural[size_t(kSigPairs[k][1])];
    double ai = std::fabs(coefs[ni]);
    double aj = std::fabs(coefs[nj]);
    bool bit = (sig >> k) & 1;
    if (bit && ai < aj + kSigMargin) {
      double sign = coefs[ni] < 0 ? -1.0 : 1.0;
      coefs[ni] = sign * (aj + kSigMargin);
    } else if (!bit && aj < ai + kSigMargin) {
      double sign = coefs[nj] < 0 ? -1.0 : 1.0;
      coefs[nj] = sign * (ai + kSigMargin);
    }
  }
}

struct QimBlockPlan {
  uint8_t masked_sig = 0;
  std::array<uint8_t, kRecoveryBits> rec_bits{};
};

void load_block(const Work& work, int bx, int by, double out[64]) {
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      out[y * 8 + x] = double(work.at(bx * 8 + x, by * 8 + y));
}

void store_block(Work& work, int bx, int by, const double in[64]) {
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      long v = std::lround(in[y * 8 + x]);
      work.at(bx * 8 + x, by * 8 + y) = uint8_t(std::clamp(v, 0L, 255L));
    }
}

}  // namespace

SenderOutput rssf_embed(const Work& cover,
                        std::span<const WatermarkPayload> /*watermarks*/,
                        std::string_view key, const ParamMap& params) {
  const char* kName = "rs-semifragile-dct";
  BlockGrid grid = require_block_grid(cover, kName);
  require_key(key, kName);
  const double delta = double(rssf_delta(params));
  const double rec_step = delta / 2.0;
  const auto sip = derive_sip_keys("sig-mask", key);
  const auto map = BlockPartnerMap::derive(grid.bw, grid.bh, key);
  const auto codes = all_recovery_codes(cover, grid);

  Work out = cover;
  std::vector<std::vector<uint8_t>> auth_bits(size_t(grid.count()));
  int unconverged = 0;

  double pixels[64], coefs[64], rebuilt[64];
  for (int by = 0; by < grid.bh; ++by) {
    for (int bx = 0; bx < grid.bw; ++bx) {
      int b = by * grid.bw + bx;
      QimBlockPlan plan;
      plan.rec_bits = recovery_code_bits(codes[size_t(map.source(b))]);
      const uint8_t mask = sig_mask(sip, b);

      load_block(cover, bx, by, pixels);
      bool converged = false;
      // The embedded signature must describe the block as it finally ends up
      // on disk (integers, clamped). Iterate to a fixed point: derive the
      // signature, embed, round, and accept only if the rounded block still
      // yields the same signature and decodes to the intended bits.
      for (int iter = 0; iter < kMaxEmbedIterations && !converged; ++iter) {
        dct8x8_forward(pixels, coefs);
        uint8_t sig = signature_of(coefs);
        plan.masked_sig = uint8_t(sig ^ mask);
        enforce_sig_margin(coefs, sig);
        for (int k = 0; k < kSigBits; ++k) {
          int ni = kZigzagToNatural[size_t(kSigQimBase + k)];
          coefs[ni] = qim_embed(coefs[ni], (plan.masked_sig >> k) & 1, delta);
        }
        for (int k = 0; k < kRecoveryBits; ++k) {
          int ni = kZigzagToNatural[size_t(kRecQimBase + k)];
          coefs[ni] = qim_embed(coefs[ni], plan.rec_bits[size_t(k)], rec_step);
        }
        dct8x8_inverse(coefs, pixels);
        for (double& p : pixels) p = std::clamp(qim_round(p), 0.0, 255.0);

        // Verify against the integer block exactly as a receiver would.
        dct8x8_forward(pixels, rebuilt);
        converged = signature_of(rebuilt) == sig;
        for (int k = 0; k < kSigBits && converged; ++k) {
          int ni = kZigzagToNatural[size_t(kSigQimBase + k)];
          converged = qim_decode(rebuilt[ni], delta) ==
                      ((plan.masked_sig >> k) & 1);
        }
        for (int k = 0; k < kRecoveryBits && converged; ++k) {
          int ni = kZigzagToNatural[size_t(kRecQimBase + k)];
          converged = qim_decode(rebuilt[ni], rec_step) ==
                      plan.rec_bits[size_t(k)];
        }
      }
      if (!converged) ++unconverged;
      store_block(out, bx, by, pixels);

      auto& bits = auth_bits[size_t(b)];
      bits.resize(kSigBits);
      for (int k = 0; k < kSigBits; ++k)
        bits[size_t(k)] = uint8_t((plan.masked_sig >> k) & 1);
    }
  }

  SenderOutput result;
  result.watermarked = std::move(out);
  result.embedded_watermarks = standard_payloads(auth_bits, codes);
  result.aux["sig_mask_hash"] = "siphash-2-4";
  result.aux["qim_unconverged_blocks"] = std::to_string(unconverged);
  return result;
}

ReceiverOutput rssf_receive(const Work& test,
                            std::span<const WatermarkPayload> /*watermarks*/,
                            std::string_view key, const ParamMap& params) {
  const char* kName = "rs-semifragile-dct";
  BlockGrid grid = require_block_grid(test, kName);
  require_key(key, kName);
  const double delta = double(rssf_delta(params));
  const double rec_step = delta / 2.0;
  const auto sip = derive_sip_keys("sig-mask", key);
  const auto map = BlockPartnerMap::derive(grid.bw, grid.bh, key);

  TamperMap flags(grid.bw, grid.bh);
  std::vector<std::vector<uint8_t>> auth_bits(size_t(grid.count()));
  std::vector<std::array<uint8_t, 4>> stored_codes(size_t(grid.count()));

  double pixels[64], coefs[64];
  for (int by = 0; by < grid.bh; ++by) {
    for (int bx = 0; bx < grid.bw; ++bx) {
      int b = by * grid.bw + bx;
      load_block(test, bx, by, pixels);
      dct8x8_forward(pixels, coefs);

      uint8_t derived = uint8_t(signature_of(coefs) ^ sig_mask(sip, b));
      uint8_t extracted = 0;
      auto& bits = auth_bits[size_t(b)];
      bits.resize(kSigBits);
      for (int k = 0; k < kSigBits; ++k) {
        int ni = kZigzagToNatural[size_t(kSigQimBase + k)];
        int bit = qim_decode(coefs[ni], delta);
        extracted |= uint8_t(bit << k);
        bits[size_t(k)] = uint8_t(bit);
      }
      // Semi-fragile decision: tolerate a single flipped signature bit.
      int hamming = std::popcount(unsigned(derived ^ extracted));
      flags.set(bx, by, hamming > 1);

      uint8_t rec_bits[kRecoveryBits];
      for (int k = 0; k < kRecoveryBits; ++k) {
        int ni = kZigzagToNatural[size_t(kRecQimBase + k)];
        rec_bits[k] = uint8_t(qim_decode(coefs[ni], rec_step));
      }
      stored_codes[size_t(b)] = recovery_code_from_bits(rec_bits);
    }
  }

  ReceiverOutput result;
  result.restored = restore_from_codes(test, flags, map, stored_codes);
  std::vector<std::array<uint8_t, 4>> codes_by_block(size_t(grid.count()));
  for (int b = 0; b < grid.count(); ++b)
    codes_by_block[size_t(b)] = stored_codes[size_t(map.partner(b))];
  result.extracted_watermarks = standard_payloads(auth_bits, codes_by_block);
  result.aux["flagged_blocks"] = std::to_string(flags.count_tampered());
  result.global_decision = flags.count_tampered() == 0;
  result.decision_map = std::move(flags);
  return result;
}

// ------------------------------------------------------------ descriptors --

SchemeDescriptor rsf_descriptor() {
  SchemeDescriptor d;
  d.id = "rs-fragile-lsb";
  d.display_name = "Fragile LSB scheme with self-restoration";
  d.notes =
      "Per 8x8 block: keyed SipHash-2-4 over the LSB-zeroed pixels (bound to "
      "block position and image size), truncated to hash_bits and stored in "
      "pixel LSBs together with the 24-bit quadrant-mean recovery code of a "
      "key-derived partner block.";
  ParamSpec hash_bits;
  hash_bits.name = "hash_bits";
  hash_bits.type = ParamType::Integer;
  hash_bits.min_value = 8;
  hash_bits.max_value = 40;
  hash_bits.default_value = int64_t(40);
  d.params.push_back(std::move(hash_bits));
  d.capabilities.produces_decision_map = true;
  d.capabilities.produces_restored = true;
  d.capabilities.requires_external_watermark = false;
  d.capabilities.requires_key = true;
  return d;
}

SchemeDescriptor rssf_descriptor() {
  SchemeDescriptor d;
  d.id = "rs-semifragile-dct";
  d.display_name = "Semi-fragile DCT QIM scheme with self-restoration";
  d.notes =
      "Per 8x8 block: an 8-bit magnitude-order signature of low-frequency "
      "DCT coefficients, XOR-masked with a keyed per-block SipHash-2-4 "
      "value, QIM-embedded at zig-zag 10..17 with step delta; the partner "
      "block's 24-bit recovery code is QIM-embedded at 18..41 with step "
      "delta/2. A block is flagged when more than one signature bit "
      "disagrees.";
  ParamSpec delta;
  delta.name = "delta";
  delta.type = ParamType::Integer;
  delta.min_value = 4;
  delta.max_value = 40;
  delta.default_value = int64_t(12);
  d.params.push_back(std::move(delta));
  d.capabilities.produces_decision_map = true;
  d.capabilities.produces_restored = true;
  d.capabilities.requires_external_watermark = false;
  d.capabilities.requires_key = true;
  return d;
}

}  // namespace wmbench
