#pragma once

// Reference watermarking schemes. Both embed two watermarks per 8x8 block of
// a grayscale cover: an authentication part that localizes tampering and a
// restoration part (a coarse code of a distant partner block) that lets the
// receiver approximately rebuild tampered regions.
//
//  - rs-fragile-lsb: keyed-hash authentication bits and partner recovery
//    code stored in pixel LSBs. Fragile: any content change flips the hash.
//  - rs-semifragile-dct: keyed 8-bit signature of the low-frequency DCT
//    structure plus the recovery code embedded by scalar quantization index
//    modulation of mid-frequency DCT coefficients. Survives mild compression.
//
// Preconditions: covers must have dimensions >= 16 and multiples of 8, and a
// non-empty binary key string must be supplied (the benchmark controller
// derives one from the run seed when the profile does not set one).

#include <array>
#include <string_view>
#include <vector>

#include "wmbench/types.hpp"

namespace wmbench {

// Key-derived bijective block pairing with no fixed points. Where the grid
// size allows, a block and its partner differ by at least 2 block positions
// in every dimension (so local tampering rarely destroys both a block and
// its recovery data). Derived from a seeded shuffle with constraint-repair
// passes; falls back to a constraint-satisfying toroidal shift if the repair
// does not settle.
class BlockPartnerMap {
 public:
  static BlockPartnerMap derive(int blocks_w, int blocks_h,
                                std::string_view key);

  int block_count() const { return int(partner_.size()); }
  int blocks_w() const { return blocks_w_; }
  int blocks_h() const { return blocks_h_; }

  // Block whose pixels store the recovery code OF block `b`.
  int partner(int b) const { return partner_[size_t(b)]; }
  // Block whose recovery code is stored IN block `b` (inverse mapping).
  int source(int b) const { return source_[size_t(b)]; }

  // Required minimum per-dimension distance for this grid (for tests).
  static int required_distance(int blocks_in_dim);

 private:
  int blocks_w_ = 0;
  int blocks_h_ = 0;
  std::vector<int> partner_;
  std::vector<int> source_;
};

// Coarse 24-bit self-description of one 8x8 block: the four 4x4 quadrant
// means (top-left, top-right, bottom-left, bottom-right), each stored as the
// 6-bit value floor(mean / 4). Restoration paints each quadrant with
// 4 * code + 2, the midpoint of the encoded bucket.
std::array<uint8_t, 4> block_recovery_code(const Work& work, int bx, int by);

// Scheme entry points (contract: types.hpp). Neither scheme consumes
// external watermark payloads; both require a key.
SenderOutput rsf_embed(const Work& cover,
                       std::span<const WatermarkPayload> watermarks,
                       std::string_view key, const ParamMap& params);
ReceiverOutput rsf_receive(const Work& test,
                           std::span<const WatermarkPayload> watermarks,
                           std::string_view key, const ParamMap& params);
SenderOutput rssf_embed(const Work& cover,
                        std::span<const WatermarkPayload> watermarks,
                        std::string_view key, const ParamMap& params);
ReceiverOutput rssf_receive(const Work& test,
                            std::span<const WatermarkPayload> watermarks,
                            std::string_view key, const ParamMap& params);

SchemeDescriptor rsf_descriptor();
SchemeDescriptor rssf_descriptor();

}  // namespace wmbench
