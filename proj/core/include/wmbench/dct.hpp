#pragma once

// Orthonormal 8x8 type-II DCT (and inverse) plus the JPEG zig-zag scan
// order. Shared by the compression codec and the semi-fragile scheme.
//
// The transform is orthonormal: Parseval holds, so coefficient-domain
// distortion equals pixel-domain distortion, and the coefficient units match
// the usual JPEG quantization-table units.

#include <array>

namespace wmbench {

// zigzag index -> natural (row-major) index within an 8x8 block.
extern const std::array<int, 64> kZigzagToNatural;

// Forward: out[u*8+v] from in[y*8+x]. Inverse is its exact transpose chain.
void dct8x8_forward(const double in[64], double out[64]);
void dct8x8_inverse(const double in[64], double out[64]);

}  // namespace wmbench
