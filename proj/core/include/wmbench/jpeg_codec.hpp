#pragma once

// Self-contained baseline JPEG codec for single-component (grayscale)
// images: sequential DCT, 8-bit precision, standard luminance quantization
// and Huffman tables, JFIF container. Both directions are implemented so
// the compression attack needs no external decoder.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "wmbench/types.hpp"

namespace wmbench {

// Quality-to-scale mapping used for quantization tables:
// scale = 5000 / q for q < 50, else 200 - 2 q  (q clamped to [1, 100]).
int jpeg_quality_scale(int quality);

// Standard luminance table scaled for `quality`, natural (row-major) order;
// entries are round(base * scale / 100) clamped to [1, 255].
std::array<int, 64> jpeg_quant_table(int quality);

// Encodes to a complete JFIF byte stream. Throws CodecError on bad input.
std::vector<uint8_t> jpeg_encode(const Work& image, int quality);

// Decodes a baseline single-component stream produced by jpeg_encode (or any
// equivalent grayscale baseline stream). Throws CodecError on malformed or
// unsupported input.
Work jpeg_decode(std::span<const uint8_t> stream);

}  // namespace wmbench
