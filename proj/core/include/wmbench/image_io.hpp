#pragma once

// Minimal image file I/O for the two supported container formats:
//  - PGM, binary variant (P5), 8-bit.
//  - PNG, 8-bit grayscale (color type 0) or 8-bit RGB (color type 2),
//    non-interlaced. Decompression/compression via zlib.
//
// Anything else is rejected with CodecError; the media catalog treats that
// as "skip with a warning".

#include <filesystem>
#include <vector>

#include "wmbench/types.hpp"

namespace wmbench {

// Interleaved 8-bit samples, row-major. channels is 1 (gray) or 3 (RGB).
struct ImageBuffer {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<uint8_t> samples;
};

ImageBuffer read_pgm(const std::filesystem::path& file);
void write_pgm(const std::filesystem::path& file, const ImageBuffer& image);
void write_pgm(const std::filesystem::path& file, const Work& work);

ImageBuffer read_png(const std::filesystem::path& file);
void write_png(const std::filesystem::path& file, const ImageBuffer& image);

// Dispatches on the file extension (.pgm/.png, case-insensitive).
ImageBuffer read_image(const std::filesystem::path& file);

// True when the extension names a format this module can try to decode.
bool has_supported_extension(const std::filesystem::path& file);

}  // namespace wmbench
