#include "wmbench/image_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace wmbench {

namespace {

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw CodecError("cannot open file '" + file.string() + "'");
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (in.bad()) throw CodecError("read error on '" + file.string() + "'");
  return bytes;
}

void write_file_bytes(const std::filesystem::path& file,
                      const std::vector<uint8_t>& bytes) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw CodecError("cannot open file '" + file.string() +
                             "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out) throw CodecError("write error on '" + file.string() + "'");
}

std::string lower_extension(const std::filesystem::path& file) {
  std::string ext = file.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  return ext;
}

}  // namespace

// -------------------------------------------------------------------- PGM --

namespace {

// Reads the next whitespace/comment-delimited token of a PNM header.
std::string next_pnm_token(const std::vector<uint8_t>& bytes, size_t& pos,
                           const std::filesystem::path& file) {
  while (pos < bytes.size()) {
    if (std::isspace(bytes[pos])) {
      ++pos;
    } else if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  size_t start = pos;
  while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#')
    ++pos;
  if (start == pos)
    throw CodecError("truncated PGM header in '" + file.string() + "'");
  return std::string(bytes.begin() + std::ptrdiff_t(start),
                     bytes.begin() + std::ptrdiff_t(pos));
}

int parse_pnm_int(const std::string& token, const char* what,
                  const std::filesystem::path& file) {
  for (char c : token)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw CodecError(std::string("invalid PGM ") + what + " in '" +
                       file.string() + "'");
  long v = std::strtol(token.c_str(), nullptr, 10);
  if (v <= 0 || v > 1 << 20)
    throw CodecError(std::string("PGM ") + what + " out of range in '" +
                     file.string() + "'");
  return int(v);
}

}  // namespace

ImageBuffer read_pgm(const std::filesystem::path& file) {
  std::vector<uint8_t> bytes = read_file_bytes(file);
  size_t pos = 0;
  if (next_pnm_token(bytes, pos, file) != "P5")
    throw CodecError("'" + file.string() + "' is not a binary PGM (P5) file");
  int width = parse_pnm_int(next_pnm_token(bytes, pos, file), "width", file);
  int height = parse_pnm_int(next_pnm_token(bytes, pos, file), "height", file);
  int maxval = parse_pnm_int(next_pnm_token(bytes, pos, file), "maxval", file);
  if (maxval != 255)
    throw CodecError("unsupported PGM maxval " + std::to_string(maxval) +
                     " in '" + file.string() + "' (only 255 is supported)");
  // Exactly one whitespace byte separates the header from the raster.
  if (pos >= bytes.size() || !std::isspace(bytes[pos]))
    throw CodecError("malformed PGM header in '" + file.string() + "'");
  ++pos;
  size_t need = size_t(width) * size_t(height);
  if (bytes.size() - pos < need)
    throw CodecError("truncated PGM raster in '" + file.string() + "'");
  ImageBuffer image;
  image.width = width;
  image.height = height;
  image.channels = 1;
  image.samples.assign(bytes.begin() + std::ptrdiff_t(pos),
                       bytes.begin() + std::ptrdiff_t(pos + need));
  return image;
}

void write_pgm(const std::filesystem::path& file, const ImageBuffer& image) {
  if (image.channels != 1)
    throw CodecError("PGM output supports single-channel images only");
  if (image.samples.size() != size_t(image.width) * image.height)
    throw CodecError("image buffer size mismatch");
  char header[64];
  int n = std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n",
                        image.width, image.height);
  std::vector<uint8_t> bytes(header, header + n);
  bytes.insert(bytes.end(), image.samples.begin(), image.samples.end());
  write_file_bytes(file, bytes);
}

void write_pgm(const std::filesystem::path& file, const Work& work) {
  ImageBuffer image;
  image.width = work.width();
  image.height = work.height();
  image.channels = 1;
  image.samples = work.pixels();
  write_pgm(file, image);
}

// -------------------------------------------------------------------- PNG --

namespace {

constexpr uint8_t kPngSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

uint32_t read_be32(const uint8_t* p) {
  return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) |
         (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

void append_be32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(uint8_t(v >> 24));
  out.push_back(uint8_t(v >> 16));
  out.push_back(uint8_t(v >> 8));
  out.push_back(uint8_t(v));
}

std::vector<uint8_t> zlib_inflate(const std::vector<uint8_t>& in,
                                  size_t expected,
                                  const std::filesystem::path& file) {
  std::vector<uint8_t> out(expected);
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK)
    throw CodecError("zlib init failure decoding '" + file.string() + "'");
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = uInt(in.size());
  zs.next_out = out.data();
  zs.avail_out = uInt(out.size());
  int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != expected)
    throw CodecError("corrupt PNG data in '" + file.string() + "'");
  return out;
}

std::vector<uint8_t> zlib_deflate(const std::vector<uint8_t>& in) {
  uLongf bound = compressBound(uLong(in.size()));
  std::vector<uint8_t> out(bound);
  if (compress2(out.data(), &bound, in.data(), uLong(in.size()),
                Z_DEFAULT_COMPRESSION) != Z_OK)
    throw CodecError("zlib compression failure");
  out.resize(bound);
  return out;
}

int paeth_predictor(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a);
  int pb = std::abs(p - b);
  int pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

// Reverses one row's PNG filter in place. `prev` is the reconstructed
// previous row (all zeros for the first row); `bpp` is bytes per pixel.
void unfilter_row(uint8_t filter, uint8_t* row, const uint8_t* prev,
                  size_t rowbytes, int bpp,
                  const std::filesystem::path& file) {
  switch (filter) {
    case 0:
      break;
    case 1:  // Sub
      for (size_t i = size_t(bpp); i < rowbytes; ++i)
        row[i] = uint8_t(row[i] + row[i - size_t(bpp)]);
      break;
    case 2:  // Up
      for (size_t i = 0; i < rowbytes; ++i) row[i] = uint8_t(row[i] + prev[i]);
      break;
    case 3:  // Average
      for (size_t i = 0; i < rowbytes; ++i) {
        int a = i >= size_t(bpp) ? row[i - size_t(bpp)] : 0;
        row[i] = uint8_t(row[i] + (a + prev[i]) / 2);
      }
      break;
    case 4:  // Paeth
      for (size_t i = 0; i < rowbytes; ++i) {
        int a = i >= size_t(bpp) ? row[i - size_t(bpp)] : 0;
        int c = i >= size_t(bpp) ? prev[i - size_t(bpp)] : 0;
        row[i] = uint8_t(row[i] + paeth_predictor(a, prev[i], c));
      }
      break;
    default:
      throw CodecError("unsupported PNG filter type in '" + file.string() +
                       "'");
  }
}

void append_png_chunk(std::vector<uint8_t>& out, const char type[4],
                      const std::vector<uint8_t>& payload) {
  append_be32(out, uint32_t(payload.size()));
  size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  uLong crc = crc32(0L, out.data() + crc_start, uInt(4 + payload.size()));
  append_be32(out, uint32_t(crc));
}

}  // namespace

ImageBuffer read_png(const std::filesystem::path& file) {
  std::vector<uint8_t> bytes = read_file_bytes(file);
  if (bytes.size() < 8 + 25 ||
      std::memcmp(bytes.data(), kPngSignature, 8) != 0)
    throw CodecError("'" + file.string() + "' is not a PNG file");

  size_t pos = 8;
  int width = 0, height = 0, bit_depth = 0, color_type = 0;
  bool saw_ihdr = false, saw_iend = false;
  std::vector<uint8_t> idat;

  while (pos + 12 <= bytes.size()) {
    uint32_t length = read_be32(&bytes[pos]);
    if (pos + 12 + length > bytes.size())
      throw CodecError("truncated PNG chunk in '" + file.string() + "'");
    std::string type(bytes.begin() + std::ptrdiff_t(pos + 4),
                     bytes.begin() + std::ptrdiff_t(pos + 8));
    const uint8_t* data = &bytes[pos + 8];
    if (type == "IHDR") {
      if (length != 13)
        throw CodecError("malformed IHDR in '" + file.string() + "'");
      width = int(read_be32(data));
      height = int(read_be32(data + 4));
      bit_depth = data[8];
      color_type = data[9];
      int compression = data[10], filter = data[11], interlace = data[12];
      if (width <= 0 || height <= 0 || width > 1 << 20 || height > 1 << 20)
        throw CodecError("PNG dimensions out of range in '" + file.string() +
                         "'");
      if (bit_depth != 8)
        throw CodecError("unsupported PNG bit depth in '" + file.string() +
                         "' (only 8-bit is supported)");
      if (color_type != 0 && color_type != 2)
        throw CodecError("unsupported PNG color type in '" + file.string() +
                         "' (only grayscale and RGB are supported)");
      if (compression != 0 || filter != 0)
        throw CodecError("unsupported PNG compression/filter method in '" +
                         file.string() + "'");
      if (interlace != 0)
        throw CodecError("interlaced PNG is not supported: '" +
                         file.string() + "'");
      saw_ihdr = true;
    } else if (type == "IDAT") {
      if (!saw_ihdr)
        throw CodecError("PNG IDAT before IHDR in '" + file.string() + "'");
      idat.insert(idat.end(), data, data + length);
    } else if (type == "IEND") {
      saw_iend = true;
      break;
    }
    // Ancillary chunks (PLTE would only matter for color type 3) are skipped.
    pos += 12 + length;
  }
  if (!saw_ihdr || !saw_iend || idat.empty())
    throw CodecError("incomplete PNG structure in '" + file.string() + "'");

  int channels = color_type == 0 ? 1 : 3;
  size_t rowbytes = size_t(width) * size_t(channels);
  std::vector<uint8_t> raw =
      zlib_inflate(idat, (rowbytes + 1) * size_t(height), file);

  ImageBuffer image;
  image.width = width;
  image.height = height;
  image.channels = channels;
  image.samples.resize(rowbytes * size_t(height));
  std::vector<uint8_t> zero_row(rowbytes, 0);
  const uint8_t* prev = zero_row.data();
  for (int y = 0; y < height; ++y) {
    const uint8_t* src = raw.data() + size_t(y) * (rowbytes + 1);
    uint8_t* dst = image.samples.data() + size_t(y) * rowbytes;
    std::memcpy(dst, src + 1, rowbytes);
    unfilter_row(src[0], dst, prev, rowbytes, channels, file);
    prev = dst;
  }
  return image;
}

void write_png(const std::filesystem::path& file, const ImageBuffer& image) {
  if (image.channels != 1 && image.channels != 3)
    throw CodecError("PNG output supports 1 or 3 channels only");
  if (image.samples.size() !=
      size_t(image.width) * image.height * image.channels)
    throw CodecError("image buffer size mismatch");

  size_t rowbytes = size_t(image.width) * size_t(image.channels);
  std::vector<uint8_t> raw;
  raw.reserve((rowbytes + 1) * size_t(image.height));
  for (int y = 0; y < image.height; ++y) {
    raw.push_back(0);  // filter type None
    const uint8_t* row = image.samples.data() + size_t(y) * rowbytes;
    raw.insert(raw.end(), row, row + rowbytes);
  }

  std::vector<uint8_t> out(kPngSignature, kPngSignature + 8);
  std::vector<uint8_t> ihdr;
  append_be32(ihdr, uint32_t(image.width));
  append_be32(ihdr, uint32_t(image.height));
  ihdr.push_back(8);                                    // bit depth
  ihdr.push_back(image.channels == 1 ? 0 : 2);          // color type
  ihdr.push_back(0);                                    // compression
  ihdr.push_back(0);                                    // filter
  ihdr.push_back(0);                                    // interlace
  append_png_chunk(out, "IHDR", ihdr);
  append_png_chunk(out, "IDAT", zlib_deflate(raw));
  append_png_chunk(out, "IEND", {});
  write_file_bytes(file, out);
}

ImageBuffer read_image(const std::filesystem::path& file) {
  std::string ext = lower_extension(file);
  if (ext == ".pgm") return read_pgm(file);
  if (ext == ".png") return read_png(file);
  throw CodecError("unsupported media format '" + ext + "' for '" +
                   file.string() + "'");
}

bool has_supported_extension(const std::filesystem::path& file) {
  std::string ext = lower_extension(file);
  return ext == ".pgm" || ext == ".png";
}

}  // namespace wmbench
