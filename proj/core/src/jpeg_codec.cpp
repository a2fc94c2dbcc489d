#include "wmbench/jpeg_codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "wmbench/dct.hpp"

namespace wmbench {

namespace {

// Standard luminance quantization table (natural order).
constexpr std::array<int, 64> kBaseLuminanceQuant = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};

// Standard luminance Huffman specifications: code counts per length 1..16
// followed by the symbol values in code order.
constexpr uint8_t kDcBits[16] = {0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
constexpr uint8_t kDcValues[12] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};

constexpr uint8_t kAcBits[16] = {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d};
constexpr uint8_t kAcValues[162] = {
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06,
    0x13, 0x51, 0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xa1, 0x08,
    0x23, 0x42, 0xb1, 0xc1, 0x15, 0x52, 0xd1, 0xf0, 0x24, 0x33, 0x62, 0x72,
    0x82, 0x09, 0x0a, 0x16, 0x17, 0x18, 0x19, 0x1a, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2a, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44, 0x45,
    0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
    0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75,
    0x76, 0x77, 0x78, 0x79, 0x7a, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3,
    0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6,
    0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9,
    0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda, 0xe1, 0xe2,
    0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf1, 0xf2, 0xf3, 0xf4,
    0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa};

// Canonical Huffman codes generated from a (bits, values) specification.
struct HuffEncodeTable {
  uint16_t code[256];
  uint8_t length[256];
};

HuffEncodeTable build_encode_table(const uint8_t bits[16],
                                   const uint8_t* values, int value_count) {
  HuffEncodeTable table{};
  std::memset(table.length, 0, sizeof(table.length));
  uint16_t code = 0;
  int k = 0;
  for (int len = 1; len <= 16; ++len) {
    for (int i = 0; i < bits[len - 1]; ++i) {
      if (k >= value_count) throw CodecError("corrupt Huffman specification");
      table.code[values[k]] = code;
      table.length[values[k]] = uint8_t(len);
      ++code;
      ++k;
    }
    code = uint16_t(code << 1);
  }
  return table;
}

// Decoder-side canonical table (libjpeg-style min/max code bounds).
struct HuffDecodeTable {
  int32_t mincode[17];
  int32_t maxcode[17];  // -1 when no codes of that length
  int valptr[17];
  std::vector<uint8_t> values;
};

HuffDecodeTable build_decode_table(const uint8_t bits[16],
                                   const uint8_t* values, int value_count) {
  HuffDecodeTable table;
  table.values.assign(values, values + value_count);
  int code = 0;
  int k = 0;
  for (int len = 1; len <= 16; ++len) {
    if (bits[len - 1] > 0) {
      table.valptr[len] = k;
      table.mincode[len] = code;
      code += bits[len - 1];
      k += bits[len - 1];
      table.maxcode[len] = code - 1;
    } else {
      table.maxcode[len] = -1;
      table.mincode[len] = 0;
      table.valptr[len] = 0;
    }
    code <<= 1;
  }
  if (k != value_count) throw CodecError("corrupt Huffman specification");
  return table;
}

// Number of magnitude bits needed for a DC difference / AC coefficient.
int bit_category(int v) {
  int a = v < 0 ? -v : v;
  int n = 0;
  while (a) {
    ++n;
    a >>= 1;
  }
  return n;
}

class BitWriter {
 public:
  explicit BitWriter(std::vector<uint8_t>& out) : out_(out) {}

  void put(uint32_t bits, int count) {
    acc_ = (acc_ << count) | (bits & ((1u << count) - 1));
    filled_ += count;
    while (filled_ >= 8) {
      uint8_t byte = uint8_t(acc_ >> (filled_ - 8));
      out_.push_back(byte);
      if (byte == 0xff) out_.push_back(0x00);  // byte stuffing
      filled_ -= 8;
    }
  }

  void flush() {
    if (filled_ > 0) {
      int pad = 8 - filled_;
      put((1u << pad) - 1, pad);  // pad the final byte with 1-bits
    }
  }

 private:
  std::vector<uint8_t>& out_;
  uint64_t acc_ = 0;
  int filled_ = 0;
};

void append_marker(std::vector<uint8_t>& out, uint8_t marker) {
  out.push_back(0xff);
  out.push_back(marker);
}

void append_segment(std::vector<uint8_t>& out, uint8_t marker,
                    const std::vector<uint8_t>& payload) {
  append_marker(out, marker);
  uint16_t length = uint16_t(payload.size() + 2);
  out.push_back(uint8_t(length >> 8));
  out.push_back(uint8_t(length & 0xff));
  out.insert(out.end(), payload.begin(), payload.end());
}

}  // namespace

int jpeg_quality_scale(int quality) {
  quality = std::clamp(quality, 1, 100);
  return quality < 50 ? 5000 / quality : 200 - 2 * quality;
}

std::array<int, 64> jpeg_quant_table(int quality) {
  int scale = jpeg_quality_scale(quality);
  std::array<int, 64> table;
  for (int i = 0; i < 64; ++i) {
    int v = (kBaseLuminanceQuant[i] * scale + 50) / 100;
    table[i] = std::clamp(v, 1, 255);
  }
  return table;
}

std::vector<uint8_t> jpeg_encode(const Work& image, int quality) {
  if (image.width() <= 0 || image.height() <= 0)
    throw CodecError("cannot encode an empty image");
  if (quality < 1 || quality > 100)
    throw CodecError("quality factor out of range [1, 100]");

  const int width = image.width();
  const int height = image.height();
  const std::array<int, 64> quant = jpeg_quant_table(quality);

  std::vector<uint8_t> out;
  out.reserve(size_t(width) * height / 4 + 1024);

  append_marker(out, 0xd8);  // SOI

  // APP0: JFIF 1.1, no density units, no thumbnail.
  append_segment(out, 0xe0,
                 {'J', 'F', 'I', 'F', 0, 1, 1, 0, 0, 1, 0, 1, 0, 0});

  // DQT: table 0, 8-bit precision, zig-zag order.
  {
    std::vector<uint8_t> payload;
    payload.push_back(0x00);
    for (int i = 0; i < 64; ++i)
      payload.push_back(uint8_t(quant[size_t(kZigzagToNatural[i])]));
    append_segment(out, 0xdb, payload);
  }

  // SOF0: baseline, 8-bit, one component with 1x1 sampling.
  {
    std::vector<uint8_t> payload;
    payload.push_back(8);
    payload.push_back(uint8_t(height >> 8));
    payload.push_back(uint8_t(height & 0xff));
    payload.push_back(uint8_t(width >> 8));
    payload.push_back(uint8_t(width & 0xff));
    payload.push_back(1);     // component count
    payload.push_back(1);     // component id
    payload.push_back(0x11);  // sampling factors
    payload.push_back(0);     // quant table id
    append_segment(out, 0xc0, payload);
  }

  // DHT: DC table 0 and AC table 0.
  {
    std::vector<uint8_t> payload;
    payload.push_back(0x00);
    payload.insert(payload.end(), kDcBits, kDcBits + 16);
    payload.insert(payload.end(), kDcValues, kDcValues + 12);
    payload.push_back(0x10);
    payload.insert(payload.end(), kAcBits, kAcBits + 16);
    payload.insert(payload.end(), kAcValues, kAcValues + 162);
    append_segment(out, 0xc4, payload);
  }

  // SOS: single component, DC/AC table 0, full spectral range.
  append_segment(out, 0xda, {1, 1, 0x00, 0, 63, 0});

  const HuffEncodeTable dc_table =
      build_encode_table(kDcBits, kDcValues, 12);
  const HuffEncodeTable ac_table =
      build_encode_table(kAcBits, kAcValues, 162);

  BitWriter writer(out);
  const int blocks_x = (width + 7) / 8;
  const int blocks_y = (height + 7) / 8;
  int dc_pred = 0;
  double pixels[64], coefs[64];
  int quantized[64];

  for (int by = 0; by < blocks_y; ++by) {
    for (int bx = 0; bx < blocks_x; ++bx) {
      // Level-shifted block; partial edge blocks replicate the last row/col.
      for (int y = 0; y < 8; ++y) {
        int sy = std::min(by * 8 + y, height - 1);
        for (int x = 0; x < 8; ++x) {
          int sx = std::min(bx * 8 + x, width - 1);
          pixels[y * 8 + x] = double(image.at(sx, sy)) - 128.0;
        }
      }
      dct8x8_forward(pixels, coefs);
      for (int i = 0; i < 64; ++i) {
        double q = coefs[i] / double(quant[size_t(i)]);
        quantized[i] = int(std::lround(q));
      }

      // DC difference.
      int diff = quantized[0] - dc_pred;
      dc_pred = quantized[0];
      int category = bit_category(diff);
      if (dc_table.length[category] == 0)
        throw CodecError("DC difference out of representable range");
      writer.put(dc_table.code[category], dc_table.length[category]);
      if (category > 0) {
        int bits = diff < 0 ? diff - 1 : diff;  // two's complement trick
        writer.put(uint32_t(bits) & ((1u << category) - 1), category);
      }

      // AC run-length coding over the zig-zag scan.
      int run = 0;
      for (int k = 1; k < 64; ++k) {
        int v = quantized[size_t(kZigzagToNatural[k])];
        if (v == 0) {
          ++run;
          continue;
        }
        while (run > 15) {
          writer.put(ac_table.code[0xf0], ac_table.length[0xf0]);  // ZRL
          run -= 16;
        }
        int size = bit_category(v);
        int symbol = (run << 4) | size;
        if (size > 10 || ac_table.length[symbol] == 0)
          throw CodecError("AC coefficient out of representable range");
        writer.put(ac_table.code[symbol], ac_table.length[symbol]);
        int bits = v < 0 ? v - 1 : v;
        writer.put(uint32_t(bits) & ((1u << size) - 1), size);
        run = 0;
      }
      if (run > 0)
        writer.put(ac_table.code[0x00], ac_table.length[0x00]);  // EOB
    }
  }
  writer.flush();
  append_marker(out, 0xd9);  // EOI
  return out;
}

// ---------------------------------------------------------------- decode --

namespace {

class StreamReader {
 public:
  explicit StreamReader(std::span<const uint8_t> data) : data_(data) {}

  size_t pos() const { return pos_; }
  bool at_end() const { return pos_ >= data_.size(); }

  uint8_t u8() {
    if (pos_ >= data_.size()) throw CodecError("truncated stream");
    return data_[pos_++];
  }
  uint16_t u16() {
    uint16_t hi = u8();
    return uint16_t((hi << 8) | u8());
  }
  void skip(size_t n) {
    if (pos_ + n > data_.size()) throw CodecError("truncated stream");
    pos_ += n;
  }

 private:
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

// Entropy-coded segment reader: unstuffs 0xFF00 and stops at any marker.
class BitReader {
 public:
  BitReader(std::span<const uint8_t> data, size_t pos)
      : data_(data), pos_(pos) {}

  int bit() {
    if (count_ == 0) {
      if (pos_ >= data_.size())
        throw CodecError("truncated entropy-coded data");
      uint8_t byte = data_[pos_];
      if (byte == 0xff) {
        if (pos_ + 1 >= data_.size() || data_[pos_ + 1] != 0x00)
          throw CodecError("unexpected marker inside entropy-coded data");
        pos_ += 2;  // stuffed 0xFF
      } else {
        pos_ += 1;
      }
      acc_ = byte;
      count_ = 8;
    }
    --count_;
    return (acc_ >> count_) & 1;
  }

  int receive(int count) {
    int v = 0;
    for (int i = 0; i < count; ++i) v = (v << 1) | bit();
    return v;
  }

  size_t byte_pos() const { return pos_; }

 private:
  std::span<const uint8_t> data_;
  size_t pos_;
  uint8_t acc_ = 0;
  int count_ = 0;
};

int decode_huffman(BitReader& bits, const HuffDecodeTable& table) {
  int code = bits.bit();
  int len = 1;
  while (table.maxcode[len] < 0 || code > table.maxcode[len]) {
    if (++len > 16) throw CodecError("invalid Huffman code in stream");
    code = (code << 1) | bits.bit();
  }
  return table.values[size_t(table.valptr[len] + code - table.mincode[len])];
}

// Sign extension of a `size`-bit magnitude value (JPEG "EXTEND").
int extend(int v, int size) {
  if (size == 0) return 0;
  return v < (1 << (size - 1)) ? v - (1 << size) + 1 : v;
}

}  // namespace

Work jpeg_decode(std::span<const uint8_t> stream) {
  StreamReader reader(stream);
  if (reader.u8() != 0xff || reader.u8() != 0xd8)
    throw CodecError("missing SOI marker");

  std::array<int, 64> quant_tables[4] = {};
  bool quant_present[4] = {false, false, false, false};
  HuffDecodeTable dc_tables[4], ac_tables[4];
  bool dc_present[4] = {}, ac_present[4] = {};

  int width = 0, height = 0;
  int component_quant = -1;
  bool have_frame = false;

  for (;;) {
    uint8_t byte = reader.u8();
    if (byte != 0xff) throw CodecError("expected a marker");
    uint8_t marker = reader.u8();
    while (marker == 0xff) marker = reader.u8();  // fill bytes

    if (marker == 0xd9) throw CodecError("no scan data before EOI");
    if (marker == 0x01 || (marker >= 0xd0 && marker <= 0xd7))
      continue;  // standalone markers

    uint16_t length = reader.u16();
    if (length < 2) throw CodecError("malformed segment length");
    size_t payload = size_t(length) - 2;
    size_t segment_end = reader.pos() + payload;

    switch (marker) {
      case 0xdb: {  // DQT
        size_t consumed = 0;
        while (consumed < payload) {
          uint8_t pq_tq = reader.u8();
          int precision = pq_tq >> 4;
          int id = pq_tq & 0x0f;
          if (id > 3) throw CodecError("bad quantization table id");
          for (int i = 0; i < 64; ++i) {
            int v = precision ? reader.u16() : reader.u8();
            quant_tables[id][size_t(kZigzagToNatural[i])] = v;
          }
          quant_present[id] = true;
          consumed += 1 + (precision ? 128 : 64);
        }
        break;
      }
      case 0xc4: {  // DHT
        size_t consumed = 0;
        while (consumed < payload) {
          uint8_t tc_th = reader.u8();
          int cls = tc_th >> 4;
          int id = tc_th & 0x0f;
          if (cls > 1 || id > 3) throw CodecError("bad Huffman table id");
          uint8_t bits[16];
          int total = 0;
          for (int i = 0; i < 16; ++i) {
            bits[i] = reader.u8();
            total += bits[i];
          }
          std::vector<uint8_t> values(static_cast<size_t>(total));
          for (int i = 0; i < total; ++i) values[size_t(i)] = reader.u8();
          if (cls == 0) {
            dc_tables[id] = build_decode_table(bits, values.data(), total);
            dc_present[id] = true;
          } else {
            ac_tables[id] = build_decode_table(bits, values.data(), total);
            ac_present[id] = true;
          }
          consumed += 17 + size_t(total);
        }
        break;
      }
      case 0xc0:
      case 0xc1: {  // SOF0/SOF1 (sequential)
        int precision = reader.u8();
        height = reader.u16();
        width = reader.u16();
        int components = reader.u8();
        if (precision != 8)
          throw CodecError("unsupported sample precision (only 8-bit)");
        if (components != 1)
          throw CodecError(
              "unsupported component count (single-component grayscale only)");
        reader.u8();  // component id
        uint8_t sampling = reader.u8();
        if (sampling != 0x11)
          throw CodecError("unsupported sampling factors");
        component_quant = reader.u8();
        have_frame = true;
        break;
      }
      case 0xc2:
        throw CodecError("progressive JPEG is not supported");
      case 0xdd:
        throw CodecError("restart intervals are not supported");
      case 0xda: {  // SOS
        if (!have_frame) throw CodecError("scan before frame header");
        int ns = reader.u8();
        if (ns != 1) throw CodecError("unsupported scan component count");
        reader.u8();  // component selector
        uint8_t tables = reader.u8();
        int dc_id = tables >> 4;
        int ac_id = tables & 0x0f;
        reader.u8();  // Ss
        reader.u8();  // Se
        reader.u8();  // Ah/Al
        if (component_quant < 0 || !quant_present[component_quant])
          throw CodecError("missing quantization table");
        if (!dc_present[dc_id] || !ac_present[ac_id])
          throw CodecError("missing Huffman table");
        if (width <= 0 || height <= 0)
          throw CodecError("bad frame dimensions");

        const std::array<int, 64>& quant =
            quant_tables[component_quant];
        const HuffDecodeTable& dc = dc_tables[dc_id];
        const HuffDecodeTable& ac = ac_tables[ac_id];

        Work image(width, height, uint8_t(0));
        BitReader bits(stream, reader.pos());
        const int blocks_x = (width + 7) / 8;
        const int blocks_y = (height + 7) / 8;
        int dc_pred = 0;
        double coefs[64], pixels[64];

        for (int by = 0; by < blocks_y; ++by) {
          for (int bx = 0; bx < blocks_x; ++bx) {
            int coef_int[64] = {};
            int t = decode_huffman(bits, dc);
            dc_pred += extend(bits.receive(t), t);
            coef_int[0] = dc_pred;
            for (int k = 1; k < 64;) {
              int rs = decode_huffman(bits, ac);
              int run = rs >> 4;
              int size = rs & 0x0f;
              if (size == 0) {
                if (rs == 0x00) break;  // EOB
                if (rs == 0xf0) {       // ZRL
                  k += 16;
                  continue;
                }
                throw CodecError("invalid AC run/size symbol");
              }
              k += run;
              if (k > 63) throw CodecError("AC coefficient index overflow");
              coef_int[kZigzagToNatural[k]] = extend(bits.receive(size), size);
              ++k;
            }

            for (int i = 0; i < 64; ++i)
              coefs[i] = double(coef_int[i]) * double(quant[size_t(i)]);
            dct8x8_inverse(coefs, pixels);
            int max_y = std::min(8, height - by * 8);
            int max_x = std::min(8, width - bx * 8);
            for (int y = 0; y < max_y; ++y)
              for (int x = 0; x < max_x; ++x) {
                long v = std::lround(pixels[y * 8 + x] + 128.0);
                image.at(bx * 8 + x, by * 8 + y) =
                    uint8_t(std::clamp(v, 0L, 255L));
              }
          }
        }
        return image;
      }
      default:
        // APPn, COM and other segments carry no data we need.
        break;
    }
    if (reader.pos() > segment_end)
      throw CodecError("segment payload overrun");
    reader.skip(segment_end - reader.pos());
  }
}

}  // namespace wmbench
