#include <doctest.h>

#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "testutil.hpp"
#include "wmbench/dct.hpp"
#include "wmbench/jpeg_codec.hpp"
#include "wmbench/metrics.hpp"

using namespace wmbench;

namespace {

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  REQUIRE(bool(in));
  return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
}

// The standard baseline luminance quantization table (natural order).
constexpr std::array<int, 64> kBaseLuminanceTable = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99,
};

}  // namespace

TEST_CASE("zig-zag scan is a permutation with the documented head") {
  std::set<int> seen(kZigzagToNatural.begin(), kZigzagToNatural.end());
  CHECK(seen.size() == 64);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 63);

  // First ten entries of the standard scan, as natural (row-major) indices.
  const int head[10] = {0, 1, 8, 16, 9, 2, 3, 10, 17, 24};
  for (int i = 0; i < 10; ++i) {
    CAPTURE(i);
    CHECK(kZigzagToNatural[size_t(i)] == head[i]);
  }
  CHECK(kZigzagToNatural[63] == 63);
}

TEST_CASE("DCT round trip reproduces arbitrary blocks") {
  std::mt19937 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    double in[64], coef[64], out[64];
    for (double& v : in) v = double(gen() % 256) - 128.0;
    dct8x8_forward(in, coef);
    dct8x8_inverse(coef, out);
    for (int i = 0; i < 64; ++i) {
      CAPTURE(trial);
      CAPTURE(i);
      CHECK(std::abs(out[i] - in[i]) < 1e-10);
    }
  }
}

TEST_CASE("DCT is orthonormal (Parseval) so coefficient energy equals pixel energy") {
  std::mt19937 gen(12);
  for (int trial = 0; trial < 10; ++trial) {
    double in[64], coef[64];
    for (double& v : in) v = double(gen() % 511) - 255.0;
    dct8x8_forward(in, coef);
    double pixel_energy = 0, coef_energy = 0;
    for (int i = 0; i < 64; ++i) {
      pixel_energy += in[i] * in[i];
      coef_energy += coef[i] * coef[i];
    }
    CHECK(std::abs(pixel_energy - coef_energy) < 1e-6 * (1 + pixel_energy));
  }
}

TEST_CASE("DCT of a constant block is DC-only with value 8x the constant") {
  double in[64], coef[64];
  for (double& v : in) v = 128.0;
  dct8x8_forward(in, coef);
  CHECK(coef[0] == doctest::Approx(1024.0).epsilon(1e-12));
  for (int i = 1; i < 64; ++i) CHECK(std::abs(coef[i]) < 1e-10);
}

TEST_CASE("quality scale follows the two-branch mapping") {
  CHECK(jpeg_quality_scale(50) == 100);
  CHECK(jpeg_quality_scale(10) == 500);
  CHECK(jpeg_quality_scale(1) == 5000);
  CHECK(jpeg_quality_scale(75) == 50);
  CHECK(jpeg_quality_scale(95) == 10);
  CHECK(jpeg_quality_scale(100) == 0);
  // Out-of-range qualities clamp.
  CHECK(jpeg_quality_scale(0) == 5000);
  CHECK(jpeg_quality_scale(120) == 0);
}

TEST_CASE("quality 50 reproduces the base luminance table") {
  std::array<int, 64> table = jpeg_quant_table(50);
  for (int i = 0; i < 64; ++i) {
    CAPTURE(i);
    CHECK(table[size_t(i)] == kBaseLuminanceTable[size_t(i)]);
  }
}

TEST_CASE("quality 100 collapses the table to all ones") {
  std::array<int, 64> table = jpeg_quant_table(100);
  for (int v : table) CHECK(v == 1);
}

TEST_CASE("quantization steps never leave [1, 255] and scale monotonically") {
  std::array<int, 64> prev = jpeg_quant_table(1);
  for (int q = 2; q <= 100; ++q) {
    std::array<int, 64> cur = jpeg_quant_table(q);
    for (int i = 0; i < 64; ++i) {
      CHECK(cur[size_t(i)] >= 1);
      CHECK(cur[size_t(i)] <= 255);
      // Higher quality never increases a step size.
      CHECK(cur[size_t(i)] <= prev[size_t(i)]);
    }
    prev = cur;
  }
}

// The fixture was produced by an independent encoder at quality 90 from the
// closed-form pattern floor(clip(128 + 100 sin(x/10) cos(y/7), 0, 255)). A
// correct baseline decoder must reproduce that pattern to a quality-90-level
// PSNR (the fixture encoder's own round trip measures ~50.6 dB).
TEST_CASE("decoder handles an externally produced baseline stream") {
  auto stream = read_file_bytes(testutil::data_dir() / "smooth_gray_q90.jpg");
  Work decoded = jpeg_decode(stream);
  REQUIRE(decoded.width() == 64);
  REQUIRE(decoded.height() == 64);

  std::vector<uint8_t> pixels(size_t(64) * 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      double v = 128.0 + 100.0 * std::sin(x / 10.0) * std::cos(y / 7.0);
      if (v < 0) v = 0;
      if (v > 255) v = 255;
      pixels[size_t(y) * 64 + x] = uint8_t(std::floor(v));
    }
  Work source(64, 64, std::move(pixels));

  double quality = testutil::psnr_oracle(source, decoded);
  CHECK(quality > 45.0);
}

TEST_CASE("encode/decode round trip at high quality is near-transparent") {
  Work image = testutil::wave_work(64, 64);
  auto stream = jpeg_encode(image, 90);
  // A JFIF stream starts SOI (FF D8) and ends EOI (FF D9).
  REQUIRE(stream.size() > 4);
  CHECK(stream[0] == 0xff);
  CHECK(stream[1] == 0xd8);
  CHECK(stream[stream.size() - 2] == 0xff);
  CHECK(stream[stream.size() - 1] == 0xd9);

  Work decoded = jpeg_decode(stream);
  REQUIRE(decoded.same_dimensions(image));
  CHECK(testutil::psnr_oracle(image, decoded) > 40.0);
}

TEST_CASE("round-trip quality degrades as the quality factor drops") {
  Work image = testutil::wave_work(64, 64);
  double q90 = testutil::psnr_oracle(image, jpeg_decode(jpeg_encode(image, 90)));
  double q50 = testutil::psnr_oracle(image, jpeg_decode(jpeg_encode(image, 50)));
  double q10 = testutil::psnr_oracle(image, jpeg_decode(jpeg_encode(image, 10)));
  CHECK(q90 > q50);
  CHECK(q50 > q10);
  CHECK(q10 > 20.0);  // even harsh compression is not garbage
}

TEST_CASE("constant images survive quality 100 exactly") {
  for (uint8_t level : {uint8_t(0), uint8_t(77), uint8_t(128), uint8_t(255)}) {
    Work image(24, 16, level);
    Work decoded = jpeg_decode(jpeg_encode(image, 100));
    CAPTURE(int(level));
    CHECK(decoded == image);
  }
}

TEST_CASE("dimensions that are not multiples of 8 survive the round trip") {
  Work image = testutil::wave_work(37, 23);
  Work decoded = jpeg_decode(jpeg_encode(image, 85));
  REQUIRE(decoded.width() == 37);
  REQUIRE(decoded.height() == 23);
  CHECK(testutil::psnr_oracle(image, decoded) > 35.0);
}

TEST_CASE("decoder rejects garbage and truncated streams") {
  std::vector<uint8_t> garbage = {0x00, 0x11, 0x22, 0x33};
  CHECK_THROWS_AS(jpeg_decode(garbage), CodecError);

  Work image = testutil::wave_work(32, 32);
  auto stream = jpeg_encode(image, 80);
  stream.resize(stream.size() / 2);
  CHECK_THROWS_AS(jpeg_decode(stream), CodecError);
}

TEST_CASE("encoder rejects empty input") {
  CHECK_THROWS_AS(jpeg_encode(Work(), 80), CodecError);
}
