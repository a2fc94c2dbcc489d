#include "wmbench/dct.hpp"

#include <cmath>
#include <numbers>

namespace wmbench {

const std::array<int, 64> kZigzagToNatural = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

namespace {

// Orthonormal 1D DCT-II basis: C[k][x] = s(k) * cos((2x+1) k pi / 16),
// s(0) = sqrt(1/8), s(k>0) = sqrt(2/8).
struct Basis {
  double c[8][8];
  Basis() {
    for (int k = 0; k < 8; ++k) {
      double s = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x)
        c[k][x] = s * std::cos((2 * x + 1) * k * std::numbers::pi / 16.0);
    }
  }
};

const Basis& basis() {
  static const Basis b;
  return b;
}

}  // namespace

void dct8x8_forward(const double in[64], double out[64]) {
  const auto& c = basis().c;
  double tmp[64];
  // Rows: tmp[y][u] = sum_x in[y][x] * c[u][x]
  for (int y = 0; y < 8; ++y)
    for (int u = 0; u < 8; ++u) {
      double acc = 0;
      for (int x = 0; x < 8; ++x) acc += in[y * 8 + x] * c[u][x];
      tmp[y * 8 + u] = acc;
    }
  // Columns: out[v][u] = sum_y tmp[y][u] * c[v][y]
  for (int v = 0; v < 8; ++v)
    for (int u = 0; u < 8; ++u) {
      double acc = 0;
      for (int y = 0; y < 8; ++y) acc += tmp[y * 8 + u] * c[v][y];
      out[v * 8 + u] = acc;
    }
}

void dct8x8_inverse(const double in[64], double out[64]) {
  const auto& c = basis().c;
  double tmp[64];
  // Columns first: tmp[y][u] = sum_v in[v][u] * c[v][y]
  for (int y = 0; y < 8; ++y)
    for (int u = 0; u < 8; ++u) {
      double acc = 0;
      for (int v = 0; v < 8; ++v) acc += in[v * 8 + u] * c[v][y];
      tmp[y * 8 + u] = acc;
    }
  // Rows: out[y][x] = sum_u tmp[y][u] * c[u][x]
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      double acc = 0;
      for (int u = 0; u < 8; ++u) acc += tmp[y * 8 + u] * c[u][x];
      out[y * 8 + x] = acc;
    }
}

}  // namespace wmbench
