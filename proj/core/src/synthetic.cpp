#include "wmbench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "wmbench/rng.hpp"

namespace wmbench {

Work synthesize_image(int width, int height, uint64_t seed) {
  if (width <= 0 || height <= 0)
    throw Error("synthetic image dimensions must be positive");
  DetRng rng(seed);

  struct Sinusoid {
    double fx, fy, phase, amplitude;
  };
  std::vector<Sinusoid> waves;
  const int wave_count = 10;
  for (int i = 0; i < wave_count; ++i) {
    // Frequencies from gentle (about 1.5 periods across the image) to fine
    // detail; amplitude falls roughly as 1/frequency.
    double fscale = 1.5 * std::pow(2.0, 0.45 * i);
    double angle = rng.uniform01() * 2.0 * std::numbers::pi;
    Sinusoid wave;
    wave.fx = fscale * std::cos(angle) / double(width);
    wave.fy = fscale * std::sin(angle) / double(height);
    wave.phase = rng.uniform01() * 2.0 * std::numbers::pi;
    wave.amplitude = 60.0 / (1.0 + 0.6 * i);
    waves.push_back(wave);
  }
  double gradient_angle = rng.uniform01() * 2.0 * std::numbers::pi;
  double gx = std::cos(gradient_angle), gy = std::sin(gradient_angle);

  std::vector<double> values(size_t(width) * height);
  double lo = 1e300, hi = -1e300;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double v = 40.0 * (gx * x / double(width) + gy * y / double(height));
      for (const Sinusoid& wave : waves)
        v += wave.amplitude *
             std::sin(2.0 * std::numbers::pi * (wave.fx * x + wave.fy * y) +
                      wave.phase);
      v += rng.gaussian(0.0, 2.0);  // mild pixel-level texture
      values[size_t(y) * width + x] = v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }

  // Map into [16, 240]: away from the clamp rails so noise and embedding
  // stay observable.
  Work work(width, height, uint8_t(0));
  double span = hi > lo ? hi - lo : 1.0;
  for (size_t i = 0; i < values.size(); ++i) {
    double v = 16.0 + (values[i] - lo) / span * (240.0 - 16.0);
    work.pixels()[i] = uint8_t(std::clamp(std::lround(v), 0L, 255L));
  }
  return work;
}

}  // namespace wmbench
