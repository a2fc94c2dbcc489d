#include "wmbench/metrics.hpp"

#include <cmath>
#include <vector>

namespace wmbench {

MetricValue psnr(const Work& reference, const Work& test) {
  if (!reference.same_dimensions(test))
    throw MetricError("psnr requires images of identical dimensions");
  const auto& a = reference.pixels();
  const auto& b = test.pixels();
  uint64_t sum_sq = 0;  // max 65025 per pixel: exact in 64 bits
  for (size_t i = 0; i < a.size(); ++i) {
    int d = int(a[i]) - int(b[i]);
    sum_sq += uint64_t(d * d);
  }
  if (sum_sq == 0) return MetricValue::identical_sentinel(MetricUnits::Decibel);
  double mse = double(sum_sq) / double(a.size());
  double value = 10.0 * std::log10(255.0 * 255.0 / mse);
  return MetricValue::number(value, MetricUnits::Decibel);
}

namespace {

constexpr int kWindow = 11;
constexpr int kRadius = kWindow / 2;
constexpr double kSigma = 1.5;

// Normalized 1D Gaussian kernel; the separable product reproduces the usual
// grid-normalized 11x11 window exactly.
const double* gaussian_kernel() {
  static const std::vector<double> kernel = [] {
    std::vector<double> k(kWindow);
    double sum = 0;
    for (int i = 0; i < kWindow; ++i) {
      double d = double(i - kRadius);
      k[size_t(i)] = std::exp(-(d * d) / (2.0 * kSigma * kSigma));
      sum += k[size_t(i)];
    }
    for (double& v : k) v /= sum;
    return k;
  }();
  return kernel.data();
}

// Separable valid-region convolution of `src` (w x h doubles) with the
// Gaussian kernel; output is (w - 10) x (h - 10).
void convolve_valid(const std::vector<double>& src, int w, int h,
                    std::vector<double>& dst) {
  const double* k = gaussian_kernel();
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  std::vector<double> horiz(size_t(ow) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int i = 0; i < kWindow; ++i)
        acc += src[size_t(y) * w + size_t(x + i)] * k[i];
      horiz[size_t(y) * ow + size_t(x)] = acc;
    }
  dst.resize(size_t(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int i = 0; i < kWindow; ++i)
        acc += horiz[size_t(y + i) * ow + size_t(x)] * k[i];
      dst[size_t(y) * ow + size_t(x)] = acc;
    }
}

}  // namespace

MetricValue ssim(const Work& reference, const Work& test) {
  if (!reference.same_dimensions(test))
    throw MetricError("ssim requires images of identical dimensions");
  const int w = reference.width();
  const int h = reference.height();
  if (w < kWindow || h < kWindow)
    throw MetricError("ssim requires images at least 11x11");

  const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  const double c2 = (0.03 * 255.0) * (0.03 * 255.0);

  const size_t n = size_t(w) * h;
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (size_t i = 0; i < n; ++i) {
    double a = double(reference.pixels()[i]);
    double b = double(test.pixels()[i]);
    x[i] = a;
    y[i] = b;
    xx[i] = a * a;
    yy[i] = b * b;
    xy[i] = a * b;
  }

  std::vector<double> mu_x, mu_y, s_xx, s_yy, s_xy;
  convolve_valid(x, w, h, mu_x);
  convolve_valid(y, w, h, mu_y);
  convolve_valid(xx, w, h, s_xx);
  convolve_valid(yy, w, h, s_yy);
  convolve_valid(xy, w, h, s_xy);

  double total = 0;
  for (size_t i = 0; i < mu_x.size(); ++i) {
    double ux = mu_x[i], uy = mu_y[i];
    double var_x = s_xx[i] - ux * ux;
    double var_y = s_yy[i] - uy * uy;
    double cov = s_xy[i] - ux * uy;
    double num = (2.0 * ux * uy + c1) * (2.0 * cov + c2);
    double den = (ux * ux + uy * uy + c1) * (var_x + var_y + c2);
    total += num / den;
  }
  return MetricValue::number(total / double(mu_x.size()),
                             MetricUnits::Unitless);
}

FpFnRates fp_fn_rates(const TamperMap& truth, const TamperMap& reported) {
  if (!truth.same_grid(reported))
    throw MetricError("tamper maps have different block grids");
  size_t untampered = 0, tampered = 0, false_pos = 0, false_neg = 0;
  for (size_t i = 0; i < truth.flags.size(); ++i) {
    bool t = truth.flags[i] != 0;
    bool r = reported.flags[i] != 0;
    if (t) {
      ++tampered;
      if (!r) ++false_neg;
    } else {
      ++untampered;
      if (r) ++false_pos;
    }
  }
  FpFnRates rates;
  if (untampered > 0) rates.fp = double(false_pos) / double(untampered);
  if (tampered > 0) rates.fn = double(false_neg) / double(tampered);
  return rates;
}

}  // namespace wmbench
