#pragma once

// Full-reference quality metrics and tamper-decision rates.

#include <chrono>
#include <optional>
#include <utility>

#include "wmbench/types.hpp"

namespace wmbench {

// Peak signal-to-noise ratio over the whole image, peak 255. Returns the
// "identical" sentinel when the two images match exactly (MSE would be 0).
// Throws MetricError on dimension mismatch.
MetricValue psnr(const Work& reference, const Work& test);

// Mean structural similarity with the usual parameters: 11x11 Gaussian
// window (sigma 1.5), K1 = 0.01, K2 = 0.03, dynamic range 255, windows fully
// inside the image (no padding). Requires both dimensions >= 11.
MetricValue ssim(const Work& reference, const Work& test);

// False-positive / false-negative rates of a reported tamper map against
// ground truth, each normalized by its own ground-truth class size:
//   fp = #(untampered in truth, flagged)   / #(untampered in truth)
//   fn = #(tampered in truth, not flagged) / #(tampered in truth)
// A rate whose denominator class is empty is nullopt (not applicable).
struct FpFnRates {
  std::optional<double> fp;
  std::optional<double> fn;
};
FpFnRates fp_fn_rates(const TamperMap& truth, const TamperMap& reported);

// Runs `fn` and returns (result, elapsed wall-clock seconds).
template <typename Fn>
auto time_call(Fn&& fn) -> std::pair<decltype(fn()), double> {
  auto start = std::chrono::steady_clock::now();
  auto result = fn();
  auto stop = std::chrono::steady_clock::now();
  double seconds = std::chrono::duration<double>(stop - start).count();
  return {std::move(result), seconds};
}

}  // namespace wmbench
