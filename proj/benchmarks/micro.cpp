// Microbenchmarks for the hot paths: the 8x8 DCT, the JPEG codec, the
// quality metrics, and both reference schemes end to end.

#include <benchmark/benchmark.h>

#include "wmbench/attacks.hpp"
#include "wmbench/dct.hpp"
#include "wmbench/jpeg_codec.hpp"
#include "wmbench/metrics.hpp"
#include "wmbench/registry.hpp"
#include "wmbench/synthetic.hpp"

namespace {

using namespace wmbench;

const Work& fixture512() {
  static const Work work = synthesize_image(512, 512, 7);
  return work;
}

const Work& fixture256() {
  static const Work work = synthesize_image(256, 256, 7);
  return work;
}

void BM_Dct8x8RoundTrip(benchmark::State& state) {
  double pixels[64], coefs[64];
  for (int i = 0; i < 64; ++i) pixels[i] = double((i * 37) % 256);
  for (auto _ : state) {
    dct8x8_forward(pixels, coefs);
    dct8x8_inverse(coefs, pixels);
    benchmark::DoNotOptimize(pixels);
  }
}
BENCHMARK(BM_Dct8x8RoundTrip);

void BM_JpegEncode(benchmark::State& state) {
  const Work& work = fixture512();
  for (auto _ : state) {
    auto bytes = jpeg_encode(work, int(state.range(0)));
    benchmark::DoNotOptimize(bytes);
  }
}
BENCHMARK(BM_JpegEncode)->Arg(50)->Arg(95);

void BM_JpegRoundTrip(benchmark::State& state) {
  const Work& work = fixture512();
  for (auto _ : state) {
    auto result = jpeg_attack(work, int(state.range(0)));
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_JpegRoundTrip)->Arg(75);

void BM_Psnr(benchmark::State& state) {
  const Work& a = fixture512();
  Work b = additive_gaussian_attack(a, 0.0, 25.0, 99);
  for (auto _ : state) {
    auto v = psnr(a, b);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_Psnr);

void BM_Ssim(benchmark::State& state) {
  const Work& a = fixture512();
  Work b = additive_gaussian_attack(a, 0.0, 25.0, 99);
  for (auto _ : state) {
    auto v = ssim(a, b);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_Ssim);

void BM_SchemeEmbed(benchmark::State& state) {
  Registry registry = Registry::with_builtins();
  const auto& entry = registry.scheme(
      state.range(0) == 0 ? "rs-fragile-lsb" : "rs-semifragile-dct");
  const Work& cover = fixture256();
  const std::string key = "0110100110010110100101100110100101101001100101100110100110010110";
  for (auto _ : state) {
    auto out = entry.embed(cover, {}, key, {});
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_SchemeEmbed)->Arg(0)->Arg(1);

void BM_SchemeReceive(benchmark::State& state) {
  Registry registry = Registry::with_builtins();
  const auto& entry = registry.scheme(
      state.range(0) == 0 ? "rs-fragile-lsb" : "rs-semifragile-dct");
  const Work& cover = fixture256();
  const std::string key = "0110100110010110100101100110100101101001100101100110100110010110";
  const SenderOutput sent = entry.embed(cover, {}, key, {});
  for (auto _ : state) {
    auto out = entry.receive(sent.watermarked, {}, key, {});
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_SchemeReceive)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
