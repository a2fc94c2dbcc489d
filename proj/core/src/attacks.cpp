#include "wmbench/attacks.hpp"

#include <algorithm>
#include <cmath>

#include "wmbench/jpeg_codec.hpp"
#include "wmbench/registry.hpp"
#include "wmbench/rng.hpp"

namespace wmbench {

AttackOutcome copy_paste_attack(const Work& input, double area_fraction,
                                uint64_t seed) {
  if (!(area_fraction > 0.0) || area_fraction > 0.5)
    throw AttackError("copy-paste area_fraction must be in (0, 0.5]");
  const int w = input.width();
  const int h = input.height();
  if (w < 16 || h < 16 || w % 8 != 0 || h % 8 != 0)
    throw AttackError(
        "copy-paste requires dimensions >= 16 and multiples of 8");

  // Block-aligned square side closest to the requested area.
  double target = std::sqrt(area_fraction * double(w) * double(h));
  int side = int(8.0 * std::floor(target / 8.0 + 0.5));
  side = std::clamp(side, 8, std::min(w, h));

  // Candidate top-left corners on the 8-pixel grid, row-major.
  const int nx = (w - side) / 8 + 1;
  const int ny = (h - side) / 8 + 1;
  DetRng rng(seed);
  uint64_t src_index = rng.uniform_below(uint64_t(nx) * uint64_t(ny));
  const int sx = int(src_index % uint64_t(nx)) * 8;
  const int sy = int(src_index / uint64_t(nx)) * 8;

  // Destinations whose rectangle does not intersect the source rectangle.
  std::vector<std::pair<int, int>> destinations;
  for (int gy = 0; gy < ny; ++gy)
    for (int gx = 0; gx < nx; ++gx) {
      int dx = gx * 8, dy = gy * 8;
      bool disjoint = dx + side <= sx || sx + side <= dx || dy + side <= sy ||
                      sy + side <= dy;
      if (disjoint) destinations.emplace_back(dx, dy);
    }
  if (destinations.empty())
    throw AttackError(
        "copy-paste found no destination disjoint from the source (region "
        "too large for the image)");
  auto [dx, dy] =
      destinations[size_t(rng.uniform_below(destinations.size()))];

  AttackOutcome outcome;
  outcome.output = input;
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      outcome.output.at(dx + x, dy + y) = input.at(sx + x, sy + y);

  // Ground truth from the actual pixel diff, so blocks that received
  // identical content are correctly left unflagged.
  TamperMap truth(w / 8, h / 8);
  for (int by = 0; by < truth.blocks_h; ++by)
    for (int bx = 0; bx < truth.blocks_w; ++bx) {
      bool changed = false;
      for (int y = 0; y < 8 && !changed; ++y)
        for (int x = 0; x < 8 && !changed; ++x)
          changed = outcome.output.at(bx * 8 + x, by * 8 + y) !=
                    input.at(bx * 8 + x, by * 8 + y);
      truth.set(bx, by, changed);
    }
  outcome.ground_truth = std::move(truth);
  outcome.stats["paste_side"] = double(side);
  return outcome;
}

JpegResult jpeg_attack(const Work& input, int quality) {
  if (quality < 1 || quality > 100)
    throw AttackError("jpeg quality factor out of range [1, 100]");
  JpegResult result;
  std::vector<uint8_t> stream = jpeg_encode(input, quality);
  result.encoded_bytes = stream.size();
  result.bpp = 8.0 * double(stream.size()) /
               (double(input.width()) * double(input.height()));
  result.decoded = jpeg_decode(stream);
  return result;
}

namespace {

Work apply_pixel_noise(const Work& input, DetRng& rng, bool multiplicative,
                       double mean, double sigma) {
  Work out = input;
  auto& pixels = out.pixels();
  for (auto& p : pixels) {
    double n = rng.gaussian(mean, sigma);
    double v = multiplicative ? double(p) * (1.0 + n) : double(p) + n;
    p = uint8_t(std::clamp(std::lround(v), 0L, 255L));
  }
  return out;
}

}  // namespace

Work additive_gaussian_attack(const Work& input, double mean, double variance,
                              uint64_t seed) {
  if (variance < 0) throw AttackError("noise variance must be >= 0");
  DetRng rng(seed);
  return apply_pixel_noise(input, rng, false, mean, std::sqrt(variance));
}

Work multiplicative_gaussian_attack(const Work& input, double mean,
                                    double variance, uint64_t seed) {
  if (variance < 0) throw AttackError("noise variance must be >= 0");
  DetRng rng(seed);
  return apply_pixel_noise(input, rng, true, mean,
                           std::sqrt(variance) / 255.0);
}

PipelineResult run_pipeline(const Registry& registry, const Work& input,
                            const AttackPipeline& pipeline) {
  if (pipeline.stages.empty())
    throw AttackError("attack pipeline has no stages");

  int content_changing = 0;
  for (const PipelineStage& stage : pipeline.stages) {
    const auto& entry = registry.attack(stage.attack_id);
    if (entry.descriptor.capabilities.content_changing) ++content_changing;
    auto errors = Registry::check_params(entry.descriptor.params, stage.params,
                                         "attack '" + stage.attack_id + "'");
    if (!errors.empty()) throw AttackError(errors.front());
  }
  if (content_changing > 1)
    throw AttackError(
        "attack pipeline has more than one content-changing stage");

  PipelineResult result;
  result.output = input;
  for (size_t i = 0; i < pipeline.stages.size(); ++i) {
    const PipelineStage& stage = pipeline.stages[i];
    const auto& entry = registry.attack(stage.attack_id);
    uint64_t stage_seed = hash_combine(pipeline.seed, uint64_t(i));
    AttackOutcome outcome =
        entry.apply(result.output, stage.params, stage_seed);
    // Contract enforced by the framework, not trusted to plugins.
    if (!outcome.output.same_dimensions(input)) {
      throw AttackError("attack '" + stage.attack_id +
                        "' changed the work's dimensions");
    }
    result.output = std::move(outcome.output);
    if (outcome.ground_truth)
      result.ground_truth = std::move(outcome.ground_truth);
    auto bpp = outcome.stats.find("bpp");
    if (bpp != outcome.stats.end()) result.bpp = bpp->second;
    auto bytes = outcome.stats.find("encoded_bytes");
    if (bytes != outcome.stats.end()) result.encoded_bytes = bytes->second;
  }
  return result;
}

}  // namespace wmbench
