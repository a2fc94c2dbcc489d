#pragma once

// Attack primitives and the attack pipeline.
//
// Content-changing attacks report per-block tamper ground truth; pure
// signal-processing attacks (compression, noise) do not. Every stochastic
// attack takes an explicit seed, so results are reproducible bit for bit.

#include <cstdint>
#include <optional>
#include <vector>

#include "wmbench/types.hpp"

namespace wmbench {

class Registry;

// Copies a block-aligned square region onto a disjoint block-aligned
// destination within the same image. The square side is
// s = 8 * round(sqrt(area_fraction * W * H) / 8), clamped to at least 8 and
// to fit the image. Source position is drawn uniformly over all block-
// aligned positions, the destination uniformly over those disjoint from the
// source. Ground truth flags exactly the 8x8 blocks whose pixels changed.
AttackOutcome copy_paste_attack(const Work& input, double area_fraction,
                                uint64_t seed);

// Baseline JPEG round trip at the given quality factor.
struct JpegResult {
  Work decoded;
  size_t encoded_bytes = 0;
  double bpp = 0.0;  // 8 * encoded_bytes / (W * H)
};
JpegResult jpeg_attack(const Work& input, int quality);

// Additive white Gaussian noise on pixel values:
//   out = clamp(round(x + n)),  n ~ N(mean, variance).
Work additive_gaussian_attack(const Work& input, double mean, double variance,
                              uint64_t seed);

// Multiplicative Gaussian noise, with the variance interpreted on the
// normalized intensity scale:
//   out = clamp(round(x * (1 + n))),  n ~ N(mean, variance / 255^2).
Work multiplicative_gaussian_attack(const Work& input, double mean,
                                    double variance, uint64_t seed);

// A configured pipeline: an ordered list of attack stages applied in
// sequence. Stage i runs with seed hash_combine(pipeline_seed, i).
struct PipelineStage {
  std::string attack_id;
  ParamMap params;
};

struct AttackPipeline {
  std::vector<PipelineStage> stages;
  uint64_t seed = 0;
};

struct PipelineResult {
  Work output;
  // Ground truth from the content-changing stage, if one ran.
  std::optional<TamperMap> ground_truth;
  // From the last compression stage, if any.
  std::optional<double> bpp;
  std::optional<double> encoded_bytes;
};

// Resolves each stage against the registry, checks parameters, and applies
// the stages in order. Throws AttackError / RegistryError on bad pipelines.
// A pipeline must have at least one stage and at most one content-changing
// stage (two ground truths cannot be merged meaningfully).
PipelineResult run_pipeline(const Registry& registry, const Work& input,
                            const AttackPipeline& pipeline);

}  // namespace wmbench
