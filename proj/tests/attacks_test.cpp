#include <doctest.h>

#include <cmath>
#include <set>

#include "testutil.hpp"
#include "wmbench/attacks.hpp"
#include "wmbench/registry.hpp"
#include "wmbench/rng.hpp"

using namespace wmbench;

namespace {

// Ground truth that the attack *should* have reported: exactly the blocks
// whose pixels differ between input and output.
TamperMap blocks_changed(const Work& before, const Work& after) {
  TamperMap map(before.width() / 8, before.height() / 8);
  for (int by = 0; by < map.blocks_h; ++by)
    for (int bx = 0; bx < map.blocks_w; ++bx) {
      bool changed = false;
      for (int y = 0; y < 8 && !changed; ++y)
        for (int x = 0; x < 8; ++x)
          if (before.at(bx * 8 + x, by * 8 + y) !=
              after.at(bx * 8 + x, by * 8 + y)) {
            changed = true;
            break;
          }
      map.set(bx, by, changed);
    }
  return map;
}

}  // namespace

TEST_CASE("copy-paste ground truth is exactly the set of changed blocks") {
  Work input = testutil::random_work(256, 256, 21);
  for (uint64_t seed : {1ull, 2ull, 77ull}) {
    AttackOutcome outcome = copy_paste_attack(input, 0.1, seed);
    REQUIRE(outcome.ground_truth.has_value());
    CAPTURE(seed);
    CHECK(*outcome.ground_truth == blocks_changed(input, outcome.output));
  }
}

TEST_CASE("copy-paste at 10% of a 256x256 image moves an 80x80 square") {
  // s = 8 round(sqrt(0.1 * 65536) / 8) = 8 round(10.12) = 80.
  Work input = testutil::random_work(256, 256, 5);
  AttackOutcome outcome = copy_paste_attack(input, 0.1, 9);
  REQUIRE(outcome.ground_truth.has_value());
  // On a random image every overwritten block differs from its replacement
  // with overwhelming probability, so the truth is a full 10x10 block square.
  CHECK(outcome.ground_truth->count_tampered() == 100);

  // The flagged blocks form a contiguous axis-aligned square.
  int min_bx = 1 << 20, max_bx = -1, min_by = 1 << 20, max_by = -1;
  for (int by = 0; by < 32; ++by)
    for (int bx = 0; bx < 32; ++bx)
      if (outcome.ground_truth->at(bx, by)) {
        min_bx = std::min(min_bx, bx);
        max_bx = std::max(max_bx, bx);
        min_by = std::min(min_by, by);
        max_by = std::max(max_by, by);
      }
  CHECK(max_bx - min_bx == 9);
  CHECK(max_by - min_by == 9);
}

TEST_CASE("copy-paste leaves the source region intact (disjoint regions)") {
  Work input = testutil::random_work(128, 128, 3);
  AttackOutcome outcome = copy_paste_attack(input, 0.1, 4);
  // The destination square was overwritten with a copy of some source
  // square; that source must itself be unchanged, so the changed region of
  // the image is exactly one square, never two overlapping ones.
  TamperMap changed = blocks_changed(input, outcome.output);
  CHECK(changed == *outcome.ground_truth);
  // Pixel content of the output inside the changed square must exist
  // somewhere in the *input* (it was copied, not synthesized): verify the
  // multiset of changed-block pixel sums is drawn from input block sums.
  std::multiset<long> input_sums;
  for (int by = 0; by < 16; ++by)
    for (int bx = 0; bx < 16; ++bx) {
      long sum = 0;
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) sum += input.at(bx * 8 + x, by * 8 + y);
      input_sums.insert(sum);
    }
  for (int by = 0; by < 16; ++by)
    for (int bx = 0; bx < 16; ++bx) {
      if (!changed.at(bx, by)) continue;
      long sum = 0;
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          sum += outcome.output.at(bx * 8 + x, by * 8 + y);
      CHECK(input_sums.count(sum) > 0);
    }
}

TEST_CASE("copy-paste is seed-deterministic") {
  Work input = testutil::random_work(128, 128, 8);
  AttackOutcome a = copy_paste_attack(input, 0.15, 42);
  AttackOutcome b = copy_paste_attack(input, 0.15, 42);
  AttackOutcome c = copy_paste_attack(input, 0.15, 43);
  CHECK(a.output == b.output);
  CHECK(*a.ground_truth == *b.ground_truth);
  CHECK(a.output != c.output);  // overwhelmingly likely
}

TEST_CASE("copy-paste on a constant image reports no tampered blocks") {
  Work input(64, 64, 200);
  AttackOutcome outcome = copy_paste_attack(input, 0.1, 1);
  REQUIRE(outcome.ground_truth.has_value());
  CHECK(outcome.ground_truth->count_tampered() == 0);
  CHECK(outcome.output == input);
}

TEST_CASE("copy-paste clamps the square to at least one block") {
  Work input = testutil::random_work(16, 16, 10);
  AttackOutcome outcome = copy_paste_attack(input, 0.001, 2);
  REQUIRE(outcome.ground_truth.has_value());
  CHECK(outcome.ground_truth->count_tampered() == 1);  // a single 8x8 block
}

TEST_CASE("additive gaussian noise has the requested moments") {
  Work input(256, 256, 128);
  double variance = 100.0;
  Work noisy = additive_gaussian_attack(input, 0.0, variance, 31);

  double sum = 0, sumsq = 0;
  size_t n = noisy.pixels().size();
  for (size_t i = 0; i < n; ++i) {
    double d = double(noisy.pixels()[i]) - 128.0;
    sum += d;
    sumsq += d * d;
  }
  double mean = sum / double(n);
  double var = sumsq / double(n) - mean * mean;
  CHECK(std::abs(mean) < 0.25);
  // Pixel rounding adds about 1/12 of uniform variance on top.
  CHECK(var == doctest::Approx(variance).epsilon(0.1));
}

TEST_CASE("additive noise honors a non-zero mean and is seed-deterministic") {
  Work input(128, 128, 100);
  Work shifted = additive_gaussian_attack(input, 20.0, 4.0, 7);
  double sum = 0;
  for (uint8_t p : shifted.pixels()) sum += p;
  CHECK(sum / double(shifted.pixel_count()) ==
        doctest::Approx(120.0).epsilon(0.01));

  Work again = additive_gaussian_attack(input, 20.0, 4.0, 7);
  CHECK(shifted == again);
  Work other = additive_gaussian_attack(input, 20.0, 4.0, 8);
  CHECK(shifted != other);
}

TEST_CASE("multiplicative noise scales with intensity and fixes zero") {
  Work zeros(64, 64, 0);
  Work attacked = multiplicative_gaussian_attack(zeros, 0.0, 400.0, 3);
  CHECK(attacked == zeros);  // 0 * (1 + n) stays 0

  // At intensity 128 the effective variance is var * (128/255)^2.
  Work mid(256, 256, 128);
  double variance = 100.0;
  Work noisy = multiplicative_gaussian_attack(mid, 0.0, variance, 17);
  double sum = 0, sumsq = 0;
  size_t n = noisy.pixels().size();
  for (size_t i = 0; i < n; ++i) {
    double d = double(noisy.pixels()[i]) - 128.0;
    sum += d;
    sumsq += d * d;
  }
  double mean = sum / double(n);
  double var = sumsq / double(n) - mean * mean;
  double expected = variance * (128.0 / 255.0) * (128.0 / 255.0);
  CHECK(std::abs(mean) < 0.2);
  CHECK(var == doctest::Approx(expected).epsilon(0.12));
}

TEST_CASE("jpeg attack reports consistent size statistics") {
  Work input = testutil::wave_work(96, 64);
  JpegResult result = jpeg_attack(input, 75);
  CHECK(result.decoded.same_dimensions(input));
  CHECK(result.encoded_bytes > 0);
  CHECK(result.bpp == 8.0 * double(result.encoded_bytes) / (96.0 * 64.0));

  JpegResult finer = jpeg_attack(input, 95);
  CHECK(finer.encoded_bytes > result.encoded_bytes);
}

TEST_CASE("pipelines run stages in order with derived per-stage seeds") {
  Registry registry = Registry::with_builtins();
  Work input = testutil::random_work(64, 64, 40);

  AttackPipeline pipeline;
  pipeline.seed = 999;
  pipeline.stages.push_back(
      {"additive-gaussian", {{"mean", 0.0}, {"variance", 25.0}}});
  PipelineResult result = run_pipeline(registry, input, pipeline);

  // Stage 0 must have used hash_combine(pipeline seed, 0).
  Work expected = additive_gaussian_attack(input, 0.0, 25.0,
                                           hash_combine(999, uint64_t(0)));
  CHECK(result.output == expected);
  CHECK_FALSE(result.ground_truth.has_value());
  CHECK_FALSE(result.bpp.has_value());
}

TEST_CASE("pipelines carry ground truth through later stages and harvest bpp") {
  Registry registry = Registry::with_builtins();
  Work input = testutil::random_work(128, 128, 50);

  AttackPipeline pipeline;
  pipeline.seed = 5;
  pipeline.stages.push_back({"copy-paste", {{"area_fraction", 0.1}}});
  pipeline.stages.push_back({"jpeg", {{"qf", int64_t(80)}}});
  PipelineResult result = run_pipeline(registry, input, pipeline);

  REQUIRE(result.ground_truth.has_value());
  CHECK(result.ground_truth->count_tampered() > 0);
  REQUIRE(result.bpp.has_value());
  REQUIRE(result.encoded_bytes.has_value());
  CHECK(*result.bpp > 0.0);
  // The output went through JPEG after the tampering.
  CHECK(result.output != input);
}

TEST_CASE("pipeline validation rejects malformed configurations") {
  Registry registry = Registry::with_builtins();
  Work input = testutil::random_work(64, 64, 60);

  AttackPipeline empty;
  CHECK_THROWS_AS(run_pipeline(registry, input, empty), AttackError);

  AttackPipeline unknown;
  unknown.stages.push_back({"no-such-attack", {}});
  CHECK_THROWS_AS(run_pipeline(registry, input, unknown), RegistryError);

  AttackPipeline two_tamperers;
  two_tamperers.stages.push_back({"copy-paste", {}});
  two_tamperers.stages.push_back({"copy-paste", {}});
  CHECK_THROWS_AS(run_pipeline(registry, input, two_tamperers), AttackError);

  AttackPipeline bad_param;
  bad_param.stages.push_back({"jpeg", {{"qf", int64_t(0)}}});
  CHECK_THROWS_AS(run_pipeline(registry, input, bad_param), AttackError);

  AttackPipeline unknown_param;
  unknown_param.stages.push_back({"jpeg", {{"quality", int64_t(50)}}});
  CHECK_THROWS_AS(run_pipeline(registry, input, unknown_param), AttackError);
}

TEST_CASE("the framework rejects attacks that change dimensions") {
  Registry registry = Registry::with_builtins();
  AttackDescriptor d;
  d.id = "bad-resize";
  d.display_name = "Misbehaving plugin";
  registry.register_attack(d, [](const Work& in, const ParamMap&, uint64_t) {
    return AttackOutcome{Work(in.width() / 2, in.height(), 0), std::nullopt, {}};
  });

  AttackPipeline pipeline;
  pipeline.stages.push_back({"bad-resize", {}});
  Work input = testutil::random_work(64, 64, 70);
  CHECK_THROWS_WITH_AS(run_pipeline(registry, input, pipeline),
                       doctest::Contains("changed the work's dimensions"),
                       AttackError);
}

TEST_CASE("identity attack is available as a no-attack baseline") {
  Registry registry = Registry::with_builtins();
  Work input = testutil::random_work(32, 32, 80);
  AttackPipeline pipeline;
  pipeline.stages.push_back({"identity", {}});
  PipelineResult result = run_pipeline(registry, input, pipeline);
  CHECK(result.output == input);
  CHECK_FALSE(result.ground_truth.has_value());
}
