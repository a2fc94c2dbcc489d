// Acceptance harness: exercises the release criteria end to end against
// independent oracles and prints one [PASS]/[FAIL] line per criterion.
// Exits with the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "testutil.hpp"
#include "wmbench/analyzer.hpp"
#include "wmbench/controller.hpp"
#include "wmbench/image_io.hpp"
#include "wmbench/metrics.hpp"
#include "wmbench/profile.hpp"
#include "wmbench/registry.hpp"
#include "wmbench/synthetic.hpp"

using namespace wmbench;
using nlohmann::json;

namespace {

constexpr int kCorpusImages = 10;
constexpr int kCorpusSize = 256;
const char* kKey =
    "0110100111010010101100011100101001011101001100101110100101100110";

struct Context {
  testutil::TempDir corpus{"accept-corpus"};
  testutil::TempDir out{"accept-out"};
  Registry registry = Registry::with_builtins();
  MediaCatalog catalog;
  std::vector<Work> images;
  std::filesystem::path c6_db;  // produced by criterion 6, reused by 10
};

// Explicit JSON profile construction (kept free of nested initializer
// lists, whose nlohmann interpretation is easy to get wrong silently).
json make_stage(const char* attack, json params) {
  json stage;
  stage["attack"] = attack;
  stage["params"] = std::move(params);
  return stage;
}

json make_pipeline(std::vector<json> stages) {
  json pipeline;
  pipeline["stages"] = json::array();
  for (json& stage : stages) pipeline["stages"].push_back(std::move(stage));
  return pipeline;
}

json make_scheme(const char* id, json params = json::object()) {
  json scheme;
  scheme["id"] = id;
  if (!params.empty()) scheme["params"] = std::move(params);
  return scheme;
}

json base_profile(const char* profile_id, uint64_t seed) {
  json doc;
  doc["profile_id"] = profile_id;
  doc["seed"] = seed;
  doc["images"] = json::array({"*.pgm"});
  doc["metrics"] = json::array({"psnr", "fp-rate", "fn-rate"});
  doc["schemes"] = json::array();
  doc["pipelines"] = json::array();
  return doc;
}

json jpeg_qf_grid() {
  return json::array({100, 95, 90, 85, 80, 75, 70, 65, 60, 55, 50});
}

std::string fmt(double value, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << value;
  return os.str();
}

// --- criterion 1: psnr/ssim vs brute-force oracles ------------------------

bool metric_oracle_equivalence(Context& ctx, std::string& detail) {
  (void)ctx;
  double worst_psnr = 0.0, worst_ssim = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Work a = testutil::random_work(32, 32, 4000 + uint32_t(trial));
    Work b = testutil::random_work(32, 32, 5000 + uint32_t(trial));
    MetricValue p = psnr(a, b);
    MetricValue s = ssim(a, b);
    if (p.identical || s.identical) {
      detail = "random pair unexpectedly identical";
      return false;
    }
    worst_psnr = std::max(worst_psnr,
                          std::abs(p.value - testutil::psnr_oracle(a, b)));
    worst_ssim = std::max(worst_ssim,
                          std::abs(s.value - testutil::ssim_oracle(a, b)));
  }
  detail = "max |psnr diff| " + fmt(worst_psnr, 3) + " dB, max |ssim diff| " +
           fmt(worst_ssim, 3) + " over 50 pairs";
  return worst_psnr <= 1e-9 && worst_ssim <= 1e-9;
}

// --- criterion 2: curve-averaging fixture and sign-formula oracle ---------

bool curve_average_fixture(Context& ctx, std::string& detail) {
  (void)ctx;
  std::vector<PiecewiseCurve> fixture{
      PiecewiseCurve({{0.5, 30.0}, {1.5, 40.0}}),
      PiecewiseCurve({{1.0, 20.0}, {2.0, 30.0}}),
  };
  Series series = average_curves("fixture", fixture, 7);
  if (series.points.size() != 7 || series.points[1].mean != 32.5 ||
      series.points[3].mean != 30.0 || series.points[5].mean != 27.5) {
    detail = "hand-computed fixture values not reproduced exactly";
    return false;
  }

  std::mt19937 rng(31415);
  std::uniform_real_distribution<double> start(0.0, 4.0);
  std::uniform_real_distribution<double> step(0.5, 2.0);
  std::uniform_real_distribution<double> value(1.0, 60.0);
  for (int set = 0; set < 20; ++set) {
    std::vector<PiecewiseCurve> curves;
    std::vector<testutil::OracleCurve> oracle;
    const int curve_count = 2 + set % 4;
    for (int c = 0; c < curve_count; ++c) {
      std::vector<std::pair<double, double>> knots;
      double x = start(rng);
      const int knot_count = 2 + int(rng() % 5);
      for (int k = 0; k < knot_count; ++k) {
        knots.emplace_back(x, value(rng));
        x += step(rng);
      }
      curves.emplace_back(knots);
      oracle.push_back({knots});
    }
    Series averaged = average_curves("set", curves, 200);
    if (averaged.points.size() != 200) {
      detail = "expected 200 sample points";
      return false;
    }
    for (const SeriesPoint& point : averaged.points) {
      bool defined = false;
      const double expected =
          testutil::averaged_curve_oracle(oracle, point.x, &defined);
      if (defined != (point.count > 0) || (defined && point.mean != expected)) {
        detail = "sign-formula oracle disagrees at x=" + fmt(point.x);
        return false;
      }
    }
  }
  detail = "fixture exact; oracle agreement at 20x200 sample points";
  return true;
}

// --- criterion 3: fp/fn vs confusion-matrix counting ----------------------

bool rate_counting_oracle(Context& ctx, std::string& detail) {
  (void)ctx;
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    TamperMap truth(32, 32), reported(32, 32);
    // Sweep densities, including the all-clean and all-tampered extremes.
    const double p_truth =
        (trial == 0) ? 0.0 : (trial == 1) ? 1.0 : (trial % 50) / 50.0;
    const double p_report = (trial % 25) / 25.0;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (auto& f : truth.flags) f = coin(rng) < p_truth ? 1 : 0;
    for (auto& f : reported.flags) f = coin(rng) < p_report ? 1 : 0;

    FpFnRates rates = fp_fn_rates(truth, reported);
    testutil::RatesOracle expected = testutil::rates_oracle(truth, reported);
    const bool fp_ok = rates.fp.has_value() == expected.fp_defined &&
                       (!rates.fp || *rates.fp == expected.fp);
    const bool fn_ok = rates.fn.has_value() == expected.fn_defined &&
                       (!rates.fn || *rates.fn == expected.fn);
    if (!fp_ok || !fn_ok) {
      detail = "count mismatch at trial " + std::to_string(trial);
      return false;
    }
  }
  detail = "exact equality on 100 random map pairs";
  return true;
}

// --- criterion 4: clean round trip for both schemes -----------------------

bool payloads_equal(const std::vector<WatermarkPayload>& a,
                    const std::vector<WatermarkPayload>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].kind != b[i].kind || a[i].bits != b[i].bits) return false;
  }
  return true;
}

bool clean_baseline(Context& ctx, std::string& detail) {
  for (const char* scheme_id : {"rs-fragile-lsb", "rs-semifragile-dct"}) {
    const auto& scheme = ctx.registry.scheme(scheme_id);
    for (size_t i = 0; i < ctx.images.size(); ++i) {
      SenderOutput sent = scheme.embed(ctx.images[i], {}, kKey, {});
      ReceiverOutput got = scheme.receive(
          sent.watermarked,
          std::span<const WatermarkPayload>(sent.embedded_watermarks), kKey,
          {});
      if (!got.decision_map) {
        detail = std::string(scheme_id) + ": no decision map";
        return false;
      }
      TamperMap clean(got.decision_map->blocks_w, got.decision_map->blocks_h);
      FpFnRates rates = fp_fn_rates(clean, *got.decision_map);
      if (!rates.fp || *rates.fp != 0.0) {
        detail = std::string(scheme_id) + " image " + std::to_string(i) +
                 ": fp = " + fmt(rates.fp.value_or(-1));
        return false;
      }
      if (!payloads_equal(sent.embedded_watermarks,
                          got.extracted_watermarks)) {
        detail = std::string(scheme_id) + " image " + std::to_string(i) +
                 ": watermark round trip not bit-exact";
        return false;
      }
    }
  }
  detail = "fp = 0 and bit-exact round trip, both schemes x " +
           std::to_string(ctx.images.size()) + " images";
  return true;
}

// --- criterion 5: fragile-scheme localization under 10% copy-paste --------

bool fragile_localization(Context& ctx, std::string& detail) {
  const auto& scheme = ctx.registry.scheme("rs-fragile-lsb");
  const auto& attack = ctx.registry.attack("copy-paste");
  double fn_sum = 0.0;
  for (size_t i = 0; i < ctx.images.size(); ++i) {
    const Work& cover = ctx.images[i];
    SenderOutput sent = scheme.embed(cover, {}, kKey, {});
    AttackOutcome attacked = attack.apply(
        sent.watermarked, {{"area_fraction", 0.1}}, 600 + uint64_t(i));
    ReceiverOutput got = scheme.receive(
        attacked.output,
        std::span<const WatermarkPayload>(sent.embedded_watermarks), kKey, {});
    if (!got.decision_map || !attacked.ground_truth || !got.restored) {
      detail = "missing decision map, ground truth or restored image";
      return false;
    }
    FpFnRates rates = fp_fn_rates(*attacked.ground_truth, *got.decision_map);
    if (!rates.fp || !rates.fn) {
      detail = "rates unexpectedly undefined";
      return false;
    }
    if (*rates.fp != 0.0) {
      detail = "image " + std::to_string(i) + ": fp = " + fmt(*rates.fp);
      return false;
    }
    fn_sum += *rates.fn;
    const double tampered_psnr = psnr(cover, attacked.output).value;
    const double restored_psnr = psnr(cover, *got.restored).value;
    if (!(restored_psnr > tampered_psnr)) {
      detail = "image " + std::to_string(i) + ": restored " +
               fmt(restored_psnr) + " dB <= tampered " + fmt(tampered_psnr) +
               " dB";
      return false;
    }
  }
  const double fn_mean = fn_sum / double(ctx.images.size());
  detail = "fp = 0 on every image, mean fn = " + fmt(fn_mean, 3) +
           ", restoration gains PSNR on every image";
  return fn_mean <= 0.01;
}

// --- criterion 6: semi-fragile robustness trend over the JPEG grid --------

bool semifragile_jpeg_trend(Context& ctx, std::string& detail) {
  json delta_params;
  delta_params["delta"] = 12;
  json qf_params;
  qf_params["qf"] = jpeg_qf_grid();
  json tamper_params;
  tamper_params["area_fraction"] = 0.1;

  json profile_doc = base_profile("jpeg-robustness", 77);
  profile_doc["schemes"].push_back(
      make_scheme("rs-semifragile-dct", delta_params));
  profile_doc["pipelines"].push_back(
      make_pipeline({make_stage("copy-paste", tamper_params),
                     make_stage("jpeg", qf_params)}));
  BenchmarkProfile profile = BenchmarkProfile::from_json(profile_doc.dump());
  ValidatedProfile validated =
      validate_profile(profile, ctx.registry, ctx.catalog);
  ExecuteOptions options;
  options.workers = 4;
  options.output_path_override = (ctx.out.path() / "c6.db").string();
  ExecuteSummary summary =
      execute_benchmark(validated, ctx.registry, ctx.catalog, options);
  if (summary.ok_cells != summary.total_cells || summary.total_cells != 110) {
    detail = std::to_string(summary.ok_cells) + "/" +
             std::to_string(summary.total_cells) + " cells ok (expected 110)";
    return false;
  }
  ctx.c6_db = summary.output_path;

  ResultsDatabase db = ResultsDatabase::load(ctx.c6_db);
  Aggregation fp_agg = aggregate_by_attack_param(db, "fp-rate", "qf");
  if (fp_agg.series.size() != 1 || fp_agg.series[0].points.size() != 11) {
    detail = "unexpected aggregation shape";
    return false;
  }
  // Points come back with qf ascending; walk the high->low quality order.
  std::vector<SeriesPoint> points = fp_agg.series[0].points;
  std::reverse(points.begin(), points.end());
  int inversions = 0;
  double worst = 0.0;
  for (size_t k = 1; k < points.size(); ++k) {
    const double drop = points[k - 1].mean - points[k].mean;
    if (drop > 0) {
      ++inversions;
      worst = std::max(worst, drop);
    }
  }

  Aggregation rec_agg = aggregate_by_attack_param(db, "psnr.recovered", "qf");
  double rec95 = 0, rec55 = 0;
  for (const SeriesPoint& p : rec_agg.series[0].points) {
    if (p.x == 95.0) rec95 = p.mean;
    if (p.x == 55.0) rec55 = p.mean;
  }

  detail = "fp " + fmt(points.front().mean, 3) + " (QF100) -> " +
           fmt(points.back().mean, 3) + " (QF50), " +
           std::to_string(inversions) + " inversion(s), worst " +
           fmt(worst, 3) + "; recovered PSNR QF95 " + fmt(rec95) +
           " dB vs QF55 " + fmt(rec55) + " dB";
  const bool monotone = inversions == 0 || (inversions == 1 && worst <= 0.02);
  return monotone && rec95 > rec55;
}

// --- criterion 7: run-to-run and worker-count determinism -----------------

std::vector<std::string> masked_lines(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::vector<std::string> lines;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (first) {
      j.erase("created_at");
      first = false;
    } else {
      j.erase("timings");
    }
    lines.push_back(j.dump());
  }
  return lines;
}

bool determinism(Context& ctx, std::string& detail) {
  json tamper_params;
  tamper_params["area_fraction"] = 0.05;
  json qf_params;
  qf_params["qf"] = json::array({90, 60});
  json noise_params;
  noise_params["variance"] = 5.0;

  json profile_doc = base_profile("determinism", 12);
  profile_doc["images"] =
      json::array({"img00.pgm", "img01.pgm", "img02.pgm", "img03.pgm"});
  profile_doc["metrics"] = json::array({"psnr", "ssim", "fp-rate", "fn-rate"});
  profile_doc["schemes"].push_back(make_scheme("rs-fragile-lsb"));
  profile_doc["schemes"].push_back(make_scheme("rs-semifragile-dct"));
  profile_doc["pipelines"].push_back(
      make_pipeline({make_stage("copy-paste", tamper_params),
                     make_stage("jpeg", qf_params)}));
  profile_doc["pipelines"].push_back(
      make_pipeline({make_stage("additive-gaussian", noise_params)}));
  BenchmarkProfile profile = BenchmarkProfile::from_json(profile_doc.dump());
  ValidatedProfile validated =
      validate_profile(profile, ctx.registry, ctx.catalog);

  auto run = [&](const char* name, int workers) {
    ExecuteOptions options;
    options.workers = workers;
    options.output_path_override = (ctx.out.path() / name).string();
    execute_benchmark(validated, ctx.registry, ctx.catalog, options);
    return masked_lines(ctx.out.path() / name);
  };
  auto first = run("det-a.db", 1);
  auto repeat = run("det-b.db", 1);
  auto parallel = run("det-c.db", 4);
  if (first != repeat) {
    detail = "two single-worker runs differ";
    return false;
  }
  if (first != parallel) {
    detail = "1-worker and 4-worker runs differ";
    return false;
  }
  detail = std::to_string(first.size() - 1) +
           " records identical across repeat and 1-vs-4-worker runs";
  return true;
}

// --- criterion 8: compression accounting -----------------------------------

bool jpeg_accounting(Context& ctx, std::string& detail) {
  const auto& attack = ctx.registry.attack("jpeg");
  const int qfs[] = {95, 85, 75, 65, 55};
  for (size_t i = 0; i < ctx.images.size(); ++i) {
    double previous_bpp = 0.0;
    for (size_t k = 0; k < std::size(qfs); ++k) {
      AttackOutcome outcome =
          attack.apply(ctx.images[i], {{"qf", int64_t(qfs[k])}}, 0);
      const double bpp = outcome.stats.at("bpp");
      const double bytes = outcome.stats.at("encoded_bytes");
      const double pixels = double(kCorpusSize) * double(kCorpusSize);
      if (bpp * pixels / 8.0 != bytes) {
        detail = "image " + std::to_string(i) + " QF " +
                 std::to_string(qfs[k]) + ": bpp*W*H/8 = " +
                 fmt(bpp * pixels / 8.0, 10) + " != " + fmt(bytes, 10);
        return false;
      }
      if (k > 0 && !(bpp < previous_bpp)) {
        detail = "image " + std::to_string(i) + ": bpp " + fmt(bpp) +
                 " at QF " + std::to_string(qfs[k]) +
                 " is not below bpp at QF " + std::to_string(qfs[k - 1]);
        return false;
      }
      previous_bpp = bpp;
    }
  }
  detail = "byte counts exact and bpp strictly decreasing on all " +
           std::to_string(ctx.images.size()) + " images";
  return true;
}

// --- criterion 9: full grid accounting -------------------------------------

bool grid_accounting(Context& ctx, std::string& detail) {
  json additive = json::array();
  for (int v = 1; v <= 39; v += 2) additive.push_back(v);  // 20 values
  json multiplicative = json::array({1});
  for (int v = 10; v <= 230; v += 10) multiplicative.push_back(v);  // 24

  json tamper_params;
  tamper_params["area_fraction"] = 0.1;
  json qf_params;
  qf_params["qf"] = jpeg_qf_grid();
  json additive_params;
  additive_params["variance"] = additive;
  json multiplicative_params;
  multiplicative_params["variance"] = multiplicative;

  json profile_doc = base_profile("survey-grid", 2025);
  profile_doc["schemes"].push_back(make_scheme("rs-fragile-lsb"));
  profile_doc["schemes"].push_back(make_scheme("rs-semifragile-dct"));
  profile_doc["pipelines"].push_back(
      make_pipeline({make_stage("copy-paste", tamper_params),
                     make_stage("jpeg", qf_params)}));
  profile_doc["pipelines"].push_back(
      make_pipeline({make_stage("copy-paste", tamper_params),
                     make_stage("additive-gaussian", additive_params)}));
  profile_doc["pipelines"].push_back(
      make_pipeline({make_stage("copy-paste", tamper_params),
                     make_stage("multiplicative-gaussian",
                                multiplicative_params)}));
  BenchmarkProfile profile = BenchmarkProfile::from_json(profile_doc.dump());
  ValidatedProfile validated =
      validate_profile(profile, ctx.registry, ctx.catalog);
  ExecuteOptions options;
  options.workers = 4;
  options.output_path_override = (ctx.out.path() / "c9.db").string();
  ExecuteSummary summary =
      execute_benchmark(validated, ctx.registry, ctx.catalog, options);

  ResultsDatabase db = ResultsDatabase::load(summary.output_path);
  size_t ok = 0;
  for (const auto& rec : db.records) ok += rec.status == "ok" ? 1 : 0;
  detail = std::to_string(ok) + " ok records of " +
           std::to_string(db.records.size()) + " (expected 1100)";
  return summary.total_cells == 1100 && summary.ok_cells == 1100 &&
         db.records.size() == 1100 && ok == 1100;
}

// --- criterion 10: analyzer outputs on the criterion-6 database ------------

std::string read_bytes(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

bool analyzer_outputs(Context& ctx, std::string& detail) {
  if (ctx.c6_db.empty()) {
    detail = "criterion 6 database unavailable";
    return false;
  }
  AnalyzeRequest request;
  request.results_path = ctx.c6_db;
  request.metric = "fp-rate";
  request.against = "qf";
  request.csv_path = ctx.out.path() / "c10.csv";
  request.svg_path = ctx.out.path() / "c10.svg";
  analyze_results(request);

  // CSV: header plus one row per grid value, every row parseable.
  std::string csv = read_bytes(request.csv_path);
  std::istringstream rows(csv);
  std::string row;
  size_t data_rows = 0;
  bool header = true;
  while (std::getline(rows, row)) {
    if (header) {
      header = false;
      if (row.rfind("qf,", 0) != 0) {
        detail = "CSV header does not start with the axis column";
        return false;
      }
      continue;
    }
    std::istringstream cells(row);
    std::string cell;
    size_t columns = 0;
    while (std::getline(cells, cell, ',')) {
      if (columns == 0 || !cell.empty()) (void)std::stod(cell);  // parseable
      ++columns;
    }
    ++data_rows;
  }
  if (data_rows != 11) {
    detail = "expected 11 CSV data rows, found " + std::to_string(data_rows);
    return false;
  }

  std::string svg = read_bytes(request.svg_path);
  if (svg.rfind("<svg", 0) != 0 || svg.find("</svg>") == std::string::npos ||
      svg.find("<polyline") == std::string::npos) {
    detail = "SVG output not well-formed";
    return false;
  }

  // Re-emission is byte-identical.
  AnalyzeRequest again = request;
  again.csv_path = ctx.out.path() / "c10-again.csv";
  again.svg_path = ctx.out.path() / "c10-again.svg";
  analyze_results(again);
  if (read_bytes(again.csv_path) != csv || read_bytes(again.svg_path) != svg) {
    detail = "repeated emission differs";
    return false;
  }
  detail = "CSV with 11 rows, well-formed SVG, byte-identical re-emission";
  return true;
}

}  // namespace

int main() {
  Context ctx;
  for (int i = 0; i < kCorpusImages; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "img%02d.pgm", i);
    Work image = synthesize_image(kCorpusSize, kCorpusSize, 9000 + uint64_t(i));
    write_pgm(ctx.corpus.path() / name, image);
    ctx.images.push_back(std::move(image));
  }
  ctx.catalog = MediaCatalog::scan({ctx.corpus.path()});

  struct Criterion {
    const char* name;
    bool (*run)(Context&, std::string&);
    double budget_seconds;  // 0: no stated budget
  };
  const Criterion criteria[] = {
      {"metric oracle equivalence", metric_oracle_equivalence, 10},
      {"curve-averaging fixture", curve_average_fixture, 0},
      {"fp/fn counting oracle", rate_counting_oracle, 0},
      {"no-attack baseline", clean_baseline, 30},
      {"fragile tamper localization", fragile_localization, 60},
      {"semi-fragile JPEG trend", semifragile_jpeg_trend, 180},
      {"determinism", determinism, 0},
      {"compression accounting", jpeg_accounting, 0},
      {"grid accounting", grid_accounting, 900},
      {"analyzer outputs", analyzer_outputs, 0},
  };

  int failures = 0;
  for (size_t i = 0; i < std::size(criteria); ++i) {
    const Criterion& criterion = criteria[i];
    std::string detail;
    bool ok = false;
    double seconds = 0.0;
    try {
      auto timed = time_call([&] { return criterion.run(ctx, detail); });
      ok = timed.first;
      seconds = timed.second;
      if (ok && criterion.budget_seconds > 0 &&
          seconds > criterion.budget_seconds) {
        ok = false;
        detail += " [exceeded " + fmt(criterion.budget_seconds, 3) +
                  " s budget]";
      }
    } catch (const std::exception& ex) {
      detail = std::string("exception: ") + ex.what();
    }
    std::printf("[%s] C%zu %s: %s (%.2f s)\n", ok ? "PASS" : "FAIL", i + 1,
                criterion.name, detail.c_str(), seconds);
    std::fflush(stdout);
    failures += ok ? 0 : 1;
  }
  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures;
}
