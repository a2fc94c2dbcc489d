#pragma once

// Results analysis: reads a results database, aggregates a metric against an
// attack parameter (or against the measured bits-per-pixel), and renders the
// aggregate as a CSV table and/or an SVG line plot.
//
// Aggregation semantics:
//  * against an attack parameter: records are grouped, within each group the
//    metric is averaged per distinct parameter value; "identical" and
//    "not-applicable" cells are excluded and counted separately.
//  * against bpp: each (group, image) contributes one piecewise-linear curve
//    metric(bpp); per group the curves are averaged at `samples` evenly
//    spaced abscissae, dividing the sum of the defined curve values by the
//    number of curves whose domain covers the abscissa (curves outside their
//    domain contribute zero to the sum and zero to the count).
//
// Both outputs are byte-deterministic for a given database.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wmbench/attacks.hpp"
#include "wmbench/types.hpp"

namespace wmbench {

struct MetricCell {
  enum class Kind { Number, Identical, NotApplicable };
  Kind kind = Kind::NotApplicable;
  double value = 0.0;

  bool is_number() const { return kind == Kind::Number; }
};

struct RunRecord {
  size_t cell_index = 0;
  uint64_t cell_seed = 0;
  std::string image;
  std::string scheme;
  ParamMap scheme_params;
  std::vector<PipelineStage> pipeline;
  std::map<std::string, MetricCell> metrics;
  std::optional<double> bpp;
  std::string status;  // "ok" or "cell-error"
  std::string error;   // set for cell-error records
};

struct ResultsDatabase {
  std::string format;
  std::string tool_version;
  std::string created_at;
  std::string profile_id;
  std::vector<std::string> metric_ids;  // metrics requested by the profile
  std::vector<RunRecord> records;

  // Parses the header line and every record line; throws Error with the line
  // number on malformed input or an unknown format tag.
  static ResultsDatabase load(const std::filesystem::path& file);

  // Resolves a metric name to a record metric key: role-qualified keys
  // ("psnr.recovered") pass through, a bare full-reference metric id defaults
  // to its ".attacked" role, decision metric ids ("fp-rate") are plain keys.
  // Throws Error when no ok record carries the key.
  std::string resolve_metric_key(const std::string& metric) const;
};

struct SeriesPoint {
  double x = 0.0;
  double mean = 0.0;
  size_t count = 0;     // values averaged (curves covering x for bpp mode)
  size_t excluded = 0;  // identical / not-applicable cells left out
};

struct Series {
  std::string label;
  std::vector<SeriesPoint> points;  // x ascending
};

struct Aggregation {
  std::string metric_key;
  std::string axis_label;
  std::vector<Series> series;  // label ascending
};

// Groups ok records (by scheme id, plus scheme params when a scheme occurs
// with more than one distinct parameter set; group_key "image" groups by
// image instead) and averages metric_key per distinct value of the attack
// parameter `param_name`, located by searching each record's pipeline stages.
// A record whose pipeline carries the parameter in two stages is ambiguous
// and rejected; records without the parameter are skipped.
Aggregation aggregate_by_attack_param(const ResultsDatabase& db,
                               const std::string& metric_key,
                               const std::string& param_name,
                               const std::string& group_key = "scheme");

// A piecewise-linear curve through (x, y) knots; duplicate x knots are
// collapsed to their mean y at construction.
class PiecewiseCurve {
 public:
  explicit PiecewiseCurve(std::vector<std::pair<double, double>> knots);

  bool covers(double x) const;
  double evaluate(double x) const;  // linear interpolation; throws off-domain
  double min_x() const;
  double max_x() const;
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

 private:
  std::vector<std::pair<double, double>> knots_;
};

// Averages curves over the union of their domains at `samples` abscissae.
Series average_curves(const std::string& label,
                      const std::vector<PiecewiseCurve>& curves, int samples);

// Builds metric(bpp) curves per (group, image) and averages them per group.
Aggregation aggregate_by_bpp(const ResultsDatabase& db,
                             const std::string& metric_key,
                             const std::string& group_key, int samples);

// CSV: '.' decimal separator, '\n' line endings; header row "<axis>" then
// "<label>","<label>.count" per series; cells empty where a series has no
// value at that abscissa.
void emit_table(const Aggregation& aggregation,
              const std::filesystem::path& file);

// Self-contained SVG line plot (axes, ticks, legend, one polyline per
// series; gaps where a series has no value).
void emit_plot(const Aggregation& aggregation, const std::string& title,
              const std::filesystem::path& file);

struct AnalyzeRequest {
  std::filesystem::path results_path;
  std::string metric;            // bare or role-qualified
  std::string against;           // "bpp" or an attack parameter name
  std::string group = "scheme";  // "scheme" or "image"
  std::filesystem::path csv_path;  // empty: skip CSV
  std::filesystem::path svg_path;  // empty: skip SVG
  int samples = 200;               // bpp mode sampling resolution
};

// Load + aggregate + emit in one call; returns the aggregation.
Aggregation analyze_results(const AnalyzeRequest& request);

}  // namespace wmbench
