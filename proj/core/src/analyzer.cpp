#include "wmbench/analyzer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace wmbench {
namespace {

using nlohmann::json;

// Shortest round-trip decimal form, '.' separator, locale-independent.
std::string fmt_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

ParamValue param_value_from_json(const json& j) {
  if (j.is_number_integer()) return j.get<int64_t>();
  if (j.is_number_unsigned()) return int64_t(j.get<uint64_t>());
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw Error("unsupported parameter value type in results record");
}

ParamMap params_from_json(const json& j) {
  ParamMap out;
  for (const auto& [name, value] : j.items()) {
    out.emplace(name, param_value_from_json(value));
  }
  return out;
}

MetricCell metric_cell_from_json(const json& j) {
  MetricCell cell;
  if (j.is_number()) {
    cell.kind = MetricCell::Kind::Number;
    cell.value = j.get<double>();
  } else if (j.is_string() && j.get<std::string>() == "identical") {
    cell.kind = MetricCell::Kind::Identical;
  } else if (j.is_string() && j.get<std::string>() == "not-applicable") {
    cell.kind = MetricCell::Kind::NotApplicable;
  } else {
    throw Error("metric value must be a number, \"identical\" or "
                "\"not-applicable\"");
  }
  return cell;
}

RunRecord record_from_json(const json& j) {
  RunRecord rec;
  rec.cell_index = j.at("cell_index").get<size_t>();
  rec.cell_seed = j.at("cell_seed").get<uint64_t>();
  rec.image = j.at("image").get<std::string>();
  rec.scheme = j.at("scheme").get<std::string>();
  rec.scheme_params = params_from_json(j.at("scheme_params"));
  for (const auto& stage : j.at("pipeline")) {
    rec.pipeline.push_back({stage.at("attack").get<std::string>(),
                            params_from_json(stage.at("params"))});
  }
  rec.status = j.at("status").get<std::string>();
  if (j.contains("error")) rec.error = j.at("error").get<std::string>();
  if (j.contains("metrics")) {
    for (const auto& [key, value] : j.at("metrics").items()) {
      rec.metrics.emplace(key, metric_cell_from_json(value));
    }
  }
  if (j.contains("bpp")) rec.bpp = j.at("bpp").get<double>();
  return rec;
}

// Group label per record. When a scheme appears with more than one distinct
// parameter set, its labels carry the parameters so the groups stay apart.
class GroupLabeler {
 public:
  GroupLabeler(const ResultsDatabase& db, const std::string& group_key)
      : group_key_(group_key) {
    if (group_key != "scheme" && group_key != "image") {
      throw Error("unknown group key '" + group_key +
                  "' (expected 'scheme' or 'image')");
    }
    if (group_key == "scheme") {
      std::map<std::string, std::set<std::string>> variants;
      for (const auto& rec : db.records) {
        if (rec.status != "ok") continue;
        variants[rec.scheme].insert(params_to_string(rec.scheme_params));
      }
      for (const auto& [scheme, params] : variants) {
        if (params.size() > 1) parameterized_.insert(scheme);
      }
    }
  }

  std::string label(const RunRecord& rec) const {
    if (group_key_ == "image") return rec.image;
    if (parameterized_.count(rec.scheme)) {
      return rec.scheme + params_to_string(rec.scheme_params);
    }
    return rec.scheme;
  }

 private:
  std::string group_key_;
  std::set<std::string> parameterized_;
};

// Locates `param_name` in the record's pipeline. Exactly one stage may carry
// it; none -> nullopt, several -> ambiguous.
std::optional<double> find_pipeline_param(const RunRecord& rec,
                                          const std::string& param_name) {
  std::optional<double> found;
  for (const auto& stage : rec.pipeline) {
    auto it = stage.params.find(param_name);
    if (it == stage.params.end()) continue;
    if (found) {
      throw Error("parameter '" + param_name +
                  "' appears in more than one pipeline stage of cell " +
                  std::to_string(rec.cell_index));
    }
    found = param_as_real(it->second);
  }
  return found;
}

double sorted_mean(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / double(values.size());
}

std::string csv_escape(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string svg_coord(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::string tick_label(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", value);
  return buf;
}

}  // namespace

// ------------------------------------------------------------- database --

ResultsDatabase ResultsDatabase::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open results database '" + file.string() + "'");
  ResultsDatabase db;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& ex) {
      throw Error("results database line " + std::to_string(line_no) +
                  ": " + ex.what());
    }
    try {
      if (line_no == 1) {
        db.format = j.at("format").get<std::string>();
        if (db.format != "wmbench-results-v1") {
          throw Error("unknown results format '" + db.format + "'");
        }
        db.tool_version = j.value("tool_version", "");
        db.created_at = j.value("created_at", "");
        const json& profile = j.at("profile");
        db.profile_id = profile.value("profile_id", "");
        if (profile.contains("metrics")) {
          db.metric_ids = profile.at("metrics").get<std::vector<std::string>>();
        }
      } else {
        db.records.push_back(record_from_json(j));
      }
    } catch (const json::exception& ex) {
      throw Error("results database line " + std::to_string(line_no) +
                  ": " + ex.what());
    }
  }
  if (line_no == 0) {
    throw Error("results database '" + file.string() + "' is empty");
  }
  return db;
}

std::string ResultsDatabase::resolve_metric_key(
    const std::string& metric) const {
  std::set<std::string> available;
  for (const auto& rec : records) {
    if (rec.status != "ok") continue;
    for (const auto& [key, cell] : rec.metrics) available.insert(key);
  }
  if (available.count(metric)) return metric;
  const std::string attacked = metric + ".attacked";
  if (available.count(attacked)) return attacked;
  std::string list;
  for (const auto& key : available) {
    if (!list.empty()) list += ", ";
    list += key;
  }
  throw Error("metric '" + metric + "' not found in results (available: " +
              (list.empty() ? "none" : list) + ")");
}

// ---------------------------------------------------------- aggregation --

Aggregation aggregate_by_attack_param(const ResultsDatabase& db,
                               const std::string& metric_key,
                               const std::string& param_name,
                               const std::string& group_key) {
  GroupLabeler labeler(db, group_key);
  struct Bucket {
    std::vector<double> values;
    size_t excluded = 0;
  };
  std::map<std::string, std::map<double, Bucket>> groups;
  bool param_seen = false;
  for (const auto& rec : db.records) {
    if (rec.status != "ok") continue;
    const std::optional<double> x = find_pipeline_param(rec, param_name);
    if (!x) continue;
    param_seen = true;
    Bucket& bucket = groups[labeler.label(rec)][*x];
    auto it = rec.metrics.find(metric_key);
    if (it != rec.metrics.end() && it->second.is_number()) {
      bucket.values.push_back(it->second.value);
    } else {
      ++bucket.excluded;
    }
  }
  if (!param_seen) {
    throw Error("parameter '" + param_name +
                "' does not occur in any record's pipeline");
  }
  Aggregation out;
  out.metric_key = metric_key;
  out.axis_label = param_name;
  for (auto& [label, buckets] : groups) {
    Series series;
    series.label = label;
    for (auto& [x, bucket] : buckets) {
      SeriesPoint point;
      point.x = x;
      point.count = bucket.values.size();
      point.excluded = bucket.excluded;
      point.mean = bucket.values.empty() ? 0.0 : sorted_mean(bucket.values);
      series.points.push_back(point);
    }
    out.series.push_back(std::move(series));
  }
  return out;
}

PiecewiseCurve::PiecewiseCurve(std::vector<std::pair<double, double>> knots) {
  if (knots.empty()) throw Error("piecewise curve needs at least one knot");
  std::sort(knots.begin(), knots.end());
  for (size_t i = 0; i < knots.size();) {
    size_t j = i;
    double sum = 0.0;
    while (j < knots.size() && knots[j].first == knots[i].first) {
      sum += knots[j].second;
      ++j;
    }
    knots_.emplace_back(knots[i].first, sum / double(j - i));
    i = j;
  }
}

bool PiecewiseCurve::covers(double x) const {
  return x >= knots_.front().first && x <= knots_.back().first;
}

double PiecewiseCurve::min_x() const { return knots_.front().first; }
double PiecewiseCurve::max_x() const { return knots_.back().first; }

double PiecewiseCurve::evaluate(double x) const {
  if (!covers(x)) throw Error("curve evaluated outside its domain");
  auto it = std::lower_bound(
      knots_.begin(), knots_.end(), x,
      [](const std::pair<double, double>& k, double v) { return k.first < v; });
  if (it != knots_.end() && it->first == x) return it->second;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (x - lo.first) / (hi.first - lo.first);
  return lo.second + t * (hi.second - lo.second);
}

Series average_curves(const std::string& label,
                      const std::vector<PiecewiseCurve>& curves, int samples) {
  if (curves.empty()) throw Error("cannot average zero curves");
  if (samples < 2) samples = 2;
  double lo = curves.front().min_x();
  double hi = curves.front().max_x();
  for (const auto& curve : curves) {
    lo = std::min(lo, curve.min_x());
    hi = std::max(hi, curve.max_x());
  }
  Series series;
  series.label = label;
  const int n = (hi == lo) ? 1 : samples;
  for (int j = 0; j < n; ++j) {
    const double x =
        (n == 1) ? lo : lo + (hi - lo) * double(j) / double(n - 1);
    double sum = 0.0;
    size_t count = 0;
    for (const auto& curve : curves) {
      if (!curve.covers(x)) continue;  // zero-extended: adds nothing
      sum += curve.evaluate(x);
      ++count;
    }
    SeriesPoint point;
    point.x = x;
    if (count > 0) {
      point.mean = sum / double(count);
      point.count = count;
    }
    series.points.push_back(point);
  }
  return series;
}

Aggregation aggregate_by_bpp(const ResultsDatabase& db,
                             const std::string& metric_key,
                             const std::string& group_key, int samples) {
  GroupLabeler labeler(db, group_key);
  // (group, image) -> knots
  std::map<std::string, std::map<std::string, std::vector<std::pair<double, double>>>>
      knots;
  for (const auto& rec : db.records) {
    if (rec.status != "ok" || !rec.bpp) continue;
    auto it = rec.metrics.find(metric_key);
    if (it == rec.metrics.end() || !it->second.is_number()) continue;
    knots[labeler.label(rec)][rec.image].emplace_back(*rec.bpp,
                                                      it->second.value);
  }
  if (knots.empty()) {
    throw Error("no usable records with bpp and metric '" + metric_key + "'");
  }
  Aggregation out;
  out.metric_key = metric_key;
  out.axis_label = "bpp";
  for (auto& [label, by_image] : knots) {
    std::vector<PiecewiseCurve> curves;
    curves.reserve(by_image.size());
    for (auto& [image, pts] : by_image) {
      curves.emplace_back(std::move(pts));
    }
    out.series.push_back(average_curves(label, curves, samples));
  }
  return out;
}

// -------------------------------------------------------------- outputs --

void emit_table(const Aggregation& aggregation,
              const std::filesystem::path& file) {
  if (file.has_parent_path()) {
    std::filesystem::create_directories(file.parent_path());
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open CSV output '" + file.string() + "'");

  // Union of abscissae; exact equality is fine because equal x values come
  // from identical text in the database.
  std::vector<double> xs;
  for (const auto& series : aggregation.series) {
    for (const auto& point : series.points) xs.push_back(point.x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  out << csv_escape(aggregation.axis_label);
  for (const auto& series : aggregation.series) {
    out << ',' << csv_escape(series.label) << ','
        << csv_escape(series.label + ".count");
  }
  out << '\n';
  for (const double x : xs) {
    out << fmt_double(x);
    for (const auto& series : aggregation.series) {
      auto it = std::find_if(
          series.points.begin(), series.points.end(),
          [&](const SeriesPoint& p) { return p.x == x; });
      if (it == series.points.end()) {
        out << ",,";
      } else if (it->count == 0) {
        out << ",," << 0;
      } else {
        out << ',' << fmt_double(it->mean) << ',' << it->count;
      }
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw Error("writing CSV '" + file.string() + "' failed");
}

void emit_plot(const Aggregation& aggregation, const std::string& title,
              const std::filesystem::path& file) {
  if (file.has_parent_path()) {
    std::filesystem::create_directories(file.parent_path());
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open SVG output '" + file.string() + "'");

  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
                                   "#bcbd22", "#17becf"};
  constexpr int kPaletteSize = 10;
  const double width = 860, height = 540;
  const double left = 70, right = 660, top = 50, bottom = 480;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (const auto& series : aggregation.series) {
    for (const auto& point : series.points) {
      if (point.count == 0) continue;
      if (!any) {
        xmin = xmax = point.x;
        ymin = ymax = point.mean;
        any = true;
      } else {
        xmin = std::min(xmin, point.x);
        xmax = std::max(xmax, point.x);
        ymin = std::min(ymin, point.mean);
        ymax = std::max(ymax, point.mean);
      }
    }
  }
  if (xmax == xmin) {
    xmin -= 1;
    xmax += 1;
  }
  if (ymax == ymin) {
    ymin -= 1;
    ymax += 1;
  } else {
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
  }
  auto px = [&](double x) {
    return left + (x - xmin) / (xmax - xmin) * (right - left);
  };
  auto py = [&](double y) {
    return bottom - (y - ymin) / (ymax - ymin) * (bottom - top);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\" font-family=\"sans-serif\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << svg_coord((left + right) / 2) << "\" y=\"28\" "
      << "text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title)
      << "</text>\n";

  // Frame + grid ticks.
  out << "<rect x=\"" << svg_coord(left) << "\" y=\"" << svg_coord(top)
      << "\" width=\"" << svg_coord(right - left) << "\" height=\""
      << svg_coord(bottom - top)
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  constexpr int kTicks = 5;
  for (int t = 0; t < kTicks; ++t) {
    const double fx = xmin + (xmax - xmin) * double(t) / (kTicks - 1);
    const double fy = ymin + (ymax - ymin) * double(t) / (kTicks - 1);
    const double gx = px(fx);
    const double gy = py(fy);
    out << "<line x1=\"" << svg_coord(gx) << "\" y1=\"" << svg_coord(bottom)
        << "\" x2=\"" << svg_coord(gx) << "\" y2=\"" << svg_coord(bottom + 5)
        << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << svg_coord(gx) << "\" y=\"" << svg_coord(bottom + 20)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(fx)
        << "</text>\n";
    out << "<line x1=\"" << svg_coord(left - 5) << "\" y1=\"" << svg_coord(gy)
        << "\" x2=\"" << svg_coord(left) << "\" y2=\"" << svg_coord(gy)
        << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << svg_coord(left - 9) << "\" y=\""
        << svg_coord(gy + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
        << tick_label(fy) << "</text>\n";
  }
  out << "<text x=\"" << svg_coord((left + right) / 2) << "\" y=\""
      << svg_coord(height - 14) << "\" text-anchor=\"middle\" "
      << "font-size=\"13\">" << xml_escape(aggregation.axis_label)
      << "</text>\n";
  out << "<text x=\"20\" y=\"" << svg_coord((top + bottom) / 2)
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 "
      << svg_coord((top + bottom) / 2) << ")\">"
      << xml_escape(aggregation.metric_key) << "</text>\n";

  if (!any) {
    out << "<text x=\"" << svg_coord((left + right) / 2) << "\" y=\""
        << svg_coord((top + bottom) / 2)
        << "\" text-anchor=\"middle\" font-size=\"14\" fill=\"#888888\">"
        << "no data</text>\n";
  }

  size_t color_index = 0;
  for (const auto& series : aggregation.series) {
    const char* color = kPalette[color_index % kPaletteSize];
    ++color_index;
    // Split into segments at gaps (points with no value).
    std::vector<std::vector<const SeriesPoint*>> segments(1);
    for (const auto& point : series.points) {
      if (point.count == 0) {
        if (!segments.back().empty()) segments.emplace_back();
      } else {
        segments.back().push_back(&point);
      }
    }
    for (const auto& segment : segments) {
      if (segment.size() < 2) continue;
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (size_t i = 0; i < segment.size(); ++i) {
        if (i) out << ' ';
        out << svg_coord(px(segment[i]->x)) << ','
            << svg_coord(py(segment[i]->mean));
      }
      out << "\"/>\n";
    }
    size_t plotted = 0;
    for (const auto& point : series.points) {
      if (point.count > 0) ++plotted;
    }
    if (plotted <= 40) {
      for (const auto& point : series.points) {
        if (point.count == 0) continue;
        out << "<circle cx=\"" << svg_coord(px(point.x)) << "\" cy=\""
            << svg_coord(py(point.mean)) << "\" r=\"2.5\" fill=\"" << color
            << "\"/>\n";
      }
    }
  }

  // Legend.
  double ly = top + 10;
  color_index = 0;
  for (const auto& series : aggregation.series) {
    const char* color = kPalette[color_index % kPaletteSize];
    ++color_index;
    out << "<line x1=\"" << svg_coord(right + 14) << "\" y1=\""
        << svg_coord(ly) << "\" x2=\"" << svg_coord(right + 38) << "\" y2=\""
        << svg_coord(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << svg_coord(right + 44) << "\" y=\""
        << svg_coord(ly + 4) << "\" font-size=\"12\">"
        << xml_escape(series.label) << "</text>\n";
    ly += 20;
  }
  out << "</svg>\n";
  out.flush();
  if (!out) throw Error("writing SVG '" + file.string() + "' failed");
}

Aggregation analyze_results(const AnalyzeRequest& request) {
  const ResultsDatabase db = ResultsDatabase::load(request.results_path);
  const std::string metric_key = db.resolve_metric_key(request.metric);
  Aggregation aggregation =
      request.against == "bpp"
          ? aggregate_by_bpp(db, metric_key, request.group, request.samples)
          : aggregate_by_attack_param(db, metric_key, request.against, request.group);
  if (!request.csv_path.empty()) emit_table(aggregation, request.csv_path);
  if (!request.svg_path.empty()) {
    emit_plot(aggregation, metric_key + " vs " + aggregation.axis_label,
             request.svg_path);
  }
  return aggregation;
}

}  // namespace wmbench
