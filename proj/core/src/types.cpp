#include "wmbench/types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace wmbench {

ValidationError::ValidationError(std::vector<std::string> errors)
    : Error([&errors] {
        std::ostringstream os;
        os << "profile validation failed with " << errors.size()
           << (errors.size() == 1 ? " error:" : " errors:");
        for (const auto& e : errors) os << "\n  - " << e;
        return os.str();
      }()),
      errors_(std::move(errors)) {}

std::string to_string(MediaKind kind) {
  switch (kind) {
    case MediaKind::GrayscaleImage:
      return "grayscale-image";
  }
  return "unknown";
}

Work::Work(int width, int height, uint8_t fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0)
    throw Error("work dimensions must be positive");
  pixels_.assign(size_t(width) * height, fill);
}

Work::Work(int width, int height, std::vector<uint8_t> pixels,
           std::string origin_id)
    : width_(width),
      height_(height),
      pixels_(std::move(pixels)),
      origin_id_(std::move(origin_id)) {
  if (width <= 0 || height <= 0)
    throw Error("work dimensions must be positive");
  if (pixels_.size() != size_t(width) * height)
    throw Error("pixel buffer size does not match work dimensions");
}

bool Work::conforms_to_block_grid() const {
  return width_ >= 16 && height_ >= 16 && width_ % 8 == 0 && height_ % 8 == 0;
}

TamperMap::TamperMap(int bw, int bh, bool value) : blocks_w(bw), blocks_h(bh) {
  if (bw <= 0 || bh <= 0) throw Error("tamper map grid must be positive");
  flags.assign(size_t(bw) * bh, value ? 1 : 0);
}

size_t TamperMap::count_tampered() const {
  return size_t(std::count_if(flags.begin(), flags.end(),
                              [](uint8_t f) { return f != 0; }));
}

void WatermarkPayload::validate() const {
  for (uint8_t b : bits)
    if (b > 1) throw Error("watermark payload bits must be 0 or 1");
  if (!block_map) return;
  // Ranges must stay inside the bit vector and must not overlap.
  std::vector<std::pair<uint32_t, uint32_t>> spans;
  spans.reserve(block_map->size());
  for (const BitRange& r : *block_map) {
    if (size_t(r.offset) + r.length > bits.size())
      throw Error("watermark block map range exceeds payload length");
    if (r.length > 0) spans.emplace_back(r.offset, r.offset + r.length);
  }
  std::sort(spans.begin(), spans.end());
  for (size_t i = 1; i < spans.size(); ++i)
    if (spans[i].first < spans[i - 1].second)
      throw Error("watermark block map ranges overlap");
}

std::string to_string(WatermarkPayload::Kind kind) {
  switch (kind) {
    case WatermarkPayload::Kind::Authentication:
      return "authentication";
    case WatermarkPayload::Kind::Restoration:
      return "restoration";
    case WatermarkPayload::Kind::Generic:
      return "generic";
  }
  return "unknown";
}

std::string to_string(ParamType type) {
  switch (type) {
    case ParamType::Integer:
      return "integer";
    case ParamType::Real:
      return "real";
    case ParamType::BitString:
      return "bitstring";
    case ParamType::Enum:
      return "enum";
  }
  return "unknown";
}

std::string param_value_to_string(const ParamValue& value) {
  if (std::holds_alternative<int64_t>(value))
    return std::to_string(std::get<int64_t>(value));
  if (std::holds_alternative<double>(value)) {
    double d = std::get<double>(value);
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    (void)ec;
    return std::string(buf, ptr);
  }
  return std::get<std::string>(value);
}

std::string params_to_string(const ParamMap& params) {
  std::string out = "{";
  bool first = true;
  for (const auto& [name, value] : params) {
    if (!first) out += ',';
    first = false;
    out += name;
    out += '=';
    out += param_value_to_string(value);
  }
  out += '}';
  return out;
}

double param_as_real(const ParamValue& value) {
  if (std::holds_alternative<int64_t>(value))
    return double(std::get<int64_t>(value));
  if (std::holds_alternative<double>(value)) return std::get<double>(value);
  throw Error("parameter value is not numeric");
}

int64_t param_as_int(const ParamValue& value) {
  if (std::holds_alternative<int64_t>(value)) return std::get<int64_t>(value);
  if (std::holds_alternative<double>(value)) {
    double d = std::get<double>(value);
    if (d != std::floor(d)) throw Error("parameter value is not an integer");
    return int64_t(d);
  }
  throw Error("parameter value is not numeric");
}

std::string ParamSpec::check(const ParamValue& value) const {
  switch (type) {
    case ParamType::Integer: {
      if (!std::holds_alternative<int64_t>(value) &&
          !(std::holds_alternative<double>(value) &&
            std::get<double>(value) == std::floor(std::get<double>(value))))
        return "expected an integer for parameter '" + name + "'";
      double v = param_as_real(value);
      if (v < min_value || v > max_value)
        return "value " + param_value_to_string(value) + " for parameter '" +
               name + "' out of range [" + param_value_to_string(min_value) +
               ", " + param_value_to_string(max_value) + "]";
      return {};
    }
    case ParamType::Real: {
      if (!std::holds_alternative<double>(value) &&
          !std::holds_alternative<int64_t>(value))
        return "expected a real number for parameter '" + name + "'";
      double v = param_as_real(value);
      if (!(v >= min_value && v <= max_value))
        return "value " + param_value_to_string(value) + " for parameter '" +
               name + "' out of range [" + param_value_to_string(min_value) +
               ", " + param_value_to_string(max_value) + "]";
      return {};
    }
    case ParamType::BitString: {
      if (!std::holds_alternative<std::string>(value))
        return "expected a bit string for parameter '" + name + "'";
      const std::string& s = std::get<std::string>(value);
      if (s.empty()) return "bit string parameter '" + name + "' is empty";
      for (char c : s)
        if (c != '0' && c != '1')
          return "bit string parameter '" + name +
                 "' contains a character other than 0/1";
      return {};
    }
    case ParamType::Enum: {
      if (!std::holds_alternative<std::string>(value))
        return "expected a choice string for parameter '" + name + "'";
      const std::string& s = std::get<std::string>(value);
      if (std::find(choices.begin(), choices.end(), s) == choices.end())
        return "value '" + s + "' for parameter '" + name +
               "' is not one of the declared choices";
      return {};
    }
  }
  return "unknown parameter type";
}

ParamValue param_or_default(const ParamMap& params,
                            const std::vector<ParamSpec>& specs,
                            const std::string& name) {
  auto it = params.find(name);
  if (it != params.end()) return it->second;
  for (const ParamSpec& spec : specs)
    if (spec.name == name) return spec.default_value;
  throw Error("unknown parameter '" + name + "'");
}

std::string to_string(MetricUnits units) {
  switch (units) {
    case MetricUnits::Decibel:
      return "dB";
    case MetricUnits::Unitless:
      return "unitless";
    case MetricUnits::Seconds:
      return "seconds";
    case MetricUnits::Rate:
      return "rate";
  }
  return "unknown";
}

std::string to_string(PluginKind kind) {
  switch (kind) {
    case PluginKind::Scheme:
      return "scheme";
    case PluginKind::Attack:
      return "attack";
    case PluginKind::Metric:
      return "metric";
  }
  return "unknown";
}

std::string to_string(MetricInputs inputs) {
  switch (inputs) {
    case MetricInputs::FullReferencePair:
      return "full-reference-pair";
    case MetricInputs::DecisionVsTruth:
      return "decision-vs-truth";
    case MetricInputs::Timing:
      return "timing";
    case MetricInputs::BitrateCurve:
      return "bitrate-curve";
  }
  return "unknown";
}

}  // namespace wmbench
