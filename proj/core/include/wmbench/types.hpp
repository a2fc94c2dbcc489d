#pragma once

// Core domain model: works (media items), watermark payloads, tamper maps,
// scheme input/output bundles, parameter specifications and the typed
// contracts that schemes, attacks and metrics implement.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wmbench {

// ---------------------------------------------------------------- errors --

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class RegistryError : public Error {
 public:
  using Error::Error;
};

class MediaError : public Error {
 public:
  using Error::Error;
};

class CodecError : public Error {
 public:
  using Error::Error;
};

class AttackError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class SchemeError : public Error {
 public:
  using Error::Error;
};

class AnalyzerError : public Error {
 public:
  using Error::Error;
};

// Profile validation reports every problem found, not just the first one.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

// ------------------------------------------------------------------ work --

enum class MediaKind { GrayscaleImage };

std::string to_string(MediaKind kind);

// A single media item: an 8-bit grayscale image, row-major top-down.
//
// The type itself only requires positive dimensions so that metrics can be
// exercised on tiny synthetic inputs; the block-grid constraints needed by
// the block-based schemes (dimensions >= 16 and multiples of 8) are enforced
// at media ingestion time (see MediaCatalog) and re-checked by the schemes.
class Work {
 public:
  Work() = default;
  Work(int width, int height, uint8_t fill = 0);
  Work(int width, int height, std::vector<uint8_t> pixels,
       std::string origin_id = {});

  int width() const { return width_; }
  int height() const { return height_; }
  int bit_depth() const { return 8; }
  MediaKind media_kind() const { return MediaKind::GrayscaleImage; }
  const std::string& origin_id() const { return origin_id_; }
  void set_origin_id(std::string id) { origin_id_ = std::move(id); }

  size_t pixel_count() const { return pixels_.size(); }
  uint8_t at(int x, int y) const { return pixels_[size_t(y) * width_ + x]; }
  uint8_t& at(int x, int y) { return pixels_[size_t(y) * width_ + x]; }
  const std::vector<uint8_t>& pixels() const { return pixels_; }
  std::vector<uint8_t>& pixels() { return pixels_; }

  // True when the image satisfies the block-based scheme precondition:
  // both dimensions >= 16 and multiples of 8.
  bool conforms_to_block_grid() const;

  bool same_dimensions(const Work& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }
  bool operator==(const Work& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           pixels_ == other.pixels_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<uint8_t> pixels_;
  std::string origin_id_;
};

// ------------------------------------------------------------- tamper map --

// Per-8x8-block tamper decisions over a block grid (row-major by block row).
struct TamperMap {
  int blocks_w = 0;
  int blocks_h = 0;
  std::vector<uint8_t> flags;  // 0 = untampered, 1 = tampered

  TamperMap() = default;
  TamperMap(int bw, int bh, bool value = false);

  int block_count() const { return blocks_w * blocks_h; }
  bool at(int bx, int by) const {
    return flags[size_t(by) * blocks_w + bx] != 0;
  }
  void set(int bx, int by, bool v) {
    flags[size_t(by) * blocks_w + bx] = v ? 1 : 0;
  }
  size_t count_tampered() const;
  bool same_grid(const TamperMap& other) const {
    return blocks_w == other.blocks_w && blocks_h == other.blocks_h;
  }
  bool operator==(const TamperMap& other) const {
    return blocks_w == other.blocks_w && blocks_h == other.blocks_h &&
           flags == other.flags;
  }
};

// --------------------------------------------------------------- payloads --

// Contiguous bit range inside a payload bit vector.
struct BitRange {
  uint32_t offset = 0;
  uint32_t length = 0;
};

// A watermark as a bit vector, optionally with a per-block map describing
// which bit range belongs to which block (block index -> range).
struct WatermarkPayload {
  enum class Kind { Authentication, Restoration, Generic };

  Kind kind = Kind::Generic;
  std::vector<uint8_t> bits;  // one entry per bit, values 0/1
  // When present, entry b is the bit range for block index b. Ranges must be
  // disjoint and lie inside `bits`.
  std::optional<std::vector<BitRange>> block_map;

  // Throws Error when bits contain non-binary values or block_map ranges
  // overlap or exceed the bit vector.
  void validate() const;
};

std::string to_string(WatermarkPayload::Kind kind);

// ------------------------------------------------------------ parameters --

using ParamValue = std::variant<int64_t, double, std::string>;
using ParamMap = std::map<std::string, ParamValue>;

enum class ParamType { Integer, Real, BitString, Enum };

std::string to_string(ParamType type);

// Declared parameter of a scheme/attack/metric: name, type, admissible
// range or choice set, and a default that must itself be admissible.
struct ParamSpec {
  std::string name;
  ParamType type = ParamType::Integer;
  double min_value = 0;                // Integer/Real only
  double max_value = 0;                // Integer/Real only
  std::vector<std::string> choices;    // Enum only
  ParamValue default_value;

  // Returns an error message, or empty string when the value is admissible.
  std::string check(const ParamValue& value) const;
};

// Renders a value with deterministic formatting ('.' decimal separator,
// shortest round-trip representation for reals).
std::string param_value_to_string(const ParamValue& value);

// "{a=1,b=2.5}": names in map order, deterministic value formatting.
std::string params_to_string(const ParamMap& params);

double param_as_real(const ParamValue& value);
int64_t param_as_int(const ParamValue& value);

// Looks the parameter up in `params`, falling back to the default declared
// in `specs`. Throws Error when the parameter is unknown to `specs`.
ParamValue param_or_default(const ParamMap& params,
                            const std::vector<ParamSpec>& specs,
                            const std::string& name);

// -------------------------------------------------------------- metrics --

enum class MetricUnits { Decibel, Unitless, Seconds, Rate };

std::string to_string(MetricUnits units);

// A metric result: either a real value or the distinguished "identical"
// sentinel used by metrics (such as PSNR) whose value is unbounded when the
// two inputs match exactly.
struct MetricValue {
  double value = 0.0;
  bool identical = false;
  MetricUnits units = MetricUnits::Unitless;

  static MetricValue number(double v, MetricUnits u) {
    return MetricValue{v, false, u};
  }
  static MetricValue identical_sentinel(MetricUnits u) {
    return MetricValue{0.0, true, u};
  }
};

// ------------------------------------------------------------ descriptors --

enum class PluginKind { Scheme, Attack, Metric };

std::string to_string(PluginKind kind);

struct SchemeCapabilities {
  bool produces_decision_map = false;
  bool produces_restored = false;
  bool requires_external_watermark = false;
  bool requires_key = false;
};

struct AttackCapabilities {
  // True when the attack deliberately changes content (and therefore reports
  // tamper ground truth); false for signal-processing attacks.
  bool content_changing = false;
};

enum class MetricInputs { FullReferencePair, DecisionVsTruth, Timing, BitrateCurve };

std::string to_string(MetricInputs inputs);

struct SchemeDescriptor {
  std::string id;
  std::string display_name;
  std::string notes;  // free text: fixed algorithm choices that matter for reproducibility
  std::vector<ParamSpec> params;
  SchemeCapabilities capabilities;
};

struct AttackDescriptor {
  std::string id;
  std::string display_name;
  std::string notes;
  std::vector<ParamSpec> params;
  AttackCapabilities capabilities;
};

struct MetricDescriptor {
  std::string id;
  std::string display_name;
  std::string notes;
  std::vector<ParamSpec> params;
  MetricInputs inputs = MetricInputs::FullReferencePair;
  MetricUnits units = MetricUnits::Unitless;
};

// ------------------------------------------------------ scheme contracts --

// Auxiliary side outputs (confidence levels, iteration counts, ...) are kept
// as strings and stored verbatim in run records.
using AuxMap = std::map<std::string, std::string>;

struct SenderOutput {
  Work watermarked;
  std::vector<WatermarkPayload> embedded_watermarks;
  AuxMap aux;
};

struct ReceiverOutput {
  std::vector<WatermarkPayload> extracted_watermarks;
  std::optional<TamperMap> decision_map;
  std::optional<bool> global_decision;
  std::optional<Work> restored;
  AuxMap aux;

  // A receiver must report something; the framework rejects all-empty output.
  bool has_any_output() const {
    return !extracted_watermarks.empty() || decision_map.has_value() ||
           global_decision.has_value() || restored.has_value();
  }
};

// Result of one attack application. `ground_truth` is reported by
// content-changing attacks only. `stats` carries numeric side outputs such
// as the encoded size and bits-per-pixel of a lossy compression attack.
struct AttackOutcome {
  Work output;
  std::optional<TamperMap> ground_truth;
  std::map<std::string, double> stats;
};

// Sender: cover work (+ optional external watermarks and key) -> watermarked
// work. An empty span means "no external watermark"; an empty key string
// means "no key supplied" (schemes that require one derive or reject).
using SenderFn = std::function<SenderOutput(
    const Work& cover, std::span<const WatermarkPayload> watermarks,
    std::string_view key, const ParamMap& params)>;

// Receiver: possibly-attacked work (+ optional original watermarks and key)
// -> extracted watermarks / decisions / restored work.
using ReceiverFn = std::function<ReceiverOutput(
    const Work& test, std::span<const WatermarkPayload> watermarks,
    std::string_view key, const ParamMap& params)>;

// Attack: work + params + seed -> attacked work (+ ground truth for
// content-changing attacks).
using AttackFn = std::function<AttackOutcome(const Work& input,
                                             const ParamMap& params,
                                             uint64_t seed)>;

// Full-reference metric: (reference, test) -> value.
using FullReferenceMetricFn = std::function<MetricValue(
    const Work& reference, const Work& test, const ParamMap& params)>;

// Decision metric: (ground truth, reported) -> value, or nullopt when the
// rate is undefined (empty denominator class).
using DecisionMetricFn = std::function<std::optional<MetricValue>(
    const TamperMap& truth, const TamperMap& reported,
    const ParamMap& params)>;

}  // namespace wmbench
