#include "wmbench/registry.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include <json.hpp>

#include "wmbench/attacks.hpp"
#include "wmbench/metrics.hpp"
#include "wmbench/schemes.hpp"

namespace wmbench {

namespace {

void check_param_specs(const std::string& id,
                       const std::vector<ParamSpec>& specs) {
  std::set<std::string> names;
  for (const ParamSpec& spec : specs) {
    if (spec.name.empty())
      throw RegistryError("plugin '" + id + "' declares an unnamed parameter");
    if (!names.insert(spec.name).second)
      throw RegistryError("plugin '" + id + "' declares parameter '" +
                          spec.name + "' twice");
    if ((spec.type == ParamType::Integer || spec.type == ParamType::Real) &&
        spec.min_value > spec.max_value)
      throw RegistryError("plugin '" + id + "' parameter '" + spec.name +
                          "' has an empty range");
    if (spec.type == ParamType::Enum && spec.choices.empty())
      throw RegistryError("plugin '" + id + "' parameter '" + spec.name +
                          "' has no choices");
    std::string err = spec.check(spec.default_value);
    if (!err.empty())
      throw RegistryError("plugin '" + id + "' has an inadmissible default: " +
                          err);
  }
}

}  // namespace

template <typename Descriptor>
void Registry::validate_descriptor(const Descriptor& descriptor) {
  if (descriptor.id.empty())
    throw RegistryError("plugin id must not be empty");
  for (char c : descriptor.id)
    if (std::isspace(static_cast<unsigned char>(c)))
      throw RegistryError("plugin id '" + descriptor.id +
                          "' must not contain whitespace");
  check_param_specs(descriptor.id, descriptor.params);
}

RegistrationHandle Registry::register_scheme(SchemeDescriptor descriptor,
                                             SenderFn embed,
                                             ReceiverFn receive) {
  validate_descriptor(descriptor);
  if (!embed || !receive)
    throw RegistryError("scheme '" + descriptor.id +
                        "' needs both sender and receiver functions");
  std::string id = descriptor.id;
  if (schemes_.count(id))
    warnings_.push_back("scheme '" + id + "' was re-registered (shadowed)");
  schemes_[id] = SchemeEntry{std::move(descriptor), std::move(embed),
                             std::move(receive)};
  return {PluginKind::Scheme, id};
}

RegistrationHandle Registry::register_attack(AttackDescriptor descriptor,
                                             AttackFn apply) {
  validate_descriptor(descriptor);
  if (!apply)
    throw RegistryError("attack '" + descriptor.id +
                        "' needs an apply function");
  std::string id = descriptor.id;
  if (attacks_.count(id))
    warnings_.push_back("attack '" + id + "' was re-registered (shadowed)");
  attacks_[id] = AttackEntry{std::move(descriptor), std::move(apply)};
  return {PluginKind::Attack, id};
}

RegistrationHandle Registry::register_metric(MetricDescriptor descriptor,
                                             FullReferenceMetricFn full_reference,
                                             DecisionMetricFn decision) {
  validate_descriptor(descriptor);
  if (descriptor.inputs == MetricInputs::FullReferencePair && !full_reference)
    throw RegistryError("metric '" + descriptor.id +
                        "' declares full-reference inputs but provides no "
                        "full-reference function");
  if (descriptor.inputs == MetricInputs::DecisionVsTruth && !decision)
    throw RegistryError("metric '" + descriptor.id +
                        "' declares decision inputs but provides no decision "
                        "function");
  std::string id = descriptor.id;
  if (metrics_.count(id))
    warnings_.push_back("metric '" + id + "' was re-registered (shadowed)");
  metrics_[id] = MetricEntry{std::move(descriptor), std::move(full_reference),
                             std::move(decision)};
  return {PluginKind::Metric, id};
}

bool Registry::has_scheme(const std::string& id) const {
  return schemes_.count(id) != 0;
}
bool Registry::has_attack(const std::string& id) const {
  return attacks_.count(id) != 0;
}
bool Registry::has_metric(const std::string& id) const {
  return metrics_.count(id) != 0;
}

const Registry::SchemeEntry& Registry::scheme(const std::string& id) const {
  auto it = schemes_.find(id);
  if (it == schemes_.end())
    throw RegistryError("unknown scheme '" + id + "'");
  return it->second;
}

const Registry::AttackEntry& Registry::attack(const std::string& id) const {
  auto it = attacks_.find(id);
  if (it == attacks_.end())
    throw RegistryError("unknown attack '" + id + "'");
  return it->second;
}

const Registry::MetricEntry& Registry::metric(const std::string& id) const {
  auto it = metrics_.find(id);
  if (it == metrics_.end())
    throw RegistryError("unknown metric '" + id + "'");
  return it->second;
}

namespace {

template <typename Map>
std::vector<std::string> sorted_keys(const Map& map) {
  std::vector<std::string> keys;
  keys.reserve(map.size());
  for (const auto& [key, value] : map) keys.push_back(key);
  return keys;  // std::map iterates in sorted order already
}

}  // namespace

std::vector<std::string> Registry::scheme_ids() const {
  return sorted_keys(schemes_);
}
std::vector<std::string> Registry::attack_ids() const {
  return sorted_keys(attacks_);
}
std::vector<std::string> Registry::metric_ids() const {
  return sorted_keys(metrics_);
}

MetricValue Registry::eval_full_reference(const std::string& metric_id,
                                          const Work& reference,
                                          const Work& test,
                                          const ParamMap& params) const {
  const MetricEntry& entry = metric(metric_id);
  if (entry.descriptor.inputs != MetricInputs::FullReferencePair)
    throw RegistryError("metric '" + metric_id + "' expects " +
                        to_string(entry.descriptor.inputs) +
                        " inputs, not a full-reference image pair");
  return entry.full_reference(reference, test, params);
}

std::optional<MetricValue> Registry::eval_decision(const std::string& metric_id,
                                                   const TamperMap& truth,
                                                   const TamperMap& reported,
                                                   const ParamMap& params) const {
  const MetricEntry& entry = metric(metric_id);
  if (entry.descriptor.inputs != MetricInputs::DecisionVsTruth)
    throw RegistryError("metric '" + metric_id + "' expects " +
                        to_string(entry.descriptor.inputs) +
                        " inputs, not a decision/truth map pair");
  return entry.decision(truth, reported, params);
}

std::vector<std::string> Registry::check_params(
    const std::vector<ParamSpec>& specs, const ParamMap& params,
    const std::string& context) {
  std::vector<std::string> errors;
  for (const auto& [name, value] : params) {
    const ParamSpec* spec = nullptr;
    for (const ParamSpec& s : specs)
      if (s.name == name) {
        spec = &s;
        break;
      }
    if (!spec) {
      errors.push_back(context + ": unknown parameter '" + name + "'");
      continue;
    }
    std::string err = spec->check(value);
    if (!err.empty()) errors.push_back(context + ": " + err);
  }
  return errors;
}

// -------------------------------------------------------------- built-ins --

namespace {

ParamSpec real_param(std::string name, double min, double max, double dflt) {
  ParamSpec p;
  p.name = std::move(name);
  p.type = ParamType::Real;
  p.min_value = min;
  p.max_value = max;
  p.default_value = dflt;
  return p;
}

ParamSpec int_param(std::string name, int64_t min, int64_t max, int64_t dflt) {
  ParamSpec p;
  p.name = std::move(name);
  p.type = ParamType::Integer;
  p.min_value = double(min);
  p.max_value = double(max);
  p.default_value = dflt;
  return p;
}

AttackDescriptor identity_descriptor() {
  AttackDescriptor d;
  d.id = "identity";
  d.display_name = "Identity (no-attack baseline)";
  d.notes = "Passes the work through unchanged.";
  d.capabilities.content_changing = false;
  return d;
}

AttackDescriptor copy_paste_descriptor() {
  AttackDescriptor d;
  d.id = "copy-paste";
  d.display_name = "Block-aligned copy-paste tampering";
  d.notes =
      "Copies a block-aligned square of about area_fraction of the image "
      "onto a disjoint block-aligned position; reports per-block ground "
      "truth.";
  d.params.push_back(real_param("area_fraction", 0.001, 0.5, 0.1));
  d.capabilities.content_changing = true;
  return d;
}

AttackDescriptor jpeg_descriptor() {
  AttackDescriptor d;
  d.id = "jpeg";
  d.display_name = "Baseline JPEG compression round trip";
  d.notes =
      "Grayscale baseline JPEG encode/decode at quality qf; reports bpp and "
      "encoded byte count.";
  d.params.push_back(int_param("qf", 1, 100, 75));
  d.capabilities.content_changing = false;
  return d;
}

AttackDescriptor additive_descriptor() {
  AttackDescriptor d;
  d.id = "additive-gaussian";
  d.display_name = "Additive white Gaussian noise";
  d.notes = "out = clamp(round(x + n)), n ~ N(mean, variance).";
  d.params.push_back(real_param("mean", -255.0, 255.0, 0.0));
  d.params.push_back(real_param("variance", 0.0, 10000.0, 10.0));
  d.capabilities.content_changing = false;
  return d;
}

AttackDescriptor multiplicative_descriptor() {
  AttackDescriptor d;
  d.id = "multiplicative-gaussian";
  d.display_name = "Multiplicative Gaussian noise";
  d.notes = "out = clamp(round(x * (1 + n))), n ~ N(mean, variance / 255^2).";
  d.params.push_back(real_param("mean", -1.0, 1.0, 0.0));
  d.params.push_back(real_param("variance", 0.0, 10000.0, 10.0));
  d.capabilities.content_changing = false;
  return d;
}

MetricDescriptor psnr_descriptor() {
  MetricDescriptor d;
  d.id = "psnr";
  d.display_name = "Peak signal-to-noise ratio";
  d.notes = "Whole-image PSNR, peak 255; identical inputs yield a sentinel.";
  d.inputs = MetricInputs::FullReferencePair;
  d.units = MetricUnits::Decibel;
  return d;
}

MetricDescriptor ssim_descriptor() {
  MetricDescriptor d;
  d.id = "ssim";
  d.display_name = "Mean structural similarity";
  d.notes =
      "11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03, range 255, "
      "valid windows only.";
  d.inputs = MetricInputs::FullReferencePair;
  d.units = MetricUnits::Unitless;
  return d;
}

MetricDescriptor fp_descriptor() {
  MetricDescriptor d;
  d.id = "fp-rate";
  d.display_name = "False-positive rate (per untampered block)";
  d.inputs = MetricInputs::DecisionVsTruth;
  d.units = MetricUnits::Rate;
  return d;
}

MetricDescriptor fn_descriptor() {
  MetricDescriptor d;
  d.id = "fn-rate";
  d.display_name = "False-negative rate (per tampered block)";
  d.inputs = MetricInputs::DecisionVsTruth;
  d.units = MetricUnits::Rate;
  return d;
}

}  // namespace

Registry Registry::with_builtins() {
  Registry registry;

  registry.register_scheme(rsf_descriptor(), rsf_embed, rsf_receive);
  registry.register_scheme(rssf_descriptor(), rssf_embed, rssf_receive);

  registry.register_attack(
      identity_descriptor(),
      [](const Work& input, const ParamMap&, uint64_t) {
        return AttackOutcome{input, std::nullopt, {}};
      });

  {
    AttackDescriptor d = copy_paste_descriptor();
    auto specs = d.params;
    registry.register_attack(
        std::move(d),
        [specs](const Work& input, const ParamMap& params, uint64_t seed) {
          double fraction =
              param_as_real(param_or_default(params, specs, "area_fraction"));
          return copy_paste_attack(input, fraction, seed);
        });
  }
  {
    AttackDescriptor d = jpeg_descriptor();
    auto specs = d.params;
    registry.register_attack(
        std::move(d),
        [specs](const Work& input, const ParamMap& params, uint64_t) {
          int qf = int(param_as_int(param_or_default(params, specs, "qf")));
          JpegResult r = jpeg_attack(input, qf);
          AttackOutcome outcome;
          outcome.output = std::move(r.decoded);
          outcome.stats["bpp"] = r.bpp;
          outcome.stats["encoded_bytes"] = double(r.encoded_bytes);
          return outcome;
        });
  }
  {
    AttackDescriptor d = additive_descriptor();
    auto specs = d.params;
    registry.register_attack(
        std::move(d),
        [specs](const Work& input, const ParamMap& params, uint64_t seed) {
          double mean = param_as_real(param_or_default(params, specs, "mean"));
          double variance =
              param_as_real(param_or_default(params, specs, "variance"));
          return AttackOutcome{
              additive_gaussian_attack(input, mean, variance, seed),
              std::nullopt,
              {}};
        });
  }
  {
    AttackDescriptor d = multiplicative_descriptor();
    auto specs = d.params;
    registry.register_attack(
        std::move(d),
        [specs](const Work& input, const ParamMap& params, uint64_t seed) {
          double mean = param_as_real(param_or_default(params, specs, "mean"));
          double variance =
              param_as_real(param_or_default(params, specs, "variance"));
          return AttackOutcome{
              multiplicative_gaussian_attack(input, mean, variance, seed),
              std::nullopt,
              {}};
        });
  }

  registry.register_metric(
      psnr_descriptor(),
      [](const Work& reference, const Work& test, const ParamMap&) {
        return psnr(reference, test);
      },
      nullptr);
  registry.register_metric(
      ssim_descriptor(),
      [](const Work& reference, const Work& test, const ParamMap&) {
        return ssim(reference, test);
      },
      nullptr);
  registry.register_metric(
      fp_descriptor(), nullptr,
      [](const TamperMap& truth, const TamperMap& reported,
         const ParamMap&) -> std::optional<MetricValue> {
        FpFnRates rates = fp_fn_rates(truth, reported);
        if (!rates.fp) return std::nullopt;
        return MetricValue::number(*rates.fp, MetricUnits::Rate);
      });
  registry.register_metric(
      fn_descriptor(), nullptr,
      [](const TamperMap& truth, const TamperMap& reported,
         const ParamMap&) -> std::optional<MetricValue> {
        FpFnRates rates = fp_fn_rates(truth, reported);
        if (!rates.fn) return std::nullopt;
        return MetricValue::number(*rates.fn, MetricUnits::Rate);
      });

  return registry;
}

// -------------------------------------------------------------- discovery --

namespace {

ParamValue param_value_from_json(const nlohmann::json& value,
                                 ParamType type) {
  switch (type) {
    case ParamType::Integer:
      if (!value.is_number_integer())
        throw RegistryError("integer parameter default is not an integer");
      return value.get<int64_t>();
    case ParamType::Real:
      if (!value.is_number())
        throw RegistryError("real parameter default is not a number");
      return value.get<double>();
    case ParamType::BitString:
    case ParamType::Enum:
      if (!value.is_string())
        throw RegistryError("string parameter default is not a string");
      return value.get<std::string>();
  }
  throw RegistryError("unknown parameter type");
}

ParamType param_type_from_string(const std::string& s) {
  if (s == "integer") return ParamType::Integer;
  if (s == "real") return ParamType::Real;
  if (s == "bitstring") return ParamType::BitString;
  if (s == "enum") return ParamType::Enum;
  throw RegistryError("unknown parameter type '" + s + "'");
}

std::vector<ParamSpec> params_from_json(const nlohmann::json& doc) {
  std::vector<ParamSpec> specs;
  if (!doc.contains("params")) return specs;
  if (!doc["params"].is_array())
    throw RegistryError("manifest 'params' must be an array");
  for (const auto& p : doc["params"]) {
    ParamSpec spec;
    spec.name = p.at("name").get<std::string>();
    spec.type = param_type_from_string(p.at("type").get<std::string>());
    if (spec.type == ParamType::Integer || spec.type == ParamType::Real) {
      spec.min_value = p.at("min").get<double>();
      spec.max_value = p.at("max").get<double>();
    }
    if (spec.type == ParamType::Enum)
      spec.choices = p.at("choices").get<std::vector<std::string>>();
    spec.default_value = param_value_from_json(p.at("default"), spec.type);
    specs.push_back(std::move(spec));
  }
  return specs;
}

}  // namespace

void Registry::discover_plugins(
    const std::vector<std::filesystem::path>& search_paths) {
  for (const auto& dir : search_paths) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
      warnings_.push_back("plugin path '" + dir.string() +
                          "' is not a readable directory");
      continue;
    }
    std::vector<std::filesystem::path> manifests;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        manifests.push_back(entry.path());
    }
    std::sort(manifests.begin(), manifests.end());

    for (const auto& file : manifests) {
      try {
        std::ifstream in(file);
        if (!in) throw RegistryError("cannot open manifest");
        nlohmann::json doc = nlohmann::json::parse(in);

        std::string id = doc.at("id").get<std::string>();
        std::string kind = doc.at("kind").get<std::string>();
        std::string display_name =
            doc.value("display_name", std::string(id));
        std::string entry_point = doc.value("entry_point", id);
        std::vector<ParamSpec> params = params_from_json(doc);
        const auto caps = doc.value("capabilities", nlohmann::json::object());

        if (kind == "scheme") {
          const SchemeEntry& impl = scheme(entry_point);  // throws if unknown
          SchemeDescriptor d;
          d.id = id;
          d.display_name = display_name;
          d.notes = doc.value("notes", impl.descriptor.notes);
          d.params = params.empty() ? impl.descriptor.params : params;
          d.capabilities = impl.descriptor.capabilities;
          if (caps.contains("produces_decision_map"))
            d.capabilities.produces_decision_map =
                caps["produces_decision_map"].get<bool>();
          if (caps.contains("produces_restored"))
            d.capabilities.produces_restored =
                caps["produces_restored"].get<bool>();
          if (caps.contains("requires_external_watermark"))
            d.capabilities.requires_external_watermark =
                caps["requires_external_watermark"].get<bool>();
          if (caps.contains("requires_key"))
            d.capabilities.requires_key = caps["requires_key"].get<bool>();
          SenderFn embed = impl.embed;
          ReceiverFn receive = impl.receive;
          register_scheme(std::move(d), std::move(embed), std::move(receive));
        } else if (kind == "attack") {
          const AttackEntry& impl = attack(entry_point);
          AttackDescriptor d;
          d.id = id;
          d.display_name = display_name;
          d.notes = doc.value("notes", impl.descriptor.notes);
          d.params = params.empty() ? impl.descriptor.params : params;
          d.capabilities = impl.descriptor.capabilities;
          if (caps.contains("content_changing"))
            d.capabilities.content_changing =
                caps["content_changing"].get<bool>();
          AttackFn apply = impl.apply;
          register_attack(std::move(d), std::move(apply));
        } else if (kind == "metric") {
          const MetricEntry& impl = metric(entry_point);
          MetricDescriptor d;
          d.id = id;
          d.display_name = display_name;
          d.notes = doc.value("notes", impl.descriptor.notes);
          d.params = params.empty() ? impl.descriptor.params : params;
          // Input kind and units always come from the implementation: a
          // manifest cannot change how the framework calls the function.
          d.inputs = impl.descriptor.inputs;
          d.units = impl.descriptor.units;
          FullReferenceMetricFn fr = impl.full_reference;
          DecisionMetricFn dm = impl.decision;
          register_metric(std::move(d), std::move(fr), std::move(dm));
        } else {
          throw RegistryError("unknown plugin kind '" + kind + "'");
        }
      } catch (const std::exception& e) {
        warnings_.push_back("skipping plugin manifest '" + file.string() +
                            "': " + e.what());
      }
    }
  }
}

}  // namespace wmbench
