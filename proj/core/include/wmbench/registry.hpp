#pragma once

// Plugin registry: schemes, attacks and metrics addressable by id, each with
// a descriptor (parameters, capabilities) and its implementation functions.
//
// Built-ins register themselves via with_builtins(). Additional plugins are
// JSON manifest files discovered on search paths; a manifest binds a
// descriptor to a named built-in entry point (the framework runs no
// dynamically loaded code). A later search path wins when two manifests
// declare the same id, with a warning.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wmbench/types.hpp"

namespace wmbench {

struct RegistrationHandle {
  PluginKind kind;
  std::string id;
};

class Registry {
 public:
  struct SchemeEntry {
    SchemeDescriptor descriptor;
    SenderFn embed;
    ReceiverFn receive;
  };
  struct AttackEntry {
    AttackDescriptor descriptor;
    AttackFn apply;
  };
  struct MetricEntry {
    MetricDescriptor descriptor;
    FullReferenceMetricFn full_reference;  // set when inputs == FullReferencePair
    DecisionMetricFn decision;             // set when inputs == DecisionVsTruth
  };

  Registry() = default;

  // Registry with the built-in schemes, attacks and metrics.
  static Registry with_builtins();

  // Registration validates the descriptor (non-empty unique id, well-formed
  // parameter specs with admissible defaults) and throws RegistryError on
  // any violation. Re-registering an existing id replaces it and records a
  // warning ("shadowed").
  RegistrationHandle register_scheme(SchemeDescriptor descriptor,
                                     SenderFn embed, ReceiverFn receive);
  RegistrationHandle register_attack(AttackDescriptor descriptor,
                                     AttackFn apply);
  RegistrationHandle register_metric(MetricDescriptor descriptor,
                                     FullReferenceMetricFn full_reference,
                                     DecisionMetricFn decision);

  // Reads "*.json" plugin manifests from each search path (in order; later
  // paths shadow earlier registrations on id collision). Malformed manifests
  // are skipped with a warning; a manifest whose entry point names an
  // unknown implementation is an error recorded as a warning and skipped.
  void discover_plugins(const std::vector<std::filesystem::path>& search_paths);

  bool has_scheme(const std::string& id) const;
  bool has_attack(const std::string& id) const;
  bool has_metric(const std::string& id) const;
  const SchemeEntry& scheme(const std::string& id) const;    // throws RegistryError
  const AttackEntry& attack(const std::string& id) const;    // throws RegistryError
  const MetricEntry& metric(const std::string& id) const;    // throws RegistryError

  std::vector<std::string> scheme_ids() const;  // sorted
  std::vector<std::string> attack_ids() const;  // sorted
  std::vector<std::string> metric_ids() const;  // sorted

  // Kind-checked metric evaluation; throws RegistryError when the metric's
  // declared input kind does not match the call.
  MetricValue eval_full_reference(const std::string& metric_id,
                                  const Work& reference, const Work& test,
                                  const ParamMap& params = {}) const;
  std::optional<MetricValue> eval_decision(const std::string& metric_id,
                                           const TamperMap& truth,
                                           const TamperMap& reported,
                                           const ParamMap& params = {}) const;

  // Validates a full parameter assignment against a descriptor's specs:
  // unknown names and out-of-range values produce one message each.
  static std::vector<std::string> check_params(
      const std::vector<ParamSpec>& specs, const ParamMap& params,
      const std::string& context);

  const std::vector<std::string>& warnings() const { return warnings_; }
  void clear_warnings() { warnings_.clear(); }

 private:
  template <typename Descriptor>
  void validate_descriptor(const Descriptor& descriptor);

  std::map<std::string, SchemeEntry> schemes_;
  std::map<std::string, AttackEntry> attacks_;
  std::map<std::string, MetricEntry> metrics_;
  std::vector<std::string> warnings_;
};

}  // namespace wmbench
