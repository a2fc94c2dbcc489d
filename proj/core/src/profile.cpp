#include "wmbench/profile.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "wmbench/rng.hpp"

namespace wmbench {

std::string to_string(ArtifactDump dump) {
  switch (dump) {
    case ArtifactDump::None:
      return "none";
    case ArtifactDump::FailuresOnly:
      return "failures-only";
    case ArtifactDump::All:
      return "all";
  }
  return "none";
}

namespace {

ParamValue param_value_from_json(const nlohmann::json& v) {
  if (v.is_number_integer()) return v.get<int64_t>();
  if (v.is_number_float()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  throw Error("parameter values must be numbers or strings");
}

ParamGrid grid_from_json(const nlohmann::json& obj) {
  ParamGrid grid;
  for (const auto& [name, value] : obj.items()) {
    std::vector<ParamValue>& values = grid[name];
    if (value.is_array()) {
      for (const auto& v : value) values.push_back(param_value_from_json(v));
    } else {
      values.push_back(param_value_from_json(value));
    }
  }
  return grid;
}

nlohmann::json param_value_to_json(const ParamValue& v) {
  if (std::holds_alternative<int64_t>(v)) return std::get<int64_t>(v);
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  return std::get<std::string>(v);
}

nlohmann::json grid_to_json(const ParamGrid& grid) {
  nlohmann::json obj = nlohmann::json::object();
  for (const auto& [name, values] : grid) {
    nlohmann::json list = nlohmann::json::array();
    for (const ParamValue& v : values) list.push_back(param_value_to_json(v));
    obj[name] = std::move(list);
  }
  return obj;
}

}  // namespace

BenchmarkProfile BenchmarkProfile::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("profile is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error("profile must be a JSON object");

  BenchmarkProfile profile;
  try {
    profile.profile_id = doc.at("profile_id").get<std::string>();
    profile.seed = doc.value("seed", uint64_t(0));
    for (const auto& img : doc.value("images", nlohmann::json::array()))
      profile.images.push_back(img.get<std::string>());
    for (const auto& s : doc.value("schemes", nlohmann::json::array())) {
      SchemeSelection sel;
      sel.id = s.at("id").get<std::string>();
      if (s.contains("params")) sel.param_grid = grid_from_json(s["params"]);
      if (s.contains("key")) sel.key = s["key"].get<std::string>();
      profile.schemes.push_back(std::move(sel));
    }
    for (const auto& p : doc.value("pipelines", nlohmann::json::array())) {
      PipelineTemplate tmpl;
      for (const auto& st : p.value("stages", nlohmann::json::array())) {
        StageTemplate stage;
        stage.attack_id = st.at("attack").get<std::string>();
        if (st.contains("params"))
          stage.param_grid = grid_from_json(st["params"]);
        tmpl.stages.push_back(std::move(stage));
      }
      profile.pipelines.push_back(std::move(tmpl));
    }
    for (const auto& m : doc.value("metrics", nlohmann::json::array()))
      profile.metrics.push_back(m.get<std::string>());
    std::string dump = doc.value("artifact_dump", std::string("none"));
    if (dump == "none")
      profile.artifact_dump = ArtifactDump::None;
    else if (dump == "failures-only")
      profile.artifact_dump = ArtifactDump::FailuresOnly;
    else if (dump == "all")
      profile.artifact_dump = ArtifactDump::All;
    else
      throw Error("artifact_dump must be one of none/failures-only/all");
    profile.output_path = doc.value("output_path", std::string("results.db"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed profile: ") + e.what());
  }
  return profile;
}

BenchmarkProfile BenchmarkProfile::from_json_file(
    const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open profile '" + file.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json(text);
}

std::string BenchmarkProfile::to_json() const {
  nlohmann::json doc;
  doc["profile_id"] = profile_id;
  doc["seed"] = seed;
  doc["images"] = images;
  doc["schemes"] = nlohmann::json::array();
  for (const SchemeSelection& s : schemes) {
    nlohmann::json obj;
    obj["id"] = s.id;
    obj["params"] = grid_to_json(s.param_grid);
    if (s.key) obj["key"] = *s.key;
    doc["schemes"].push_back(std::move(obj));
  }
  doc["pipelines"] = nlohmann::json::array();
  for (const PipelineTemplate& p : pipelines) {
    nlohmann::json stages = nlohmann::json::array();
    for (const StageTemplate& st : p.stages) {
      nlohmann::json obj;
      obj["attack"] = st.attack_id;
      obj["params"] = grid_to_json(st.param_grid);
      stages.push_back(std::move(obj));
    }
    doc["pipelines"].push_back(nlohmann::json{{"stages", std::move(stages)}});
  }
  doc["metrics"] = metrics;
  doc["artifact_dump"] = to_string(artifact_dump);
  doc["output_path"] = output_path;
  return doc.dump();  // nlohmann::json keeps keys sorted
}

namespace {

// Derives a deterministic 128-bit binary key for a scheme from the profile
// seed, so key-requiring schemes work out of the box in keyless profiles.
std::string derive_key(uint64_t seed, const std::string& scheme_id,
                       size_t selection_index) {
  uint64_t k = hash_combine(hash_combine(seed, "derived-key"),
                            scheme_id + "#" + std::to_string(selection_index));
  DetRng rng(k);
  std::string key;
  key.reserve(128);
  for (int i = 0; i < 128; ++i)
    key.push_back(rng.uniform_below(2) == 0 ? '0' : '1');
  return key;
}

// Completes a grid with single-point default entries for parameters the
// profile left unset, and validates every listed value against its spec.
ParamGrid complete_grid(const ParamGrid& grid,
                        const std::vector<ParamSpec>& specs,
                        const std::string& context,
                        std::vector<std::string>& errors) {
  ParamGrid complete;
  for (const auto& [name, values] : grid) {
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
    if (values.empty()) {
      errors.push_back(context + ": parameter '" + name +
                       "' has an empty value list");
      continue;
    }
    for (size_t i = 0; i < values.size(); ++i) {
      std::string err = spec->check(values[i]);
      if (!err.empty())
        errors.push_back(context + "." + name + "[" + std::to_string(i) +
                         "]: " + err);
    }
    complete[name] = values;
  }
  for (const ParamSpec& spec : specs)
    if (!complete.count(spec.name)) complete[spec.name] = {spec.default_value};
  return complete;
}

}  // namespace

ValidatedProfile validate_profile(const BenchmarkProfile& profile,
                                  const Registry& registry,
                                  const MediaCatalog& catalog) {
  std::vector<std::string> errors;
  ValidatedProfile validated;
  validated.profile = profile;

  if (profile.profile_id.empty())
    errors.push_back("profile_id must not be empty");

  // Images: resolve selectors, drop duplicates, keep catalog order stable.
  if (profile.images.empty()) {
    errors.push_back("profile selects no images");
  } else {
    std::set<std::string> seen;
    for (const std::string& selector : profile.images) {
      std::vector<std::string> ids = catalog.select(selector);
      if (ids.empty()) {
        errors.push_back("image selector '" + selector +
                         "' matches nothing in the media catalog");
        continue;
      }
      for (std::string& id : ids)
        if (seen.insert(id).second) validated.resolved_images.push_back(id);
    }
  }

  // Schemes.
  if (profile.schemes.empty()) errors.push_back("profile selects no schemes");
  for (size_t i = 0; i < profile.schemes.size(); ++i) {
    const SchemeSelection& sel = profile.schemes[i];
    std::string context = "schemes[" + std::to_string(i) + "] ('" + sel.id +
                          "')";
    if (!registry.has_scheme(sel.id)) {
      errors.push_back(context + ": unknown scheme");
      continue;
    }
    const auto& entry = registry.scheme(sel.id);
    SchemeSelection complete = sel;
    complete.param_grid = complete_grid(sel.param_grid,
                                        entry.descriptor.params, context,
                                        errors);
    if (sel.key) {
      if (sel.key->empty())
        errors.push_back(context + ": key must not be empty");
      for (char c : *sel.key)
        if (c != '0' && c != '1') {
          errors.push_back(context +
                           ": key must be a binary string of 0/1 characters");
          break;
        }
    } else if (entry.descriptor.capabilities.requires_key) {
      complete.key = derive_key(profile.seed, sel.id, i);
    }
    validated.schemes.push_back(std::move(complete));
  }

  // Pipelines.
  if (profile.pipelines.empty())
    errors.push_back("profile configures no attack pipelines");
  for (size_t i = 0; i < profile.pipelines.size(); ++i) {
    const PipelineTemplate& tmpl = profile.pipelines[i];
    std::string pipe_context = "pipelines[" + std::to_string(i) + "]";
    if (tmpl.stages.empty()) {
      errors.push_back(pipe_context +
                       ": pipeline has no stages (use the 'identity' attack "
                       "for a no-attack baseline)");
      continue;
    }
    PipelineTemplate complete;
    int content_changing = 0;
    for (size_t j = 0; j < tmpl.stages.size(); ++j) {
      const StageTemplate& stage = tmpl.stages[j];
      std::string context = pipe_context + ".stages[" + std::to_string(j) +
                            "] ('" + stage.attack_id + "')";
      if (!registry.has_attack(stage.attack_id)) {
        errors.push_back(context + ": unknown attack");
        continue;
      }
      const auto& entry = registry.attack(stage.attack_id);
      if (entry.descriptor.capabilities.content_changing) ++content_changing;
      StageTemplate done;
      done.attack_id = stage.attack_id;
      done.param_grid = complete_grid(stage.param_grid,
                                      entry.descriptor.params, context,
                                      errors);
      complete.stages.push_back(std::move(done));
    }
    if (content_changing > 1)
      errors.push_back(pipe_context +
                       ": more than one content-changing stage (their tamper "
                       "ground truths cannot be combined)");
    validated.pipelines.push_back(std::move(complete));
  }

  // Metrics.
  if (profile.metrics.empty()) errors.push_back("profile selects no metrics");
  std::set<std::string> metric_seen;
  for (const std::string& id : profile.metrics) {
    if (!metric_seen.insert(id).second) {
      errors.push_back("metric '" + id + "' is listed twice");
      continue;
    }
    if (!registry.has_metric(id)) {
      errors.push_back("unknown metric '" + id + "'");
      continue;
    }
    const auto& entry = registry.metric(id);
    if (entry.descriptor.inputs != MetricInputs::FullReferencePair &&
        entry.descriptor.inputs != MetricInputs::DecisionVsTruth)
      errors.push_back("metric '" + id + "' has input kind '" +
                       to_string(entry.descriptor.inputs) +
                       "', which benchmark runs cannot evaluate");
  }

  if (profile.output_path.empty())
    errors.push_back("output_path must not be empty");

  if (!errors.empty()) throw ValidationError(std::move(errors));
  return validated;
}

}  // namespace wmbench
