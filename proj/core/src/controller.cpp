#include "wmbench/controller.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wmbench/image_io.hpp"
#include "wmbench/metrics.hpp"
#include "wmbench/rng.hpp"

namespace wmbench {
namespace {

using nlohmann::json;  // object keys are kept sorted -> deterministic dumps

constexpr const char* kFormatTag = "wmbench-results-v1";
constexpr const char* kToolVersion = "0.1.0";

// --------------------------------------------------------- grid expansion --

// All parameter combinations of a grid: names in sorted (map) order, values
// in declared order, last name varying fastest. An empty grid yields the
// single empty combination.
std::vector<ParamMap> param_combinations(const ParamGrid& grid) {
  std::vector<const std::string*> names;
  std::vector<const std::vector<ParamValue>*> values;
  for (const auto& [name, vals] : grid) {
    names.push_back(&name);
    values.push_back(&vals);
  }
  std::vector<ParamMap> out;
  std::vector<size_t> idx(values.size(), 0);
  for (;;) {
    ParamMap combo;
    for (size_t i = 0; i < names.size(); ++i) {
      combo.emplace(*names[i], (*values[i])[idx[i]]);
    }
    out.push_back(std::move(combo));
    size_t pos = values.size();
    for (;;) {
      if (pos == 0) return out;
      --pos;
      if (++idx[pos] < values[pos]->size()) break;
      idx[pos] = 0;
    }
  }
}

// All concrete stage lists of a pipeline template: per-stage combinations,
// stage order outermost-first, last stage varying fastest.
std::vector<std::vector<PipelineStage>> stage_combinations(
    const PipelineTemplate& tmpl) {
  std::vector<std::vector<ParamMap>> per_stage;
  per_stage.reserve(tmpl.stages.size());
  for (const auto& stage : tmpl.stages) {
    per_stage.push_back(param_combinations(stage.param_grid));
  }
  std::vector<std::vector<PipelineStage>> out;
  std::vector<size_t> idx(per_stage.size(), 0);
  for (;;) {
    std::vector<PipelineStage> stages;
    stages.reserve(tmpl.stages.size());
    for (size_t i = 0; i < tmpl.stages.size(); ++i) {
      stages.push_back({tmpl.stages[i].attack_id, per_stage[i][idx[i]]});
    }
    out.push_back(std::move(stages));
    size_t pos = per_stage.size();
    for (;;) {
      if (pos == 0) return out;
      --pos;
      if (++idx[pos] < per_stage[pos].size()) break;
      idx[pos] = 0;
    }
  }
}

// Canonical textual form of a cell; the cell seed is derived from it, so the
// same configuration always draws the same random choices no matter where it
// lands in the expansion.
std::string canonical_descriptor(const std::string& image_id,
                                 const std::string& scheme_id,
                                 const ParamMap& scheme_params,
                                 const std::vector<PipelineStage>& stages) {
  std::ostringstream os;
  os << "image=" << image_id << ";scheme=" << scheme_id
     << ";params=" << params_to_string(scheme_params) << ";pipeline=[";
  bool first = true;
  for (const auto& stage : stages) {
    if (!first) os << ',';
    first = false;
    os << stage.attack_id << params_to_string(stage.params);
  }
  os << ']';
  return os.str();
}

// ------------------------------------------------------- JSON rendering --

json param_value_json(const ParamValue& value) {
  if (const auto* i = std::get_if<int64_t>(&value)) return *i;
  if (const auto* d = std::get_if<double>(&value)) return *d;
  return std::get<std::string>(value);
}

json params_json(const ParamMap& params) {
  json out = json::object();
  for (const auto& [name, value] : params) out[name] = param_value_json(value);
  return out;
}

json param_spec_json(const ParamSpec& spec) {
  json out;
  out["name"] = spec.name;
  out["type"] = to_string(spec.type);
  out["default"] = param_value_json(spec.default_value);
  if (spec.type == ParamType::Integer || spec.type == ParamType::Real) {
    out["min"] = spec.min_value;
    out["max"] = spec.max_value;
  }
  if (spec.type == ParamType::Enum) out["choices"] = spec.choices;
  return out;
}

template <class Descriptor>
json descriptor_common_json(const Descriptor& d) {
  json out;
  out["id"] = d.id;
  out["display_name"] = d.display_name;
  if (!d.notes.empty()) out["notes"] = d.notes;
  json params = json::array();
  for (const auto& spec : d.params) params.push_back(param_spec_json(spec));
  out["params"] = std::move(params);
  return out;
}

json registry_echo_json(const Registry& registry) {
  json schemes = json::array();
  for (const auto& id : registry.scheme_ids()) {
    const auto& d = registry.scheme(id).descriptor;
    json s = descriptor_common_json(d);
    s["capabilities"] = {
        {"produces_decision_map", d.capabilities.produces_decision_map},
        {"produces_restored", d.capabilities.produces_restored},
        {"requires_external_watermark",
         d.capabilities.requires_external_watermark},
        {"requires_key", d.capabilities.requires_key},
    };
    schemes.push_back(std::move(s));
  }
  json attacks = json::array();
  for (const auto& id : registry.attack_ids()) {
    const auto& d = registry.attack(id).descriptor;
    json a = descriptor_common_json(d);
    a["capabilities"] = {
        {"content_changing", d.capabilities.content_changing},
    };
    attacks.push_back(std::move(a));
  }
  json metrics = json::array();
  for (const auto& id : registry.metric_ids()) {
    const auto& d = registry.metric(id).descriptor;
    json m = descriptor_common_json(d);
    m["inputs"] = to_string(d.inputs);
    m["units"] = to_string(d.units);
    metrics.push_back(std::move(m));
  }
  return json{{"schemes", std::move(schemes)},
              {"attacks", std::move(attacks)},
              {"metrics", std::move(metrics)}};
}

json metric_value_json(const MetricValue& value) {
  if (value.identical) return "identical";
  return value.value;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ------------------------------------------------------------ execution --

// One embedding shared by every cell of a (image, scheme, scheme-params)
// group. Errors are stored rather than rethrown from call_once, so a failing
// embed is attempted once and every dependent cell reports the same error.
struct GroupState {
  std::once_flag once;
  SenderOutput output;
  double embed_seconds = 0.0;
  std::string error;
};

struct LoadedImage {
  std::optional<Work> work;
  std::string error;
};

struct CellResult {
  bool ok = false;
  std::string line;  // rendered record
};

class BenchmarkRun {
 public:
  BenchmarkRun(const ValidatedProfile& profile, const Registry& registry,
               const MediaCatalog& catalog, const ExecuteOptions& options)
      : profile_(profile), registry_(registry), options_(options) {
    cells_ = expand_cells(profile);
    size_t group_count = 0;
    for (const auto& cell : cells_) {
      group_count = std::max(group_count, cell.group_index + 1);
    }
    groups_.reserve(group_count);
    for (size_t i = 0; i < group_count; ++i) {
      groups_.push_back(std::make_unique<GroupState>());
    }
    for (const auto& id : profile.resolved_images) {
      LoadedImage li;
      try {
        li.work = catalog.load(id);
      } catch (const std::exception& ex) {
        li.error = ex.what();
      }
      images_.emplace(id, std::move(li));
    }
  }

  ExecuteSummary run() {
    const std::filesystem::path out_path =
        options_.output_path_override.empty()
            ? std::filesystem::path(profile_.profile.output_path)
            : std::filesystem::path(options_.output_path_override);
    if (out_path.has_parent_path()) {
      std::filesystem::create_directories(out_path.parent_path());
    }
    if (profile_.profile.artifact_dump != ArtifactDump::None) {
      artifact_dir_ = out_path;
      artifact_dir_ += ".artifacts";
      std::filesystem::create_directories(artifact_dir_);
    }
    out_.open(out_path, std::ios::binary | std::ios::trunc);
    if (!out_) {
      throw Error("cannot open results output '" + out_path.string() + "'");
    }
    write_header();

    const int workers =
        std::max(1, std::min<int>(options_.workers, int(cells_.size())));
    if (workers <= 1 || cells_.size() <= 1) {
      for (size_t i = 0; i < cells_.size(); ++i) commit(i, process_cell(i));
    } else {
      std::vector<std::thread> pool;
      pool.reserve(size_t(workers));
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([this] { worker_loop(); });
      }
      for (auto& t : pool) t.join();
    }

    out_.flush();
    if (!out_) {
      throw Error("writing results to '" + out_path.string() + "' failed");
    }
    ExecuteSummary summary;
    summary.total_cells = cells_.size();
    summary.ok_cells = ok_count_.load();
    summary.failed_cells = cells_.size() - summary.ok_cells;
    summary.output_path = out_path;
    return summary;
  }

 private:
  void write_header() {
    json header;
    header["format"] = kFormatTag;
    header["tool_version"] = kToolVersion;
    header["created_at"] = utc_timestamp();
    header["profile"] = json::parse(profile_.profile.to_json());
    header["resolved_images"] = profile_.resolved_images;
    header["cells"] = cells_.size();
    header["registry"] = registry_echo_json(registry_);
    out_ << header.dump() << '\n';
    out_.flush();
  }

  void worker_loop() {
    for (;;) {
      const size_t i = next_cell_.fetch_add(1);
      if (i >= cells_.size()) return;
      commit(i, process_cell(i));
    }
  }

  // Records are appended strictly in cell order regardless of which worker
  // finishes first; whoever delivers the next expected cell drains the
  // reorder buffer.
  void commit(size_t index, CellResult result) {
    if (result.ok) ok_count_.fetch_add(1);
    std::lock_guard lock(commit_mutex_);
    pending_.emplace(index, std::move(result.line));
    while (!pending_.empty() && pending_.begin()->first == next_to_commit_) {
      out_ << pending_.begin()->second << '\n';
      out_.flush();
      pending_.erase(pending_.begin());
      ++next_to_commit_;
    }
  }

  const GroupState& group_for(const CellDescriptor& cell, const Work& cover) {
    GroupState& state = *groups_[cell.group_index];
    std::call_once(state.once, [&] {
      try {
        const auto& entry = registry_.scheme(cell.scheme_id);
        auto timed = time_call([&] {
          return entry.embed(cover, std::span<const WatermarkPayload>{},
                             cell.key, cell.scheme_params);
        });
        // Dimensional-equality contract is enforced by the framework, not
        // trusted to the scheme.
        if (!timed.first.watermarked.same_dimensions(cover)) {
          throw Error("scheme '" + cell.scheme_id +
                      "' changed the work's dimensions");
        }
        state.output = std::move(timed.first);
        state.embed_seconds = timed.second;
      } catch (const std::exception& ex) {
        state.error = std::string("embed: ") + ex.what();
      }
    });
    return state;
  }

  CellResult process_cell(size_t index) {
    const CellDescriptor& cell = cells_[index];
    json rec;
    rec["cell_index"] = cell.index;
    rec["cell_seed"] = cell.cell_seed;
    rec["profile_id"] = profile_.profile.profile_id;
    rec["image"] = cell.image_id;
    rec["scheme"] = cell.scheme_id;
    rec["scheme_params"] = params_json(cell.scheme_params);
    json stages = json::array();
    for (const auto& stage : cell.stages) {
      stages.push_back(
          {{"attack", stage.attack_id}, {"params", params_json(stage.params)}});
    }
    rec["pipeline"] = std::move(stages);

    try {
      evaluate_cell(cell, rec);
      rec["status"] = "ok";
      return {true, rec.dump()};
    } catch (const std::exception& ex) {
      rec["status"] = "cell-error";
      rec["error"] = ex.what();
      rec.erase("metrics");
      rec.erase("timings");
      rec.erase("aux");
      rec.erase("artifacts");
      rec.erase("bpp");
      rec.erase("encoded_bytes");
      return {false, rec.dump()};
    }
  }

  void evaluate_cell(const CellDescriptor& cell, json& rec) {
    const LoadedImage& li = images_.at(cell.image_id);
    if (!li.work) throw Error("image load: " + li.error);
    const Work& cover = *li.work;

    const GroupState& group = group_for(cell, cover);
    if (!group.error.empty()) throw Error(group.error);

    AttackPipeline pipeline;
    pipeline.stages = cell.stages;
    pipeline.seed = cell.cell_seed;
    PipelineResult attacked = run_pipeline(registry_, group.output.watermarked,
                                           pipeline);

    const auto& entry = registry_.scheme(cell.scheme_id);
    auto timed = time_call([&] {
      return entry.receive(
          attacked.output,
          std::span<const WatermarkPayload>(group.output.embedded_watermarks),
          cell.key, cell.scheme_params);
    });
    ReceiverOutput received = std::move(timed.first);
    if (!received.has_any_output()) {
      throw Error("receiver produced no outputs");
    }
    if (received.restored &&
        !received.restored->same_dimensions(attacked.output)) {
      throw Error("scheme '" + cell.scheme_id +
                  "' restored work with mismatched dimensions");
    }

    bool detection_failure = false;
    json metrics = json::object();
    for (const auto& metric_id : profile_.profile.metrics) {
      const auto& me = registry_.metric(metric_id);
      if (me.descriptor.inputs == MetricInputs::FullReferencePair) {
        metrics[metric_id + ".watermarked"] = metric_value_json(
            registry_.eval_full_reference(metric_id, cover,
                                          group.output.watermarked, {}));
        metrics[metric_id + ".attacked"] = metric_value_json(
            registry_.eval_full_reference(metric_id, cover, attacked.output,
                                          {}));
        if (received.restored) {
          metrics[metric_id + ".recovered"] = metric_value_json(
              registry_.eval_full_reference(metric_id, cover,
                                            *received.restored, {}));
        } else {
          metrics[metric_id + ".recovered"] = "not-applicable";
        }
      } else if (me.descriptor.inputs == MetricInputs::DecisionVsTruth) {
        // Pipelines without a content-changing stage have by definition an
        // all-untampered ground truth.
        std::optional<TamperMap> truth = attacked.ground_truth;
        if (!truth && received.decision_map) {
          truth = TamperMap(received.decision_map->blocks_w,
                            received.decision_map->blocks_h, false);
        }
        if (truth && received.decision_map) {
          auto value = registry_.eval_decision(metric_id, *truth,
                                               *received.decision_map, {});
          if (value) {
            metrics[metric_id] = metric_value_json(*value);
            if (!value->identical && value->value > 0.0) {
              detection_failure = true;
            }
          } else {
            metrics[metric_id] = "not-applicable";
          }
        } else {
          metrics[metric_id] = "not-applicable";
        }
      } else {
        metrics[metric_id] = "not-applicable";
      }
    }
    rec["metrics"] = std::move(metrics);

    if (attacked.bpp) rec["bpp"] = *attacked.bpp;
    if (attacked.encoded_bytes) rec["encoded_bytes"] = *attacked.encoded_bytes;

    rec["timings"] = {{"embed_s", group.embed_seconds},
                      {"receive_s", timed.second}};

    json aux = json::object();
    if (!group.output.aux.empty()) aux["sender"] = group.output.aux;
    if (!received.aux.empty()) aux["receiver"] = received.aux;
    if (!aux.empty()) rec["aux"] = std::move(aux);

    const ArtifactDump dump = profile_.profile.artifact_dump;
    const bool dump_all = dump == ArtifactDump::All;
    const bool dump_failure =
        dump == ArtifactDump::FailuresOnly && detection_failure;
    if (dump_all || dump_failure) {
      json artifacts = json::object();
      auto dump_work = [&](const char* role, const Work& work) {
        std::ostringstream name;
        name << "cell" << std::setw(6) << std::setfill('0') << cell.index
             << '.' << role << ".pgm";
        const std::filesystem::path file = artifact_dir_ / name.str();
        write_pgm(file, work);
        artifacts[role] = (artifact_dir_.filename() / name.str())
                              .generic_string();
      };
      if (dump_all) dump_work("watermarked", group.output.watermarked);
      dump_work("attacked", attacked.output);
      if (received.restored) dump_work("restored", *received.restored);
      rec["artifacts"] = std::move(artifacts);
    }
  }

  const ValidatedProfile& profile_;
  const Registry& registry_;
  ExecuteOptions options_;
  std::vector<CellDescriptor> cells_;
  std::vector<std::unique_ptr<GroupState>> groups_;
  std::map<std::string, LoadedImage> images_;
  std::filesystem::path artifact_dir_;

  std::ofstream out_;
  std::atomic<size_t> next_cell_{0};
  std::atomic<size_t> ok_count_{0};
  std::mutex commit_mutex_;
  std::map<size_t, std::string> pending_;
  size_t next_to_commit_ = 0;
};

}  // namespace

std::vector<CellDescriptor> expand_cells(const ValidatedProfile& profile) {
  std::vector<CellDescriptor> cells;
  size_t group_index = 0;
  for (const auto& image_id : profile.resolved_images) {
    for (const auto& selection : profile.schemes) {
      for (const auto& scheme_params : param_combinations(selection.param_grid)) {
        for (const auto& tmpl : profile.pipelines) {
          for (auto& stages : stage_combinations(tmpl)) {
            CellDescriptor cell;
            cell.index = cells.size();
            cell.image_id = image_id;
            cell.scheme_id = selection.id;
            cell.scheme_params = scheme_params;
            cell.key = selection.key.value_or("");
            cell.stages = std::move(stages);
            cell.group_index = group_index;
            cell.cell_seed = hash_combine(
                profile.profile.seed,
                canonical_descriptor(image_id, selection.id, scheme_params,
                                     cell.stages));
            cells.push_back(std::move(cell));
          }
        }
        ++group_index;
      }
    }
  }
  return cells;
}

ExecuteSummary execute_benchmark(const ValidatedProfile& profile,
                                 const Registry& registry,
                                 const MediaCatalog& catalog,
                                 const ExecuteOptions& options) {
  BenchmarkRun run(profile, registry, catalog, options);
  return run.run();
}

}  // namespace wmbench
