#pragma once

// Benchmark profiles: the JSON run configuration that selects images,
// schemes (with parameter grids), attack pipelines (with per-stage parameter
// grids) and metrics.
//
// Example:
// {
//   "profile_id": "demo",
//   "seed": 42,
//   "images": ["corpus/*.pgm"],
//   "schemes": [
//     {"id": "rs-fragile-lsb", "params": {"hash_bits": [32, 40]}}
//   ],
//   "pipelines": [
//     {"stages": [
//       {"attack": "copy-paste", "params": {"area_fraction": 0.1}},
//       {"attack": "jpeg", "params": {"qf": [95, 75, 50]}}
//     ]}
//   ],
//   "metrics": ["psnr", "ssim", "fp-rate", "fn-rate"],
//   "artifact_dump": "none",
//   "output_path": "results.db"
// }
//
// Grid values may be written as a scalar (single-point grid) or an array.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wmbench/media_db.hpp"
#include "wmbench/registry.hpp"
#include "wmbench/types.hpp"

namespace wmbench {

using ParamGrid = std::map<std::string, std::vector<ParamValue>>;

struct SchemeSelection {
  std::string id;
  ParamGrid param_grid;
  std::optional<std::string> key;  // binary string; derived from seed if absent
};

struct StageTemplate {
  std::string attack_id;
  ParamGrid param_grid;
};

struct PipelineTemplate {
  std::vector<StageTemplate> stages;
};

enum class ArtifactDump { None, FailuresOnly, All };

std::string to_string(ArtifactDump dump);

struct BenchmarkProfile {
  std::string profile_id;
  uint64_t seed = 0;
  std::vector<std::string> images;  // origin ids or glob selectors
  std::vector<SchemeSelection> schemes;
  std::vector<PipelineTemplate> pipelines;
  std::vector<std::string> metrics;
  ArtifactDump artifact_dump = ArtifactDump::None;
  std::string output_path = "results.db";

  static BenchmarkProfile from_json(const std::string& text);
  static BenchmarkProfile from_json_file(const std::filesystem::path& file);
  std::string to_json() const;  // canonical echo (sorted keys)
};

// A profile cross-checked against the registry and the media catalog:
// selectors resolved to concrete origin ids, parameter grids completed with
// declared defaults, keys filled in (derived from the seed when absent).
struct ValidatedProfile {
  BenchmarkProfile profile;
  std::vector<std::string> resolved_images;
  std::vector<SchemeSelection> schemes;      // grids complete, keys set
  std::vector<PipelineTemplate> pipelines;   // grids complete
};

// Validates every aspect and reports ALL problems at once via
// ValidationError: unknown ids, out-of-range or wrongly typed grid values,
// empty image selections, empty pipelines, more than one content-changing
// stage, metric input kinds that can never apply, and so on.
ValidatedProfile validate_profile(const BenchmarkProfile& profile,
                                  const Registry& registry,
                                  const MediaCatalog& catalog);

}  // namespace wmbench
