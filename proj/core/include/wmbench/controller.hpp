#pragma once

// Benchmark controller: expands a validated profile into concrete run cells,
// executes them (optionally in parallel) and writes the results database.
//
// Results database format: a text file whose first line is a JSON header
// (profile echo, registry descriptor echo, format tag, timestamp) followed
// by one JSON run record per line, in cell order.
//
// Determinism: every stochastic step is seeded from the profile seed and the
// cell's canonical description, embeddings are computed once per
// (image, scheme, scheme-params) group, and records are committed in cell
// order regardless of worker count — so two runs of the same profile differ
// only in timings and the header timestamp.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wmbench/attacks.hpp"
#include "wmbench/profile.hpp"

namespace wmbench {

struct CellDescriptor {
  size_t index = 0;
  std::string image_id;
  std::string scheme_id;
  ParamMap scheme_params;
  std::string key;
  std::vector<PipelineStage> stages;
  uint64_t cell_seed = 0;
  size_t group_index = 0;  // cells sharing an embedding share this
};

// Deterministic cartesian expansion: images (selector resolution order) x
// schemes (profile order) x scheme parameter combinations (parameter names
// in sorted order, values in declared order, last name fastest) x pipelines
// (profile order) x per-stage parameter combinations (same rule, stage order
// outermost-first).
std::vector<CellDescriptor> expand_cells(const ValidatedProfile& profile);

struct ExecuteOptions {
  int workers = 1;
  // Overrides the profile's output_path when non-empty.
  std::string output_path_override;
};

struct ExecuteSummary {
  size_t total_cells = 0;
  size_t ok_cells = 0;
  size_t failed_cells = 0;
  std::filesystem::path output_path;
};

// Runs every cell and writes the results database. Cell-level failures are
// isolated into records with status "cell-error"; I/O failures on the output
// path abort with an exception.
ExecuteSummary execute_benchmark(const ValidatedProfile& profile,
                                 const Registry& registry,
                                 const MediaCatalog& catalog,
                                 const ExecuteOptions& options);

}  // namespace wmbench
