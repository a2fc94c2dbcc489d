// Command line front end: run benchmark profiles, validate them, list the
// registered schemes/attacks/metrics, and analyze results databases.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wmbench/analyzer.hpp"
#include "wmbench/controller.hpp"
#include "wmbench/media_db.hpp"
#include "wmbench/profile.hpp"
#include "wmbench/registry.hpp"

namespace {

using namespace wmbench;

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

Registry make_registry(const std::vector<std::string>& plugin_paths) {
  Registry registry = Registry::with_builtins();
  if (!plugin_paths.empty()) {
    std::vector<std::filesystem::path> paths(plugin_paths.begin(),
                                             plugin_paths.end());
    registry.discover_plugins(paths);
  }
  print_warnings(registry.warnings());
  registry.clear_warnings();
  return registry;
}

MediaCatalog make_catalog(const std::vector<std::string>& media_paths) {
  if (media_paths.empty()) {
    throw Error("no media path given (use --media-path <dir>)");
  }
  std::vector<std::filesystem::path> roots(media_paths.begin(),
                                           media_paths.end());
  std::vector<std::string> warnings;
  MediaCatalog catalog = MediaCatalog::scan(roots, &warnings);
  print_warnings(warnings);
  return catalog;
}

void print_param_specs(const std::vector<ParamSpec>& specs) {
  for (const auto& spec : specs) {
    std::cout << "      " << spec.name << " (" << to_string(spec.type);
    if (spec.type == ParamType::Integer || spec.type == ParamType::Real) {
      std::cout << ", range [" << spec.min_value << ", " << spec.max_value
                << "]";
    }
    if (spec.type == ParamType::Enum) {
      std::cout << ", choices:";
      for (const auto& c : spec.choices) std::cout << ' ' << c;
    }
    std::cout << ", default " << param_value_to_string(spec.default_value)
              << ")\n";
  }
}

int cmd_list(const std::string& category,
             const std::vector<std::string>& plugin_paths) {
  Registry registry = make_registry(plugin_paths);
  if (category == "schemes") {
    for (const auto& id : registry.scheme_ids()) {
      const auto& d = registry.scheme(id).descriptor;
      std::cout << id << "  -  " << d.display_name << '\n';
      const auto& c = d.capabilities;
      std::cout << "      capabilities:";
      if (c.produces_decision_map) std::cout << " decision-map";
      if (c.produces_restored) std::cout << " restoration";
      if (c.requires_key) std::cout << " keyed";
      if (c.requires_external_watermark) std::cout << " external-watermark";
      std::cout << '\n';
      print_param_specs(d.params);
    }
  } else if (category == "attacks") {
    for (const auto& id : registry.attack_ids()) {
      const auto& d = registry.attack(id).descriptor;
      std::cout << id << "  -  " << d.display_name
                << (d.capabilities.content_changing ? "  [content-changing]"
                                                    : "")
                << '\n';
      print_param_specs(d.params);
    }
  } else if (category == "metrics") {
    for (const auto& id : registry.metric_ids()) {
      const auto& d = registry.metric(id).descriptor;
      std::cout << id << "  -  " << d.display_name << "  (inputs: "
                << to_string(d.inputs) << ", units: " << to_string(d.units)
                << ")\n";
      print_param_specs(d.params);
    }
  } else {
    std::cerr << "error: unknown category '" << category
              << "' (expected schemes, attacks or metrics)\n";
    return 1;
  }
  return 0;
}

int cmd_validate(const std::string& profile_path,
                 const std::vector<std::string>& media_paths,
                 const std::vector<std::string>& plugin_paths) {
  Registry registry = make_registry(plugin_paths);
  MediaCatalog catalog = make_catalog(media_paths);
  BenchmarkProfile profile =
      BenchmarkProfile::from_json_file(profile_path);
  ValidatedProfile validated = validate_profile(profile, registry, catalog);
  const size_t cells = expand_cells(validated).size();
  std::cout << "profile '" << profile.profile_id << "' is valid: "
            << validated.resolved_images.size() << " image(s), " << cells
            << " cell(s)\n";
  return 0;
}

int cmd_run(const std::string& profile_path,
            const std::vector<std::string>& media_paths,
            const std::vector<std::string>& plugin_paths, int workers,
            const std::string& out_override) {
  Registry registry = make_registry(plugin_paths);
  MediaCatalog catalog = make_catalog(media_paths);
  BenchmarkProfile profile =
      BenchmarkProfile::from_json_file(profile_path);
  ValidatedProfile validated = validate_profile(profile, registry, catalog);
  ExecuteOptions options;
  options.workers = workers;
  options.output_path_override = out_override;
  ExecuteSummary summary =
      execute_benchmark(validated, registry, catalog, options);
  std::cout << "wrote " << summary.output_path.string() << ": "
            << summary.total_cells << " cell(s), " << summary.ok_cells
            << " ok, " << summary.failed_cells << " failed\n";
  return summary.failed_cells == 0 ? 0 : 1;
}

int cmd_analyze(const AnalyzeRequest& request) {
  Aggregation aggregation = analyze_results(request);
  if (request.csv_path.empty() && request.svg_path.empty()) {
    // No file outputs requested: print a compact table.
    std::cout << aggregation.metric_key << " vs " << aggregation.axis_label
              << '\n';
    for (const auto& series : aggregation.series) {
      std::cout << "  " << series.label << ":\n";
      for (const auto& point : series.points) {
        std::cout << "    " << point.x << " -> ";
        if (point.count == 0) {
          std::cout << "(no value)";
        } else {
          std::cout << point.mean << "  (n=" << point.count << ")";
        }
        if (point.excluded > 0) std::cout << "  [excluded " << point.excluded
                                          << "]";
        std::cout << '\n';
      }
    }
  } else {
    if (!request.csv_path.empty()) {
      std::cout << "wrote " << request.csv_path.string() << '\n';
    }
    if (!request.svg_path.empty()) {
      std::cout << "wrote " << request.svg_path.string() << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reconfigurable watermarking benchmark"};
  app.require_subcommand(1);

  std::vector<std::string> media_paths;
  std::vector<std::string> plugin_paths;

  // run
  auto* run = app.add_subcommand("run", "Execute a benchmark profile");
  std::string run_profile;
  int run_workers = 1;
  std::string run_out;
  run->add_option("profile", run_profile, "Profile JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--media-path", media_paths,
                  "Media corpus root (repeatable)");
  run->add_option("--plugin-path", plugin_paths,
                  "Plugin manifest directory (repeatable)");
  run->add_option("--workers", run_workers, "Parallel worker threads")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", run_out, "Results output path (overrides profile)");

  // validate
  auto* validate = app.add_subcommand(
      "validate", "Check a profile against the registry and media catalog");
  std::string validate_profile_path;
  validate->add_option("profile", validate_profile_path, "Profile JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  validate->add_option("--media-path", media_paths,
                       "Media corpus root (repeatable)");
  validate->add_option("--plugin-path", plugin_paths,
                       "Plugin manifest directory (repeatable)");

  // list
  auto* list = app.add_subcommand("list",
                                  "List registered schemes/attacks/metrics");
  std::string list_category;
  list->add_option("category", list_category, "schemes | attacks | metrics")
      ->required();
  list->add_option("--plugin-path", plugin_paths,
                   "Plugin manifest directory (repeatable)");

  // analyze
  auto* analyze =
      app.add_subcommand("analyze", "Aggregate and plot a results database");
  AnalyzeRequest request;
  std::string analyze_results_path, analyze_csv, analyze_svg;
  analyze->add_option("results", analyze_results_path, "Results database file")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--metric", request.metric,
                      "Metric id or record metric key (e.g. psnr, "
                      "psnr.recovered, fp-rate)")
      ->required();
  analyze
      ->add_option("--against", request.against,
                   "X axis: an attack parameter (qf, variance, ...) or bpp")
      ->required();
  analyze->add_option("--group", request.group, "Grouping: scheme | image");
  analyze->add_option("--csv", analyze_csv, "CSV output path");
  analyze->add_option("--svg", analyze_svg, "SVG output path");
  analyze->add_option("--samples", request.samples,
                      "Sampling resolution for bpp curves")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(run_profile, media_paths, plugin_paths, run_workers,
                     run_out);
    }
    if (validate->parsed()) {
      return cmd_validate(validate_profile_path, media_paths, plugin_paths);
    }
    if (list->parsed()) return cmd_list(list_category, plugin_paths);
    if (analyze->parsed()) {
      request.results_path = analyze_results_path;
      request.csv_path = analyze_csv;
      request.svg_path = analyze_svg;
      return cmd_analyze(request);
    }
  } catch (const ValidationError& ex) {
    std::cerr << "profile validation failed:\n";
    for (const auto& problem : ex.errors()) {
      std::cerr << "  - " << problem << '\n';
    }
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
