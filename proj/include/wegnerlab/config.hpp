#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "wegnerlab/experiments.hpp"
#include "wegnerlab/measures.hpp"
#include "wegnerlab/suites.hpp"

namespace wegnerlab {

using Json = nlohmann::json;

// JSON round trip of the single-site laws. The layout is documented in
// docs/config.md; every object carries a "kind" tag and unknown keys are
// rejected.
Json measure_to_json(const MeasureSpec& measure);
MeasureSpec measure_from_json(const Json& j);

ExperimentConfig experiment_from_json(const Json& j);
AveragingSuiteConfig averaging_from_json(const Json& j);
TraceSuiteConfig tracebounds_from_json(const Json& j);

/// An experiment section may carry a label so several runs of one kind can
/// share a verify-all config.
struct LabeledExperiment {
  std::string label;
  ExperimentConfig config;
};

struct RunConfig {
  std::vector<LabeledExperiment> wegner;
  std::vector<LabeledExperiment> ids;
  std::vector<LabeledExperiment> landau;
  std::optional<AveragingSuiteConfig> averaging;
  std::optional<TraceSuiteConfig> tracebounds;

  /// Overrides applied to every section (command-line --seed / --workers).
  void override_seed(std::uint64_t seed);
  void override_workers(int workers);
};

/// Parses a config for `subcommand` (wegner, ids, landau, averaging,
/// tracebounds or verify-all). A single-suite subcommand reads the section of
/// that name when present and the whole document otherwise; verify-all reads
/// every section present. Every experiment section is validated.
RunConfig run_config_from_json(const Json& j, const std::string& subcommand);

/// Reads and parses a config file; throws Error(InvalidArgument) with the
/// offending path on IO or syntax errors.
Json load_json_file(const std::string& path);

}  // namespace wegnerlab
