#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wegnerlab/config.hpp"
#include "wegnerlab/suites.hpp"

namespace wegnerlab {

/// Output of one configured run. `name` is the section ("wegner") or the
/// section with its label ("wegner[cantor]").
struct NamedRun {
  std::string name;
  SuiteOutput output;
};

struct Report {
  std::string subcommand;
  std::optional<std::uint64_t> master_seed;  // the --seed override, if any
  std::vector<NamedRun> runs;
  // prefix statistics and fit names with "<run>/" so several runs can share
  // one results.csv
  bool prefix_rows = false;

  bool passed() const;
  std::vector<Check> checks() const;
  /// All rows, prefixed when requested, in canonical order.
  ResultTable merged_table() const;
};

/// summary.json contents; non-finite numbers become null.
Json summary_json(const Report& report);

/// Writes `contents` to a temporary file next to `path`, then renames it.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// results.csv, summary.json and every extra file of every run.
void emit_report(const Report& report, const std::filesystem::path& out_dir);

}  // namespace wegnerlab
