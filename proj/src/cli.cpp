#include "wegnerlab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"

#include "wegnerlab/config.hpp"
#include "wegnerlab/report.hpp"
#include "wegnerlab/suites.hpp"

namespace wegnerlab {

namespace {

constexpr const char* kSchemaHelp =
    "config schema (see docs/config.md):\n"
    "  experiment sections (wegner, ids, landau): {model:{dimension, box_sizes, points_per_cell,\n"
    "    u:{kind, radius, height}, v0, kinetic_scale, flux_per_plaquette:{p, q}, landau_index, dense_cap},\n"
    "    measure:{kind, ...}, energy_E0, epsilons, energy_grid, n_realizations, master_seed, workers,\n"
    "    expect:{volume_exponent:{value, tolerance}, epsilon_exponent:{value, tolerance}, plateau}, label}\n"
    "  averaging, tracebounds: suite settings, all optional\n"
    "  epsilons must lie in (0, 1]; n_realizations >= 8\n";

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

std::optional<int> env_workers(std::ostream& err, bool& bad) {
  const char* v = std::getenv("WEGNERLAB_WORKERS");
  if (v == nullptr || *v == '\0') return std::nullopt;
  int n = 0;
  const char* end = v + std::char_traits<char>::length(v);
  auto [p, ec] = std::from_chars(v, end, n);
  if (ec != std::errc() || p != end || n < 0) {
    err << "error: WEGNERLAB_WORKERS must be a nonnegative integer, got '" << v << "'\n";
    bad = true;
    return std::nullopt;
  }
  return n;
}

template <class F>
void run_section(std::vector<NamedRun>& runs, const std::string& section, const std::vector<LabeledExperiment>& cfgs,
                 F suite) {
  for (const auto& e : cfgs) {
    const std::string name = e.label.empty() ? section : section + "[" + e.label + "]";
    runs.push_back({name, suite(e.config)});
  }
}

int execute(const std::string& subcommand, const Options& opt, std::ostream& out, std::ostream& err) {
  bool bad_env = false;
  std::optional<int> workers = opt.workers;
  if (!workers) workers = env_workers(err, bad_env);
  if (bad_env) return kExitUsage;

  RunConfig rc;
  try {
    rc = run_config_from_json(load_json_file(opt.config), subcommand);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n" << kSchemaHelp;
    return kExitUsage;
  }
  if (opt.seed) rc.override_seed(*opt.seed);
  if (workers) rc.override_workers(*workers);

  const std::filesystem::path out_dir(opt.out);
  {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
      err << "error: cannot create output directory '" << opt.out << "'\n";
      return kExitUsage;
    }
    const auto probe = out_dir / ".wegnerlab-write-probe";
    std::ofstream(probe) << "";
    if (!std::filesystem::exists(probe)) {
      err << "error: output directory '" << opt.out << "' is not writable\n";
      return kExitUsage;
    }
    std::filesystem::remove(probe, ec);
  }

  Report report;
  report.subcommand = subcommand;
  report.master_seed = opt.seed;
  try {
    run_section(report.runs, "wegner", rc.wegner, wegner_suite);
    run_section(report.runs, "ids", rc.ids, ids_suite);
    run_section(report.runs, "landau", rc.landau, landau_suite);
    if (rc.averaging) report.runs.push_back({"averaging", averaging_suite(*rc.averaging)});
    if (rc.tracebounds) report.runs.push_back({"tracebounds", tracebounds_suite(*rc.tracebounds)});
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  report.prefix_rows = subcommand == "verify-all" || report.runs.size() > 1;

  try {
    emit_report(report, out_dir);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  int failed = 0;
  const auto checks = report.checks();
  for (const Check& c : checks) {
    if (c.passed) continue;
    ++failed;
    err << "VIOLATED " << c.name << ": measured " << c.measured << ", bound " << c.bound;
    if (c.instance_seed) err << ", instance seed " << *c.instance_seed;
    err << "\n";
  }
  out << subcommand << ": " << checks.size() - failed << "/" << checks.size() << " checks passed, results in "
      << opt.out << "\n";
  return failed == 0 ? kExitOk : kExitViolation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-volume random Schroedinger operators: Wegner, IDS and spectral averaging checks", "wegnerlab"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"wegner", "Wegner statistic Tr E([E0-eps, E0+eps]) and its scaling fits"},
      {"ids", "integrated density of states and its increments"},
      {"landau", "Wegner statistic at a Landau band centre"},
      {"averaging", "spectral averaging inequalities"},
      {"tracebounds", "trace-norm decay and trace inequalities"},
      {"verify-all", "every section present in the config"},
  };
  std::uint64_t seed = 0;
  int workers = 0;
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON config file")->required();
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "override every master seed");
    sub->add_option("--workers", workers, "worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
    subs.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help() << kSchemaHelp;
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--seed") > 0) opt.seed = seed;
  if (chosen->count("--workers") > 0) opt.workers = workers;
  return execute(chosen->get_name(), opt, out, err);
}

}  // namespace wegnerlab
