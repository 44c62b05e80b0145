#include "wegnerlab/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace wegnerlab {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// "wegner.volume_exponent" -> "wegner[uniform].volume_exponent"
std::string rename_check(const std::string& run, const std::string& name) {
  const auto dot = name.find('.');
  return dot == std::string::npos ? run + "." + name : run + name.substr(dot);
}

std::string prefixed(const Report& r, const NamedRun& run, const std::string& s) {
  return r.prefix_rows ? run.name + "/" + s : s;
}

}  // namespace

bool Report::passed() const {
  for (const auto& run : runs) {
    if (!run.output.all_passed()) return false;
  }
  return true;
}

std::vector<Check> Report::checks() const {
  std::vector<Check> out;
  for (const auto& run : runs) {
    for (Check c : run.output.checks) {
      c.name = rename_check(run.name, c.name);
      out.push_back(std::move(c));
    }
  }
  return out;
}

ResultTable Report::merged_table() const {
  ResultTable t;
  for (const auto& run : runs) {
    for (ResultRow row : run.output.table.rows) {
      row.statistic = prefixed(*this, run, row.statistic);
      t.rows.push_back(std::move(row));
    }
    for (FitSummary f : run.output.table.summary) {
      f.name = prefixed(*this, run, f.name);
      t.summary.push_back(std::move(f));
    }
    t.cells.insert(t.cells.end(), run.output.table.cells.begin(), run.output.table.cells.end());
  }
  t.canonical_sort();
  return t;
}

Json summary_json(const Report& report) {
  Json j;
  j["subcommand"] = report.subcommand;
  j["master_seed"] = report.master_seed ? Json(*report.master_seed) : Json(nullptr);
  j["passed"] = report.passed();
  Json checks = Json::array();
  for (const Check& c : report.checks()) {
    checks.push_back({{"name", c.name},
                      {"anchor", c.anchor},
                      {"measured", number(c.measured)},
                      {"bound", number(c.bound)},
                      {"margin", number(c.margin)},
                      {"passed", c.passed},
                      {"instance_seed", c.instance_seed ? Json(*c.instance_seed) : Json(nullptr)}});
  }
  j["checks"] = checks;
  Json fits = Json::array();
  Json cells = Json::array();
  for (const auto& run : report.runs) {
    for (const FitSummary& f : run.output.table.summary) {
      fits.push_back({{"name", prefixed(report, run, f.name)},
                      {"estimate", number(f.estimate)},
                      {"stderr", number(f.stderr_)},
                      {"r_squared", number(f.r_squared)}});
    }
    for (const WegnerCell& c : run.output.table.cells) {
      cells.push_back({{"run", run.name},
                       {"L", c.L},
                       {"volume", number(c.volume)},
                       {"epsilon", number(c.epsilon)},
                       {"mean", number(c.mean)},
                       {"stderr", number(c.stderr_)},
                       {"prob_near", number(c.prob_near)},
                       {"s_2eps", number(c.s_2eps)},
                       {"cw_ratio", number(c.cw_ratio)}});
    }
  }
  j["fits"] = fits;
  j["cells"] = cells;
  return j;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::InvalidArgument, "write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::InvalidArgument, "cannot rename onto '" + path.string() + "'");
  }
}

void emit_report(const Report& report, const std::filesystem::path& out_dir) {
  std::ostringstream csv;
  report.merged_table().write_csv(csv);
  write_atomic(out_dir / "results.csv", csv.str());
  write_atomic(out_dir / "summary.json", summary_json(report).dump(2) + "\n");
  for (const auto& run : report.runs) {
    for (const ExtraFile& f : run.output.extra_files) {
      // labeled runs may repeat a section, so their files carry the label
      const std::string name = run.name.find('[') == std::string::npos ? f.filename : run.name + "." + f.filename;
      write_atomic(out_dir / name, f.contents);
    }
  }
}

}  // namespace wegnerlab
