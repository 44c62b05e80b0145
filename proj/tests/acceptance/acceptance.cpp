// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "wegnerlab/averaging.hpp"
#include "wegnerlab/cli.hpp"
#include "wegnerlab/errors.hpp"
#include "wegnerlab/experiments.hpp"
#include "wegnerlab/suites.hpp"

using namespace wegnerlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "NOT ") + what;
  }
};

std::string fmt(const char* f, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const Check* find_check(const SuiteOutput& out, const std::string& name) {
  for (const auto& c : out.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

// Requires a named suite check to exist and pass.
void require_check(Outcome& o, const SuiteOutput& out, const std::string& name) {
  const Check* c = find_check(out, name);
  if (!c) {
    o.require(false, name + " missing");
    return;
  }
  std::ostringstream s;
  s << name << " " << c->measured << " vs " << c->bound;
  o.require(c->passed, s.str());
}

AveragingSuiteConfig averaging_only() {
  AveragingSuiteConfig cfg;
  cfg.seed = 20240501;
  cfg.instances = 1;
  cfg.singular_instances = 0;
  cfg.dissipative_instances = 0;
  cfg.arctan_instances = 0;
  cfg.resolvent.reset();
  return cfg;
}

Outcome spectral_averaging() {
  AveragingSuiteConfig cfg = averaging_only();
  cfg.instances = 1000;
  cfg.dimension = 16;
  cfg.b_min = 0.01;
  const SuiteOutput out = averaging_suite(cfg);
  Outcome o;
  require_check(o, out, "averaging.self_adjoint");
  double worst = 0.0;
  int n = 0;
  for (const auto& r : out.table.rows) {
    if (r.statistic == "averaging_upper") {
      worst = std::max(worst, r.value);
      ++n;
    }
  }
  o.require(n == 1000, "1000 instances");
  o.require(worst <= 2.0 * std::numbers::pi, "max certified upper " + fmt("%.4f", worst) + " <= 2 pi");
  return o;
}

Outcome lattice_sum() {
  Outcome o;
  int violations = 0;
  for (int i = 0; i <= 10; ++i) {
    for (double b : {0.1, 0.5, 1.0, 2.0, 10.0}) {
      if (ell_value(0.1 * i, b).upper() > ell_bound(b)) ++violations;
    }
  }
  o.require(violations == 0, std::to_string(violations) + " violations on the kappa x b grid");
  const double oracle = 1.0 + std::numbers::pi / std::tanh(std::numbers::pi);
  const CertifiedSum s = ell_value(0.0, 1.0);
  o.require(std::abs(s.partial_sum - oracle) <= 1e-3 && std::abs(oracle - 4.153) < 1e-3,
            "l(0;1) = " + fmt("%.6f", s.partial_sum) + " vs oracle " + fmt("%.6f", oracle));
  return o;
}

Outcome dissipative() {
  AveragingSuiteConfig cfg = averaging_only();
  cfg.dissipative_instances = 1000;
  cfg.lambdas = {0.25, 0.5, 1.0};
  const SuiteOutput out = averaging_suite(cfg);
  Outcome o;
  require_check(o, out, "averaging.dissipative");
  require_check(o, out, "averaging.dissipative_sign");
  return o;
}

Outcome arctan_projector() {
  AveragingSuiteConfig cfg = averaging_only();
  cfg.arctan_instances = 1000;
  const SuiteOutput out = averaging_suite(cfg);
  Outcome o;
  require_check(o, out, "averaging.arctan_projector");
  require_check(o, out, "averaging.arctan_endpoint_equality");
  return o;
}

Outcome expectation_bounds() {
  AveragingSuiteConfig cfg = averaging_only();
  ResolventSuiteConfig rc;
  rc.cells = 64;
  rc.site = 32;
  rc.measure = MeasureSpec::uniform(0.0, 1.0);
  rc.energy_E0 = 2.0;
  rc.epsilons = {0.02, 0.05, 0.1};
  rc.n_realizations = 500;
  cfg.resolvent = rc;
  const SuiteOutput out = averaging_suite(cfg);
  Outcome o;
  for (const char* eps : {"0.02", "0.05", "0.1"}) {
    require_check(o, out, std::string("averaging.expectation_2pi@eps=") + eps);
    require_check(o, out, std::string("averaging.expectation_8s@eps=") + eps);
  }
  return o;
}

ExperimentConfig wegner_1d(std::vector<int> sizes, MeasureSpec measure, double e0, std::vector<double> eps, int n) {
  ExperimentConfig cfg;
  cfg.model.dimension = 1;
  cfg.model.box_sizes = std::move(sizes);
  cfg.model.points_per_cell = 1;
  cfg.measure = std::move(measure);
  cfg.energy_E0 = e0;
  cfg.epsilons = std::move(eps);
  cfg.n_realizations = n;
  cfg.master_seed = 20240501;
  cfg.workers = 0;
  return cfg;
}

Outcome wegner_volume() {
  ExperimentConfig cfg = wegner_1d({32, 64, 128}, MeasureSpec::uniform(-2.0, 2.0), 2.0, {0.1}, 200);
  cfg.expect.volume_exponent = Expectation{1.0, 0.15};
  const SuiteOutput out = wegner_suite(cfg);
  Outcome o;
  require_check(o, out, "wegner.volume_exponent@eps=0.1");
  require_check(o, out, "wegner.probability_form");
  require_check(o, out, "wegner.cw_ratio_finite");
  return o;
}

Outcome modulus_transfer() {
  Outcome o;
  {
    ExperimentConfig cfg =
        wegner_1d({128}, MeasureSpec::uniform(0.0, 1.0), 2.5, {0.01, 0.02, 0.05, 0.1, 0.2}, 200);
    cfg.expect.epsilon_exponent = Expectation{1.0, 0.15};
    const SuiteOutput out = wegner_suite(cfg);
    require_check(o, out, "wegner.epsilon_exponent@L=128");
  }
  {
    // small hopping keeps the spectrum a slightly smeared copy of the
    // Cantor support; windows are centred inside the set
    std::vector<double> eps;
    for (int k = 2; k <= 5; ++k) eps.push_back(0.5 * std::pow(3.0, -k));
    ExperimentConfig cfg = wegner_1d({128}, MeasureSpec::cantor(30), 0.02 + 2.0 / 3.0, eps, 200);
    cfg.model.kinetic_scale = 0.01;
    cfg.expect.epsilon_exponent = Expectation{0.63, 0.10};
    const SuiteOutput out = wegner_suite(cfg);
    require_check(o, out, "wegner.epsilon_exponent@L=128");
  }
  {
    const double k = 0.02;
    ExperimentConfig cfg =
        wegner_1d({128}, MeasureSpec::atomic({{0.0, 0.5}, {1.0, 0.5}}), 2 * k - 2 * k * k, {1e-2, 1e-3, 1e-4, 1e-5},
                  200);
    cfg.model.kinetic_scale = k;
    cfg.expect.plateau = true;
    const SuiteOutput out = wegner_suite(cfg);
    require_check(o, out, "wegner.plateau_exponent");
    require_check(o, out, "wegner.plateau_nonvanishing");
  }
  return o;
}

Outcome landau() {
  ExperimentConfig cfg;
  cfg.model.dimension = 2;
  cfg.model.box_sizes = {12, 24};
  cfg.model.points_per_cell = 1;
  cfg.model.flux = FluxSpec{1, 16};
  cfg.measure = MeasureSpec::uniform(-0.5, 0.5);
  cfg.epsilons = {0.05, 0.1};
  cfg.n_realizations = 40;
  cfg.master_seed = 20240501;
  cfg.workers = 0;
  cfg.expect.volume_exponent = Expectation{1.0, 0.2};
  const SuiteOutput out = landau_suite(cfg);
  Outcome o;
  require_check(o, out, "landau.degeneracy@L=12");
  require_check(o, out, "landau.degeneracy@L=24");
  // independent flux-count oracle: (L n)^2 p / q quanta on the torus
  for (int L : cfg.model.box_sizes) {
    const long oracle = static_cast<long>(L) * L * cfg.model.flux->p / cfg.model.flux->q;
    const LandauBand b = landau_band(cfg.model, L, 0);
    o.require(b.degeneracy == oracle, "L=" + std::to_string(L) + " degeneracy " + std::to_string(b.degeneracy) +
                                          " == " + std::to_string(oracle));
  }
  require_check(o, out, "landau.volume_exponent@eps=0.05");
  require_check(o, out, "landau.volume_exponent@eps=0.1");
  const int dim = 24 * 24;
  o.require(dim <= 576, "dense dim " + std::to_string(dim));
  return o;
}

Outcome trace_decay() {
  const TraceSuiteConfig defaults;
  const DecayStudy st = trace_decay_study(1, defaults.cells, 1, 1.0, defaults.separations);
  const double stated = 2.0 * std::acosh(1.5);
  const double green = std::acosh(1.5);
  Outcome o;
  o.require(std::abs(st.fit.c0 - stated) / stated <= 0.15,
            "c0 = " + fmt("%.4f", st.fit.c0) + " within 15% of 2 arccosh(1.5) = " + fmt("%.4f", stated));
  o.require(st.fit.r_squared >= 0.95, "r^2 = " + fmt("%.4f", st.fit.r_squared));
  const DecayStudy sk = smooth_kernel_study(defaults.cells, defaults.bump_kind, defaults.bump_order,
                                            defaults.kernel_separations);
  o.require(-sk.fit.c0 <= -2.0, "smooth-cutoff log-log slope " + fmt("%.3f", -sk.fit.c0) + " <= -2");
  std::printf("  note: Green-function rate arccosh(1.5) = %.4f, fitted c0 within %.1f%% of it\n", green,
              100.0 * std::abs(st.fit.c0 - green) / green);
  return o;
}

Outcome reproducibility() {
  const std::string config = std::string(WEGNERLAB_SOURCE_DIR) + "/configs/default.json";
  const fs::path base = fs::temp_directory_path() / "wegnerlab_acceptance_repro";
  fs::remove_all(base);
  auto run = [&](const std::string& dir, const std::string& workers) {
    std::ostringstream out, err;
    const int code = run_cli({"verify-all", "--config", config, "--out", (base / dir).string(), "--seed", "17",
                              "--workers", workers},
                             out, err);
    return code;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  Outcome o;
  const int a = run("a", "1");
  const int b = run("b", "1");
  const int c = run("c", "2");
  o.require(a != kExitUsage && b != kExitUsage && c != kExitUsage, "verify-all ran (exit " + std::to_string(a) + ")");
  const std::string ra = slurp(base / "a" / "results.csv");
  o.require(!ra.empty(), "results.csv written (" + std::to_string(ra.size()) + " bytes)");
  o.require(ra == slurp(base / "b" / "results.csv"), "byte-identical rerun");
  o.require(ra == slurp(base / "c" / "results.csv"), "byte-identical with 2 workers");
  return o;
}

Outcome ucp() {
  std::vector<double> cs;
  for (int L : {8, 16, 32}) cs.push_back(ucp_bottom_band(L, 4, PotentialSpec{}));
  const double lo = *std::min_element(cs.begin(), cs.end());
  const double hi = *std::max_element(cs.begin(), cs.end());
  Outcome o;
  o.require(lo > 0.0, "min ucp_constant " + fmt("%.6g", lo) + " > 0");
  o.require(hi < 2.0 * lo, "max/min " + fmt("%.4f", hi / lo) + " < 2");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;  // <= 0: none stated
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "spectral averaging bound, 1000 instances", 120, spectral_averaging},
      {2, "lattice sum bound and l(0;1) oracle", 10, lattice_sum},
      {3, "dissipative averaging bound, 1000 instances", 120, dissipative},
      {4, "arctan/projector inequality and endpoint equality", 0, arctan_projector},
      {5, "expectation bounds on the 1D model", 300, expectation_bounds},
      {6, "Wegner volume scaling in 1D", 600, wegner_volume},
      {7, "modulus transfer: uniform, Cantor, atomic plateau", 0, modulus_transfer},
      {8, "Landau band degeneracy and volume scaling", 1200, landau},
      {9, "trace decay and smooth-cutoff decay", 0, trace_decay},
      {10, "verify-all reproducibility", 0, reproducibility},
      {11, "unique continuation constant stability", 0, ucp},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit_s > 0) o.require(secs < c.time_limit_s, "runtime < " + fmt("%g", c.time_limit_s) + " s");
    if (!o.passed) ++failed;
    std::printf("[%s] criterion %2d: %s (%.1f s) -- %s\n", o.passed ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
