#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "wegnerlab/errors.hpp"
#include "wegnerlab/experiments.hpp"
#include "wegnerlab/random.hpp"

using namespace wegnerlab;

namespace {

ExperimentConfig small_1d() {
  ExperimentConfig cfg;
  cfg.model.dimension = 1;
  cfg.model.box_sizes = {16, 32};
  cfg.model.points_per_cell = 1;
  cfg.measure = MeasureSpec::uniform(0.0, 1.0);
  cfg.energy_E0 = 2.0;
  cfg.epsilons = {0.05, 0.2};
  cfg.n_realizations = 12;
  cfg.master_seed = 7;
  return cfg;
}

std::string csv(const ResultTable& t) {
  std::ostringstream os;
  t.write_csv(os);
  return os.str();
}

// Number of free 1D ring eigenvalues 2 - 2cos(2 pi k / L) in [a, b].
double free_ring_count(int L, double a, double b) {
  double c = 0.0;
  for (int k = 0; k < L; ++k) {
    const double e = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / L);
    if (e >= a && e <= b) c += 1.0;
  }
  return c;
}

}  // namespace

TEST_CASE("zero single-site bump gives the deterministic free trace") {
  ExperimentConfig cfg = small_1d();
  cfg.model.u.height = 0.0;
  cfg.energy_E0 = 1.0;
  cfg.epsilons = {0.3};
  const ResultTable t = run_wegner(cfg);
  for (const auto& c : t.cells) {
    CHECK(c.stderr_ == 0.0);
    CHECK(c.mean == doctest::Approx(free_ring_count(c.L, 0.7, 1.3)));
  }
}

TEST_CASE("wegner rows: count, ordering and worker independence") {
  ExperimentConfig cfg = small_1d();
  const ResultTable a = run_wegner(cfg);
  CHECK(a.rows.size() == cfg.model.box_sizes.size() * cfg.epsilons.size() * cfg.n_realizations);
  CHECK(a.cells.size() == cfg.model.box_sizes.size() * cfg.epsilons.size());
  cfg.workers = 3;
  const ResultTable b = run_wegner(cfg);
  CHECK(csv(a) == csv(b));
  cfg.master_seed = 8;
  CHECK(csv(run_wegner(cfg)) != csv(a));
}

TEST_CASE("wegner statistic is nonnegative, bounded by the dimension, and C_W is finite") {
  ExperimentConfig cfg = small_1d();
  cfg.model.box_sizes = {32, 64};
  cfg.n_realizations = 40;
  const ResultTable t = run_wegner(cfg);
  for (const auto& r : t.rows) {
    CHECK(r.value >= 0.0);
    CHECK(r.value <= r.L);
  }
  for (const auto& c : t.cells) {
    CHECK(std::isfinite(c.cw_ratio));
    CHECK(c.prob_near <= c.mean + 1e-12);
  }
  // uniform law: s(2 eps) = 2 eps, and the mean trace grows like |Lambda| eps
  double lo = 1e300, hi = 0.0;
  for (const auto& c : t.cells) {
    CHECK(c.s_2eps == doctest::Approx(2.0 * c.epsilon).epsilon(1e-9));
    lo = std::min(lo, c.cw_ratio);
    hi = std::max(hi, c.cw_ratio);
  }
  CHECK(hi / lo < 3.0);
  CHECK(t.find_fit("cw_ratio_max") != nullptr);
}

TEST_CASE("wegner trace equals the IDS increment per realization") {
  ExperimentConfig cfg = small_1d();
  cfg.model.box_sizes = {24};
  cfg.epsilons = {0.1};
  const double e0 = 2.0, eps = 0.1;
  const ResultTable w = run_wegner(cfg);
  ExperimentConfig ci = cfg;
  ci.epsilons = {2.0 * eps};
  const ResultTable ids = run_ids(ci, {e0 - eps});
  std::vector<double> inc;
  for (const auto& r : ids.rows) {
    if (r.statistic.rfind("ids_increment", 0) == 0) inc.push_back(r.value);
  }
  std::vector<double> tr;
  for (const auto& r : w.rows) tr.push_back(r.value);
  REQUIRE(inc.size() == tr.size());
  // the increment counts (E0 - eps, E0 + eps]; an eigenvalue exactly at the
  // left endpoint has probability zero for a continuous law
  for (std::size_t k = 0; k < tr.size(); ++k) CHECK(tr[k] / 24.0 == doctest::Approx(inc[k]).epsilon(1e-12));
}

TEST_CASE("IDS limits and monotonicity") {
  ExperimentConfig cfg = small_1d();
  cfg.model.box_sizes = {16};
  cfg.model.points_per_cell = 2;
  const ResultTable t = run_ids(cfg, {-10.0, 0.5, 1.5, 3.0, 1e4});
  std::map<std::string, std::vector<double>> by;
  for (const auto& r : t.rows) {
    if (r.statistic.rfind("ids@", 0) == 0) by[r.statistic].push_back(r.value);
  }
  for (double v : by["ids@E=-10"]) CHECK(v == 0.0);
  for (double v : by["ids@E=10000"]) CHECK(v == doctest::Approx(32.0 / 16.0));
  const auto& a = by["ids@E=0.5"];
  const auto& b = by["ids@E=1.5"];
  const auto& c = by["ids@E=3"];
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k] <= b[k]);
    CHECK(b[k] <= c[k]);
  }
  for (const auto& r : t.rows) {
    if (r.statistic.rfind("ids_increment", 0) == 0) CHECK(r.value >= 0.0);
  }
}

TEST_CASE("power-law fit on exact data") {
  const std::vector<double> x{1, 2, 4, 8, 16};
  std::vector<double> y, ys, z(x.size(), 0.0);
  for (double v : x) {
    y.push_back(2.0 * v);
    ys.push_back(std::sqrt(v));
  }
  PowerLawFit f = powerlaw_fit_points(x, y, z);
  CHECK(f.exponent == doctest::Approx(1.0));
  CHECK(f.prefactor == doctest::Approx(2.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
  f = powerlaw_fit_points(x, ys, z);
  CHECK(f.exponent == doctest::Approx(0.5));
  CHECK_THROWS_AS(powerlaw_fit_points({1, 2}, {1, 0}, {0, 0}), Error);
  CHECK_THROWS_AS(powerlaw_fit_points({1}, {1}, {0}), Error);
  CHECK_THROWS_AS(powerlaw_fit_points({2, 2}, {1, 3}, {0, 0}), Error);
  try {
    powerlaw_fit_points({1, 2}, {1, -1}, {0, 0});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveData);
  }
}

TEST_CASE("weighted fit ignores a point with huge error bar") {
  const std::vector<double> x{1, 2, 4, 8};
  std::vector<double> y{1, 2, 4, 100};
  const PowerLawFit f = powerlaw_fit_points(x, y, {1e-6, 1e-6, 1e-6, 1e3});
  CHECK(f.exponent == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("unperturbed Landau band and a gap energy") {
  ExperimentConfig cfg;
  cfg.model.dimension = 2;
  cfg.model.box_sizes = {12};
  cfg.model.points_per_cell = 1;
  cfg.model.flux = FluxSpec{1, 16};
  cfg.model.u.height = 0.0;
  cfg.measure = MeasureSpec::uniform(-0.5, 0.5);
  cfg.epsilons = {0.05};
  cfg.n_realizations = 8;
  const LandauResult r = run_landau(cfg);
  REQUIRE(r.bands.size() == 1);
  CHECK(r.bands[0].flux_quanta == 9);
  CHECK(r.bands[0].degeneracy == 9);
  for (const auto& row : r.table.rows) CHECK(row.value == 9.0);

  // midway between the first two bands nothing is counted
  cfg.energy_E0 = r.bands[0].center + 0.5 * r.bands[0].width + 0.5 * r.bands[0].gap_above;
  const LandauResult g = run_landau(cfg);
  for (const auto& row : g.table.rows) CHECK(row.value == 0.0);

  cfg.model.box_sizes = {10};
  CHECK_THROWS_AS(run_landau(cfg), Error);
}

TEST_CASE("experiment validation") {
  ExperimentConfig cfg = small_1d();
  cfg.epsilons = {0.0};
  CHECK_THROWS_WITH_AS(run_wegner(cfg), doctest::Contains("(0, 1]"), Error);
  cfg.epsilons = {1.5};
  CHECK_THROWS_AS(run_wegner(cfg), Error);
  cfg = small_1d();
  cfg.n_realizations = 7;
  CHECK_THROWS_AS(run_wegner(cfg), Error);
  cfg = small_1d();
  cfg.model.box_sizes.clear();
  CHECK_THROWS_AS(run_wegner(cfg), Error);
  cfg = small_1d();
  cfg.model.flux = FluxSpec{1, 4};
  CHECK_THROWS_AS(run_wegner(cfg), Error);
}

TEST_CASE("Toeplitz couplings have the marginal of the convolved law") {
  const MeasureSpec base = MeasureSpec::uniform(0.0, 1.0);
  const MeasureSpec t = MeasureSpec::toeplitz(base, {{{0, 0}, 1.0}, {{1, 0}, 0.3}});
  const BoxSpec box{1, 64, 1, 4096};
  std::vector<double> samples;
  double cov = 0.0, m = 0.0;
  const int R = 400;
  for (int r = 0; r < R; ++r) {
    const Eigen::VectorXd eta = draw_couplings(box, t, 3, r);
    for (Index s = 0; s < eta.size(); ++s) {
      samples.push_back(eta(s));
      CHECK(eta(s) >= 0.0);
      CHECK(eta(s) <= 1.3);
    }
    for (Index s = 0; s < eta.size(); ++s) cov += eta(s) * eta((s + 1) % eta.size());
  }
  for (double v : samples) m += v;
  m /= static_cast<double>(samples.size());
  cov = cov / static_cast<double>(samples.size()) - m * m;
  CHECK(m == doctest::Approx(0.65).epsilon(0.01));
  // U + 0.3 V for independent uniforms has a trapezoidal density
  auto F = [](double x) {
    const double a = 0.3;
    if (x <= 0.0) return 0.0;
    if (x <= a) return x * x / (2 * a);
    if (x <= 1.0) return x - a / 2;
    if (x <= 1.0 + a) return 1.0 - (1.0 + a - x) * (1.0 + a - x) / (2 * a);
    return 1.0;
  };
  std::sort(samples.begin(), samples.end());
  double ks = 0.0;
  const double N = static_cast<double>(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    ks = std::max({ks, std::abs(F(samples[k]) - k / N), std::abs(F(samples[k]) - (k + 1) / N)});
  }
  CHECK(ks < 0.02);
  // neighbours share one base variable: Cov = 0.3 Var(omega) = 0.3 / 12
  CHECK(cov == doctest::Approx(0.025).epsilon(0.15));
}

TEST_CASE("couplings depend only on (seed, L, realization, site)") {
  const BoxSpec box{1, 16, 1, 4096};
  const MeasureSpec u = MeasureSpec::uniform(-1.0, 1.0);
  const Eigen::VectorXd a = draw_couplings(box, u, 11, 5);
  CHECK(a == draw_couplings(box, u, 11, 5));
  CHECK(a != draw_couplings(box, u, 11, 6));
  CHECK(a != draw_couplings(box, u, 12, 5));
  const BoxSpec box2{1, 17, 1, 4096};
  CHECK(a.head(16) != draw_couplings(box2, u, 11, 5).head(16));
}

TEST_CASE("atomic law leaves a plateau in the small-epsilon Wegner statistic") {
  ExperimentConfig cfg;
  cfg.model.dimension = 1;
  cfg.model.box_sizes = {32};
  cfg.model.kinetic_scale = 0.02;
  cfg.model.u.kind = PotentialSpec::Kind::Box;
  cfg.model.u.radius = 0.5;
  cfg.measure = MeasureSpec::atomic({{0.0, 0.5}, {1.0, 0.5}});
  // an isolated zero coupling between ones sits at 2k - 2k^2, up to a
  // spread of order 1e-5 from longer hopping paths
  cfg.energy_E0 = 2 * 0.02 - 2 * 0.02 * 0.02;
  cfg.epsilons = {1e-4, 2e-5};
  cfg.n_realizations = 16;
  const ResultTable t = run_wegner(cfg);
  REQUIRE(t.cells.size() == 2);
  CHECK(t.cells[0].mean > 0.0);
  CHECK(t.cells[1].mean > 0.8 * t.cells[0].mean);
  CHECK(t.cells[1].s_2eps >= 0.5);
}
