#include "wegnerlab/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <map>
#include <sstream>
#include <tuple>

#include "wegnerlab/averaging.hpp"
#include "wegnerlab/instances.hpp"
#include "wegnerlab/parallel.hpp"
#include "wegnerlab/spectra.hpp"

namespace wegnerlab {

namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string fmt_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr const char* kWegnerAnchor = "Wegner estimate E{Tr E([E0-eps,E0+eps])} <= C_W s(2 eps) |Lambda|";
constexpr const char* kWegnerProbAnchor = "Wegner estimate, probability form P{dist(sigma(H),E0) < eps} <= E{Tr E}";
constexpr const char* kTransferAnchor = "IDS modulus transfer N(E+eps) - N(E) <= C_I s(eps)";
constexpr const char* kLandauAnchor = "Landau Wegner estimate <= C_W s(|Delta|) L^2";

// Worst entry of a per-instance vector, with its index.
std::pair<double, std::size_t> worst(const std::vector<double>& v) {
  const auto it = std::max_element(v.begin(), v.end());
  return {*it, static_cast<std::size_t>(it - v.begin())};
}

}  // namespace

Check check_at_most(std::string name, std::string anchor, double measured, double bound,
                    std::optional<std::uint64_t> seed) {
  const double margin = bound - measured;
  return {std::move(name), std::move(anchor), measured, bound, margin, margin >= 0.0, seed};
}

Check check_at_least(std::string name, std::string anchor, double measured, double bound,
                     std::optional<std::uint64_t> seed) {
  const double margin = measured - bound;
  return {std::move(name), std::move(anchor), measured, bound, margin, margin >= 0.0, seed};
}

bool SuiteOutput::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void SuiteOutput::append(SuiteOutput other) {
  table.rows.insert(table.rows.end(), other.table.rows.begin(), other.table.rows.end());
  table.summary.insert(table.summary.end(), other.table.summary.begin(), other.table.summary.end());
  table.cells.insert(table.cells.end(), other.table.cells.begin(), other.table.cells.end());
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  extra_files.insert(extra_files.end(), other.extra_files.begin(), other.extra_files.end());
}

namespace {

// Checks shared by the Wegner-type runs: the probability form, finiteness of
// the measured C_W ratio and the configured scaling expectations.
void wegner_checks(const std::string& prefix, const std::string& anchor, const ExperimentConfig& cfg,
                   SuiteOutput& out) {
  const ResultTable& t = out.table;
  double prob_excess = -std::numeric_limits<double>::infinity();
  double cw = 0.0;
  for (const auto& c : t.cells) {
    prob_excess = std::max(prob_excess, c.prob_near - c.mean);
    cw = std::max(cw, c.cw_ratio);
  }
  out.checks.push_back(check_at_most(prefix + ".probability_form", kWegnerProbAnchor, prob_excess, 0.0));
  out.checks.push_back(check_at_most(prefix + ".cw_ratio_finite", anchor, cw, std::numeric_limits<double>::max()));

  if (cfg.expect.volume_exponent) {
    for (double eps : cfg.epsilons) {
      const std::string name = "volume_exponent@eps=" + fmt_g(eps);
      const FitSummary* f = t.find_fit(name);
      const double dev = f ? std::abs(f->estimate - cfg.expect.volume_exponent->value)
                           : std::numeric_limits<double>::infinity();
      out.checks.push_back(
          check_at_most(prefix + "." + name, anchor, dev, cfg.expect.volume_exponent->tolerance));
    }
  }
  const int largest = *std::max_element(cfg.model.box_sizes.begin(), cfg.model.box_sizes.end());
  const std::string eps_name = "epsilon_exponent@L=" + std::to_string(largest);
  if (cfg.expect.epsilon_exponent) {
    const FitSummary* f = t.find_fit(eps_name);
    const double dev = f ? std::abs(f->estimate - cfg.expect.epsilon_exponent->value)
                         : std::numeric_limits<double>::infinity();
    out.checks.push_back(
        check_at_most(prefix + "." + eps_name, kTransferAnchor, dev, cfg.expect.epsilon_exponent->tolerance));
  }
  if (cfg.expect.plateau) {
    // a plateau: the statistic scales with a small exponent and stays
    // significantly positive at the smallest window
    const FitSummary* f = t.find_fit(eps_name);
    out.checks.push_back(check_at_most(prefix + ".plateau_exponent", "atomic negative control",
                                       f ? f->estimate : std::numeric_limits<double>::infinity(), 0.3));
    const double eps_min = *std::min_element(cfg.epsilons.begin(), cfg.epsilons.end());
    double z = 0.0;
    for (const auto& c : t.cells) {
      if (c.L == largest && c.epsilon == eps_min) z = c.stderr_ > 0.0 ? c.mean / c.stderr_ : (c.mean > 0 ? 1e300 : 0);
    }
    out.checks.push_back(check_at_least(prefix + ".plateau_nonvanishing", "atomic negative control", z, 5.0));
  }
}

}  // namespace

SuiteOutput wegner_suite(const ExperimentConfig& cfg) {
  SuiteOutput out;
  out.table = run_wegner(cfg);
  wegner_checks("wegner", kWegnerAnchor, cfg, out);
  return out;
}

SuiteOutput ids_suite(const ExperimentConfig& cfg) {
  SuiteOutput out;
  std::vector<double> grid = cfg.energy_grid;
  if (grid.empty()) grid.push_back(cfg.energy_E0 ? *cfg.energy_E0 : default_energy(cfg));
  out.table = run_ids(cfg, grid);
  const ResultTable& t = out.table;

  // N_hat(E) must be nondecreasing in E realization by realization; collect
  // the worst decrease and the worst negative increment.
  std::map<std::tuple<int, std::int64_t>, std::vector<std::pair<double, double>>> ids;
  double worst_negative = 0.0;
  for (const auto& r : t.rows) {
    if (r.statistic.rfind("ids@E=", 0) == 0) {
      ids[{r.L, r.realization}].push_back({std::stod(r.statistic.substr(6)), r.value});
    } else if (r.statistic.rfind("ids_increment@E=", 0) == 0) {
      worst_negative = std::max(worst_negative, -r.value);
    }
  }
  double worst_decrease = 0.0;
  for (auto& [key, pts] : ids) {
    std::sort(pts.begin(), pts.end());
    for (std::size_t k = 1; k < pts.size(); ++k) worst_decrease = std::max(worst_decrease, pts[k - 1].second - pts[k].second);
  }
  out.checks.push_back(check_at_most("ids.monotone", "N_Lambda(E) nondecreasing", worst_decrease, 0.0));
  out.checks.push_back(check_at_most("ids.increments_nonnegative", kTransferAnchor, worst_negative, 0.0));

  const int largest = *std::max_element(cfg.model.box_sizes.begin(), cfg.model.box_sizes.end());
  if (cfg.epsilons.size() >= 2) {
    for (double e : grid) {
      const std::string stat = "ids_increment@E=" + fmt_g(e);
      try {
        const PowerLawFit f = powerlaw_fit(t, FitAxis::Epsilon, stat, largest, std::nullopt, cfg.model.dimension);
        out.table.summary.push_back({"ids_epsilon_exponent@E=" + fmt_g(e) + ",L=" + std::to_string(largest),
                                     f.exponent, f.stderr_, f.r_squared});
        if (cfg.expect.epsilon_exponent) {
          out.checks.push_back(check_at_most("ids.epsilon_exponent@E=" + fmt_g(e), kTransferAnchor,
                                             std::abs(f.exponent - cfg.expect.epsilon_exponent->value),
                                             cfg.expect.epsilon_exponent->tolerance));
        }
      } catch (const Error&) {
        if (cfg.expect.epsilon_exponent) {
          out.checks.push_back(check_at_most("ids.epsilon_exponent@E=" + fmt_g(e), kTransferAnchor,
                                             std::numeric_limits<double>::infinity(),
                                             cfg.expect.epsilon_exponent->tolerance));
        }
      }
    }
  }
  for (const auto& f : t.summary) {
    if (f.name.rfind("ids_lipschitz_ratio_max@", 0) == 0) {
      out.checks.push_back(check_at_most("ids." + f.name, "IDS locally uniformly Lipschitz for Lipschitz single-site laws",
                                         f.estimate, std::numeric_limits<double>::max()));
    }
  }
  return out;
}

SuiteOutput landau_suite(const ExperimentConfig& cfg) {
  SuiteOutput out;
  LandauResult r = run_landau(cfg);
  out.table = std::move(r.table);
  for (std::size_t k = 0; k < r.bands.size(); ++k) {
    const LandauBand& b = r.bands[k];
    const std::string tag = "@L=" + std::to_string(b.L);
    out.checks.push_back(check_at_most("landau.degeneracy" + tag, "Landau level degeneracy equals the flux count",
                                       std::abs(static_cast<double>(b.degeneracy - b.flux_quanta)), 0.0));
    out.checks.push_back(check_at_least("landau.band_isolated" + tag, "Landau band separated by a gap",
                                        std::min(b.gap_below, b.gap_above), b.width));
    out.table.summary.push_back({"landau_band_center" + tag, b.center, 0.0, 1.0});
    out.table.summary.push_back({"landau_band_width" + tag, b.width, 0.0, 1.0});
  }
  wegner_checks("landau", kLandauAnchor, cfg, out);
  return out;
}

SuiteOutput averaging_suite(const AveragingSuiteConfig& cfg) {
  require(cfg.instances >= 1 && cfg.dimension >= 1, ErrorCode::InvalidArgument, "averaging suite needs instances");
  SuiteOutput out;
  auto& rows = out.table.rows;
  const int workers = resolve_workers(cfg.workers);

  // lattice sum l(kappa; b) on the grid
  {
    double worst_ratio = 0.0;
    for (int i = 0; i <= 10; ++i) {
      const double kappa = 0.1 * i;
      for (double b : cfg.ell_bs) {
        const CertifiedSum s = ell_value(kappa, b);
        rows.push_back({i, 0, b, "ell_upper", s.upper()});
        worst_ratio = std::max(worst_ratio, s.upper() / ell_bound(b));
      }
    }
    out.checks.push_back(check_at_most("averaging.ell_bound", "lattice sum bound l(kappa;b) <= pi(1+1/b)",
                                       worst_ratio, 1.0));
    const double oracle = 1.0 + std::numbers::pi / std::tanh(std::numbers::pi);
    const CertifiedSum s01 = ell_value(0.0, 1.0);
    out.checks.push_back(check_at_most("averaging.ell_oracle", "l(0;1) = 1 + pi coth(pi)",
                                       std::abs(s01.partial_sum - oracle), 1e-3));
  }

  // self-adjoint spectral averaging, B >= b_min
  {
    const int n = cfg.instances;
    std::vector<double> ratio(n), upper(n), bound(n);
    std::vector<std::uint64_t> seeds(n);
    parallel_for(n, workers, [&](std::size_t i) {
      seeds[i] = derive_seed({cfg.seed, 1, i});
      CounterStream s(seeds[i]);
      const Eigen::MatrixXcd a = random_hermitian(cfg.dimension, 2.0, s);
      const Eigen::MatrixXcd b = random_psd(cfg.dimension, cfg.b_min, 1.0, s);
      const Eigen::VectorXcd phi = random_unit_vector(cfg.dimension, s);
      const CertifiedSum sum = averaging_sum(a, b, phi, 0, cfg.y_grid);
      upper[i] = sum.upper();
      bound[i] = averaging_bound(b, phi);
      ratio[i] = upper[i] / bound[i];
    });
    for (int i = 0; i < n; ++i) {
      rows.push_back({i, cfg.dimension, 0.0, "averaging_upper", upper[i]});
      rows.push_back({i, cfg.dimension, 0.0, "averaging_bound", bound[i]});
    }
    const auto [w, at] = worst(ratio);
    out.checks.push_back(check_at_most("averaging.self_adjoint", "spectral averaging sum <= pi||B||(1+||B||)||phi||^2",
                                       w, 1.0, seeds[at]));
    out.table.summary.push_back({"averaging_max_ratio", w, 0.0, 1.0});
  }

  // singular B: only the partial (lower) sum is available
  if (cfg.singular_instances > 0) {
    const int n = cfg.singular_instances;
    std::vector<double> ratio(n);
    std::vector<std::uint64_t> seeds(n);
    parallel_for(n, workers, [&](std::size_t i) {
      seeds[i] = derive_seed({cfg.seed, 2, i});
      CounterStream s(seeds[i]);
      const Eigen::MatrixXcd a = random_hermitian(cfg.dimension, 2.0, s);
      const Eigen::MatrixXcd b = random_psd_rank(cfg.dimension, std::max(1, cfg.dimension / 2), 1.0, s);
      const Eigen::VectorXcd phi = random_unit_vector(cfg.dimension, s);
      const CertifiedSum sum = averaging_sum(a, b, phi, 400, cfg.y_grid);
      ratio[i] = sum.lower() / averaging_bound(b, phi);
    });
    const auto [w, at] = worst(ratio);
    out.checks.push_back(check_at_most("averaging.singular_partial", "spectral averaging sum, partial sums",
                                       w, 1.0, seeds[at]));
  }

  // dissipative averaging
  if (cfg.dissipative_instances > 0) {
    const int n = cfg.dissipative_instances;
    std::vector<double> ratio(n), neg(n), partial(n), lam(n);
    std::vector<std::uint64_t> seeds(n);
    parallel_for(n, workers, [&](std::size_t i) {
      seeds[i] = derive_seed({cfg.seed, 3, i});
      CounterStream s(seeds[i]);
      lam[i] = cfg.lambdas[i % cfg.lambdas.size()];
      const Eigen::MatrixXcd a0 = random_hermitian(cfg.dimension, 2.0, s);
      const Eigen::MatrixXcd gamma = random_psd(cfg.dimension, 0.0, 1.0, s);
      const Eigen::MatrixXcd b = random_psd(cfg.dimension, 0.0, 1.0, s);
      const Eigen::VectorXcd phi = random_unit_vector(cfg.dimension, s);
      const CertifiedSum sum = dissipative_sum(a0, gamma, b, phi, lam[i], 200, cfg.y_grid);
      partial[i] = sum.lower();
      ratio[i] = sum.lower() / dissipative_bound(lam[i], phi);
      neg[i] = -sum.min_term;
    });
    for (int i = 0; i < n; ++i) rows.push_back({i, cfg.dimension, lam[i], "dissipative_partial", partial[i]});
    const auto [w, at] = worst(ratio);
    out.checks.push_back(check_at_most("averaging.dissipative", "dissipative averaging sum <= pi(1+1/lambda)||phi||^2",
                                       w, 1.0, seeds[at]));
    const auto [wn, atn] = worst(neg);
    out.checks.push_back(check_at_most("averaging.dissipative_sign", "-Im <v,(A-z)^{-1}v> >= 0 for dissipative A",
                                       wn, 1e-12, seeds[atn]));
  }

  // arctan / projector inequality
  if (cfg.arctan_instances > 0) {
    const int n = cfg.arctan_instances;
    std::vector<double> deficit(n);
    std::vector<std::uint64_t> seeds(n);
    parallel_for(n, workers, [&](std::size_t i) {
      seeds[i] = derive_seed({cfg.seed, 4, i});
      CounterStream s(seeds[i]);
      const Index d = 1 + static_cast<Index>(i % static_cast<std::size_t>(cfg.arctan_dimension));
      const Eigen::MatrixXcd h = random_hermitian(d, 2.0, s);
      const Eigen::VectorXcd phi = random_unit_vector(d, s);
      const double e0 = -2.0 + 4.0 * s.uniform01();
      const double eps = std::pow(10.0, -3.0 + 3.0 * s.uniform01());
      const auto sd = eigensolve_matrix<std::complex<double>>(h, true);
      const ArctanCheck c = arctan_projector_check(sd, phi, e0, eps);
      deficit[i] = c.rhs - c.lhs;
    });
    const auto [w, at] = worst(deficit);
    out.checks.push_back(check_at_most("averaging.arctan_projector", "arctan form >= (pi/4)<phi,E(Delta_eps)phi>",
                                       w, 1e-10, seeds[at]));
    Eigen::MatrixXcd h(1, 1);
    h(0, 0) = 0.7;
    Eigen::VectorXcd phi = Eigen::VectorXcd::Ones(1);
    const ArctanCheck c = arctan_projector_check(eigensolve_matrix<std::complex<double>>(h, true), phi, 0.7, 0.1);
    out.checks.push_back(check_at_most("averaging.arctan_endpoint_equality", "equality with an eigenvalue at E0",
                                       std::abs(c.lhs - c.rhs), 1e-12));
  }

  // expectation bounds on a 1D Anderson model
  if (cfg.resolvent) {
    const ResolventSuiteConfig& rc = *cfg.resolvent;
    const BoxSpec box{1, rc.cells, 1};
    const RealOperator h0 = build_background<double>(box, BackgroundSpec{});
    const SingleSitePotential u = SingleSitePotential::cosine_bump(1, 1);
    Eigen::MatrixXd others(box.grid_points(), box.sites() - 1);
    Eigen::VectorXd uj;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(box.sites());
    for (Index k = 0, col = 0; k < box.sites(); ++k) {
      e.setZero();
      e(k) = 1.0;
      const Eigen::VectorXd prof = assemble_anderson(box, u, e);
      if (k == rc.site) {
        uj = prof;
      } else {
        others.col(col++) = prof;
      }
    }
    ResolventModel model{h0.matrix(), uj, rc.measure, others};
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(box.grid_points());
    phi(rc.site) = 1.0;
    for (std::size_t k = 0; k < rc.epsilons.size(); ++k) {
      const double eps = rc.epsilons[k];
      const std::uint64_t seed = derive_seed({cfg.seed, 5, k});
      const ResolventExpectation r =
          resolvent_expectation(model, phi, rc.energy_E0, eps, rc.n_realizations, seed, workers);
      const std::string tag = "@eps=" + fmt_g(eps);
      rows.push_back({-1, rc.cells, eps, "resolvent_integral_mean", r.integral_mean});
      rows.push_back({-1, rc.cells, eps, "resolvent_integral_stderr", r.integral_stderr});
      rows.push_back({-1, rc.cells, eps, "projector_mean", r.projector_mean});
      rows.push_back({-1, rc.cells, eps, "projector_stderr", r.projector_stderr});
      out.checks.push_back(check_at_most("averaging.expectation_2pi" + tag,
                                         "E{int Im <u phi,(H-E-i eps)^{-1} u phi>} <= 2 pi s(eps)||phi||^2",
                                         r.integral_mean, r.bound_2pi + 3.0 * r.integral_stderr, seed));
      out.checks.push_back(check_at_most("averaging.expectation_8s" + tag,
                                         "E{<u phi,E(Delta_eps) u phi>} <= 8 s(eps)||phi||^2", r.projector_mean,
                                         r.bound_8s + 3.0 * r.projector_stderr, seed));
      out.checks.push_back(check_at_most("averaging.quadrature" + tag, "adaptive quadrature relative error",
                                         r.max_quadrature_error, 1e-4, seed));
      out.checks.push_back(check_at_most("averaging.chain_identity" + tag, "8 = (4/pi) 2 pi",
                                         std::abs(r.bound_8s - 4.0 / std::numbers::pi * r.bound_2pi),
                                         1e-12 * std::max(1.0, r.bound_8s)));
    }
  }
  return out;
}

DecayStudy trace_decay_study(int dimension, int cells, int points_per_cell, double shift_M,
                             const std::vector<int>& separations) {
  const BoxSpec box{dimension, cells, points_per_cell};
  const auto sd = eigensolve(build_background<double>(box, BackgroundSpec{}), true);
  DecayStudy st;
  for (int r : separations) {
    const Index site_j = r;  // along the first axis
    st.separations.push_back(site_distance(box, 0, site_j));
    st.norms.push_back(cutoff_trace_norm(sd, shift_M, cutoff_pair(box, 0, site_j)));
  }
  st.fit = decay_fit(st.separations, st.norms);
  return st;
}

DecayStudy smooth_kernel_study(int cells, BumpSpec::Kind kind, int order, const std::vector<int>& separations) {
  const BoxSpec box{1, cells, 1};
  const auto sd = eigensolve(build_background<double>(box, BackgroundSpec{}), true);
  const double lo = sd.eigenvalues(0);
  const double hi = sd.eigenvalues(sd.dim() - 1);
  // centred on the bottom edge, covering the lower half of the spectrum
  const BumpSpec bump{lo, 0.5 * (hi - lo), kind, order};
  DecayStudy st;
  for (int r : separations) {
    st.separations.push_back(site_distance(box, 0, r));
    st.norms.push_back(smooth_kernel_norm<double>(sd, bump, cutoff_pair(box, 0, r)));
  }
  st.fit = loglog_fit(st.separations, st.norms);
  return st;
}

double ucp_bottom_band(int cells, int points_per_cell, const PotentialSpec& u) {
  const BoxSpec box{1, cells, points_per_cell};
  const auto sd = eigensolve(build_background<double>(box, BackgroundSpec{}), true);
  const double n = points_per_cell;
  const double e_top = n * n * (2.0 - 2.0 * std::cos(std::numbers::pi / n));
  const Eigen::VectorXd tilde = assemble_tilde(box, u.build(1, points_per_cell));
  return ucp_constant(sd, Interval{-0.5, 0.9 * e_top}, tilde);
}

SuiteOutput tracebounds_suite(const TraceSuiteConfig& cfg) {
  SuiteOutput out;
  auto& rows = out.table.rows;
  const int workers = resolve_workers(cfg.workers);

  // exponential decay of cutoff resolvent trace norms
  {
    const DecayStudy st = trace_decay_study(1, cfg.cells, 1, cfg.shift_M, cfg.separations);
    std::ostringstream csv;
    csv << "separation,trace_norm,fit_residual\n";
    for (std::size_t k = 0; k < st.norms.size(); ++k) {
      csv << fmt_full(st.separations[k]) << ',' << fmt_full(st.norms[k]) << ',' << fmt_full(st.fit.residuals[k]) << '\n';
      rows.push_back({static_cast<std::int64_t>(k), cfg.cells, 0.0, "cutoff_trace_norm", st.norms[k]});
    }
    out.extra_files.push_back({"decay.csv", csv.str()});
    out.table.summary.push_back({"decay_c0", st.fit.c0, 0.0, st.fit.r_squared});
    out.table.summary.push_back({"decay_C0", st.fit.C0, 0.0, st.fit.r_squared});
    const char* anchor = "||chi_i (H0+M)^{-2} chi_j||_1 <= C0 exp(-c0 |i-j|)";
    out.checks.push_back(check_at_least("tracebounds.decay_positive", anchor, st.fit.c0, 0.0));
    out.checks.push_back(check_at_least("tracebounds.decay_r_squared", anchor, st.fit.r_squared, 0.95));
    // lattice Green function: (H0 + M)^{-1}(x, y) ~ exp(-kappa |x - y|) with
    // cosh(kappa) = 1 + M/2; the squared resolvent decays at the same rate
    const double kappa = std::acosh(1.0 + 0.5 * cfg.shift_M);
    out.checks.push_back(check_at_most("tracebounds.decay_rate_oracle", anchor,
                                       std::abs(st.fit.c0 - kappa) / kappa, 0.15));
  }

  // polynomial decay of smooth spectral cutoffs
  {
    const DecayStudy st = smooth_kernel_study(cfg.cells, cfg.bump_kind, cfg.bump_order, cfg.kernel_separations);
    for (std::size_t k = 0; k < st.norms.size(); ++k) {
      rows.push_back({static_cast<std::int64_t>(k), cfg.cells, 0.0, "smooth_kernel_norm", st.norms[k]});
    }
    out.table.summary.push_back({"smooth_kernel_loglog_slope", -st.fit.c0, 0.0, st.fit.r_squared});
    out.checks.push_back(check_at_most("tracebounds.smooth_kernel_slope",
                                       "||chi_j f(H0) chi_k||_1 <= C_N(f)(1+|k-j|^2)^{-N}", -st.fit.c0, -2.0));
  }

  // K0 resolvent comparison
  if (cfg.k0_instances > 0) {
    const BoxSpec box{1, cfg.cells, 1};
    const auto sd = eigensolve(build_background<double>(box, BackgroundSpec{}), true);
    const IntervalPair ip = IntervalPair::make({1.0, 1.5}, {0.5, 2.0}, cfg.shift_M, sd.eigenvalues(0));
    const int n = cfg.k0_instances;
    std::vector<double> excess(n);
    std::vector<std::uint64_t> seeds(n);
    parallel_for(n, workers, [&](std::size_t i) {
      seeds[i] = derive_seed({cfg.seed, 11, i});
      CounterStream s(seeds[i]);
      const Eigen::VectorXd psi = random_unit_vector(sd.dim(), s).real();
      const double em = ip.delta.lo + ip.delta.width() * s.uniform01();
      const K0Comparison c = k0_comparison(sd, ip, em, psi);
      excess[i] = c.lhs - c.rhs;
    });
    const auto [w, at] = worst(excess);
    out.checks.push_back(check_at_most("tracebounds.k0_comparison",
                                       "<psi,E0(complement)(H0-E_m)^{-2}psi> <= K0 <psi,(H0+M)^{-2}psi>", w, 1e-10,
                                       seeds[at]));
  }

  // iterated trace inequality
  if (cfg.trace_instances > 0) {
    const int n = cfg.trace_instances;
    std::vector<double> excess(n);
    std::vector<std::uint64_t> seeds(n);
    parallel_for(n, workers, [&](std::size_t i) {
      seeds[i] = derive_seed({cfg.seed, 12, i});
      CounterStream s(seeds[i]);
      const Eigen::MatrixXcd p = random_projector(cfg.trace_dimension, cfg.trace_rank, s);
      const Eigen::MatrixXcd k = random_hermitian(cfg.trace_dimension, 1.0 + 4.0 * s.uniform01(), s);
      const int m = 1 + static_cast<int>(i % 3);
      std::vector<double> sig(m);
      for (double& x : sig) x = std::pow(10.0, -1.0 + 2.0 * s.uniform01());
      const TraceInequality a = iterated_trace_inequality(p, k, m, sig);
      const TraceInequality b = iterated_trace_inequality(p, k, m, canonical_sigmas(1.0 + 9.0 * s.uniform01(), m));
      excess[i] = std::max(a.lhs - a.rhs, b.lhs - b.rhs);
    });
    const auto [w, at] = worst(excess);
    out.checks.push_back(check_at_most("tracebounds.iterated_trace",
                                       "|Tr P K| <= sum_j sigma_j/(2^j sigma_1..sigma_{j-1}) Tr P + Tr P K^{2^m}/(2^m "
                                       "sigma_1..sigma_m)",
                                       w, 1e-10, seeds[at]));
  }

  // volume linearity of ||K~^{2^m}||_1
  if (cfg.volume_sizes.size() >= 2) {
    std::vector<double> vol, tn, err;
    for (int L : cfg.volume_sizes) {
      const BoxSpec box{1, L, cfg.volume_points_per_cell};
      const auto sd = eigensolve(build_background<double>(box, BackgroundSpec{}), true);
      const SingleSitePotential u = SingleSitePotential::cosine_bump(1, cfg.volume_points_per_cell, cfg.volume_bump_radius);
      const double t = power_trace_norm(ktilde_operator(box, u, sd, cfg.shift_M), cfg.volume_m);
      vol.push_back(box.volume());
      tn.push_back(t);
      err.push_back(0.0);
      rows.push_back({0, L, 0.0, "ktilde_power_trace_norm", t});
    }
    const PowerLawFit f = powerlaw_fit_points(vol, tn, err);
    out.table.summary.push_back({"ktilde_volume_exponent", f.exponent, f.stderr_, f.r_squared});
    out.checks.push_back(check_at_most("tracebounds.ktilde_volume_linear", "||K~^{2^m}||_1 <= C(u,m,d)|Lambda|",
                                       std::abs(f.exponent - 1.0), 0.2));
  }

  // unique continuation constant on the bottom band
  if (!cfg.ucp_sizes.empty()) {
    std::vector<double> cs;
    for (int L : cfg.ucp_sizes) {
      cs.push_back(ucp_bottom_band(L, cfg.ucp_points_per_cell, PotentialSpec{}));
      rows.push_back({0, L, 0.0, "ucp_constant", cs.back()});
    }
    const double lo = *std::min_element(cs.begin(), cs.end());
    const double hi = *std::max_element(cs.begin(), cs.end());
    out.table.summary.push_back({"ucp_constant_min", lo, 0.0, 1.0});
    const char* anchor = "E0(I) V~ E0(I) >= C(I,u) E0(I)";
    out.checks.push_back(check_at_least("tracebounds.ucp_positive", anchor, lo, 1e-12));
    out.checks.push_back(check_at_most("tracebounds.ucp_stability", anchor, lo > 0.0 ? hi / lo : 1e300, 2.0));
  }
  return out;
}

}  // namespace wegnerlab
