#include "wegnerlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>
#include <tuple>

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

std::pair<double, double> mean_stderr(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  if (x.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

SingleSitePotential PotentialSpec::build(int dimension, int points_per_cell) const {
  return kind == Kind::CosineBump ? SingleSitePotential::cosine_bump(dimension, points_per_cell, radius, height)
                                  : SingleSitePotential::box(dimension, points_per_cell, radius, height);
}

void ExperimentConfig::validate() const {
  require(model.dimension == 1 || model.dimension == 2, ErrorCode::InvalidArgument, "dimension must be 1 or 2");
  require(!model.box_sizes.empty(), ErrorCode::InvalidArgument, "box_sizes must not be empty");
  for (int L : model.box_sizes) {
    require(L >= 1, ErrorCode::InvalidArgument, "box sizes must be positive");
    model.box(L).validate();
  }
  require(model.points_per_cell >= 1, ErrorCode::InvalidArgument, "points_per_cell must be positive");
  require(!epsilons.empty(), ErrorCode::InvalidArgument, "epsilons must not be empty");
  for (double e : epsilons) {
    require(e > 0.0 && e <= 1.0, ErrorCode::InvalidArgument,
            "epsilon " + fmt_g(e) + " is outside the admissible window range (0, 1]");
  }
  require(n_realizations >= 8, ErrorCode::InvalidArgument, "n_realizations must be at least 8");
  require(model.kinetic_scale > 0.0, ErrorCode::InvalidArgument, "kinetic_scale must be positive");
  if (model.flux) {
    require(model.dimension == 2, ErrorCode::DimensionMismatch, "a magnetic flux needs dimension 2");
    require(model.flux->q >= 1, ErrorCode::InvalidArgument, "flux denominator must be positive");
  }
  require(model.landau_index >= 0, ErrorCode::InvalidArgument, "landau_index must be nonnegative");
}

void ResultTable::canonical_sort() {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.statistic, a.L, a.epsilon, a.realization) < std::tie(b.statistic, b.L, b.epsilon, b.realization);
  });
}

void ResultTable::write_csv(std::ostream& out) const {
  out << "realization,L,epsilon,statistic,value\n";
  for (const auto& r : rows) {
    out << r.realization << ',' << r.L << ',' << fmt_full(r.epsilon) << ',' << r.statistic << ','
        << fmt_full(r.value) << '\n';
  }
}

const FitSummary* ResultTable::find_fit(const std::string& name) const {
  for (const auto& f : summary) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

Eigen::VectorXd draw_couplings(const BoxSpec& box, const MeasureSpec& measure, std::uint64_t master_seed,
                               std::int64_t realization) {
  const Index ns = box.sites();
  const auto L = static_cast<std::uint64_t>(box.cells_per_side);
  const auto r = static_cast<std::uint64_t>(realization);
  if (const auto* t = std::get_if<ToeplitzCorrelated>(&measure.variant())) {
    Eigen::VectorXd omega(ns);
    for (Index s = 0; s < ns; ++s) {
      CounterStream st(derive_seed({master_seed, L, r, static_cast<std::uint64_t>(s)}));
      omega(s) = sample(*t->base, st);
    }
    const Index side = box.cells_per_side;
    auto wrap = [side](Index i) { return ((i % side) + side) % side; };
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(ns);
    for (Index s = 0; s < ns; ++s) {
      const Index sx = box.dimension == 1 ? s : s % side;
      const Index sy = box.dimension == 1 ? 0 : s / side;
      for (const auto& g : t->coeffs) {
        const Index ox = wrap(sx - g.offset[0]);
        const Index oy = box.dimension == 1 ? 0 : wrap(sy - g.offset[1]);
        eta(s) += g.alpha * omega(ox + side * oy);
      }
    }
    return eta;
  }
  Eigen::VectorXd omega(ns);
  for (Index s = 0; s < ns; ++s) {
    CounterStream st(derive_seed({master_seed, L, r, static_cast<std::uint64_t>(s)}));
    omega(s) = sample(measure, st);
  }
  return omega;
}

RealOperator model_background(const ModelSpec& model, int L) {
  BackgroundSpec bg;
  bg.v0 = model.v0;
  bg.kinetic_scale = model.kinetic_scale;
  return build_background<double>(model.box(L), bg);
}

ComplexOperator model_background_magnetic(const ModelSpec& model, int L) {
  BackgroundSpec bg;
  bg.v0 = model.v0;
  bg.kinetic_scale = model.kinetic_scale;
  if (model.flux) {
    const double h = 1.0 / model.points_per_cell;
    bg.field_B = 2.0 * std::numbers::pi * static_cast<double>(model.flux->p) /
                 (static_cast<double>(model.flux->q) * h * h);
  }
  return build_background<std::complex<double>>(model.box(L), bg);
}

double default_energy(const ExperimentConfig& cfg) {
  const int L = cfg.model.box_sizes.front();
  const BoxSpec box = cfg.model.box(L);
  double lo, hi;
  if (cfg.model.flux) {
    const auto sd = eigensolve(model_background_magnetic(cfg.model, L), false);
    lo = sd.eigenvalues(0);
    hi = sd.eigenvalues(sd.dim() - 1);
  } else {
    const auto sd = eigensolve(model_background(cfg.model, L), false);
    lo = sd.eigenvalues(0);
    hi = sd.eigenvalues(sd.dim() - 1);
  }
  const Eigen::VectorXd tilde = assemble_tilde(box, cfg.model.u.build(cfg.model.dimension, cfg.model.points_per_cell));
  const Interval supp = cfg.measure.support();
  return 0.5 * (lo + hi) + 0.5 * (supp.lo + supp.hi) * tilde.mean();
}

namespace {

template <typename Scalar>
LatticeOperator<Scalar> background_for(const ModelSpec& model, int L) {
  if constexpr (is_complex_v<Scalar>) {
    return model_background_magnetic(model, L);
  } else {
    return model_background(model, L);
  }
}

// Eigenvalues of H0 + V_omega for every realization of box size L.
template <typename Scalar>
std::vector<Eigen::VectorXd> realization_spectra(const ExperimentConfig& cfg, int L) {
  const BoxSpec box = cfg.model.box(L);
  const LatticeOperator<Scalar> h0 = background_for<Scalar>(cfg.model, L);
  const SingleSitePotential u = cfg.model.u.build(cfg.model.dimension, cfg.model.points_per_cell);
  std::vector<Eigen::VectorXd> out(cfg.n_realizations);
  parallel_for(static_cast<std::size_t>(cfg.n_realizations), resolve_workers(cfg.workers), [&](std::size_t r) {
    try {
      const Eigen::VectorXd omega = draw_couplings(box, cfg.measure, cfg.master_seed, static_cast<std::int64_t>(r));
      const Eigen::VectorXd v = assemble_anderson(box, u, omega);
      out[r] = eigensolve(h0.plus_diagonal(v, "V"), false).eigenvalues;
    } catch (const Error& e) {
      throw Error(e.code(), "realization " + std::to_string(r) + " (L=" + std::to_string(L) + "): " + e.what());
    }
  });
  return out;
}

template <typename Scalar>
ResultTable wegner_impl(const ExperimentConfig& cfg, double e0) {
  ResultTable table;
  table.energy_E0 = e0;
  for (int L : cfg.model.box_sizes) {
    const auto spectra = realization_spectra<Scalar>(cfg, L);
    const double volume = cfg.model.box(L).volume();
    for (double eps : cfg.epsilons) {
      std::vector<double> traces(spectra.size());
      double near = 0.0;
      for (std::size_t r = 0; r < spectra.size(); ++r) {
        SpectralData<Scalar> sd{spectra[r], std::nullopt};
        traces[r] = static_cast<double>(interval_trace(sd, Interval{e0 - eps, e0 + eps}));
        const double dist = (spectra[r].array() - e0).abs().minCoeff();
        if (dist < eps) near += 1.0;
        table.rows.push_back({static_cast<std::int64_t>(r), L, eps, "trace", traces[r]});
      }
      const auto [m, se] = mean_stderr(traces);
      const ModulusValue s = modulus_s(cfg.measure, 2.0 * eps);
      const double s2 = std::min(1.0, s.value + s.error_bound);
      table.cells.push_back({L, volume, eps, m, se, near / static_cast<double>(spectra.size()), s2,
                             s2 > 0.0 ? m / (volume * s2) : std::numeric_limits<double>::infinity()});
    }
  }
  table.canonical_sort();

  const int d = cfg.model.dimension;
  if (cfg.model.box_sizes.size() >= 2) {
    for (double eps : cfg.epsilons) {
      try {
        const PowerLawFit f = powerlaw_fit(table, FitAxis::Volume, "trace", std::nullopt, eps, d);
        table.summary.push_back({"volume_exponent@eps=" + fmt_g(eps), f.exponent, f.stderr_, f.r_squared});
      } catch (const Error&) {
        // zero means (e.g. E0 in a gap) leave the fit undefined
      }
    }
  }
  if (cfg.epsilons.size() >= 2) {
    for (int L : cfg.model.box_sizes) {
      try {
        const PowerLawFit f = powerlaw_fit(table, FitAxis::Epsilon, "trace", L, std::nullopt, d);
        table.summary.push_back({"epsilon_exponent@L=" + std::to_string(L), f.exponent, f.stderr_, f.r_squared});
      } catch (const Error&) {
      }
    }
  }
  double cw_max = 0.0;
  for (const auto& c : table.cells) cw_max = std::max(cw_max, c.cw_ratio);
  table.summary.push_back({"cw_ratio_max", cw_max, 0.0, 1.0});
  return table;
}

}  // namespace

ResultTable run_wegner(const ExperimentConfig& cfg) {
  cfg.validate();
  const double e0 = cfg.energy_E0 ? *cfg.energy_E0 : default_energy(cfg);
  return cfg.model.flux ? wegner_impl<std::complex<double>>(cfg, e0) : wegner_impl<double>(cfg, e0);
}

ResultTable run_ids(const ExperimentConfig& cfg, const std::vector<double>& energy_grid) {
  cfg.validate();
  require(!energy_grid.empty(), ErrorCode::InvalidArgument, "energy_grid must not be empty");
  ResultTable table;
  for (int L : cfg.model.box_sizes) {
    const auto spectra = cfg.model.flux ? realization_spectra<std::complex<double>>(cfg, L)
                                        : realization_spectra<double>(cfg, L);
    const double volume = cfg.model.box(L).volume();
    double lip_max = 0.0;
    for (double e : energy_grid) {
      const std::string tag = "@E=" + fmt_g(e);
      for (std::size_t r = 0; r < spectra.size(); ++r) {
        SpectralData<double> sd{spectra[r], std::nullopt};
        table.rows.push_back(
            {static_cast<std::int64_t>(r), L, 0.0, "ids" + tag, static_cast<double>(counting_function(sd, e)) / volume});
      }
      for (double eps : cfg.epsilons) {
        std::vector<double> inc(spectra.size());
        for (std::size_t r = 0; r < spectra.size(); ++r) {
          SpectralData<double> sd{spectra[r], std::nullopt};
          inc[r] = static_cast<double>(counting_function(sd, e + eps) - counting_function(sd, e)) / volume;
          table.rows.push_back({static_cast<std::int64_t>(r), L, eps, "ids_increment" + tag, inc[r]});
        }
        lip_max = std::max(lip_max, mean_stderr(inc).first / eps);
      }
    }
    table.summary.push_back({"ids_lipschitz_ratio_max@L=" + std::to_string(L), lip_max, 0.0, 1.0});
  }
  table.canonical_sort();
  return table;
}

PowerLawFit powerlaw_fit_points(const std::vector<double>& x, const std::vector<double>& y,
                                const std::vector<double>& y_err) {
  const std::size_t n = x.size();
  require(y.size() == n && y_err.size() == n, ErrorCode::DimensionMismatch, "fit inputs differ in length");
  require(n >= 2, ErrorCode::DegenerateFit, "need at least two points");
  std::vector<double> lx(n), ly(n), sig(n);
  double min_pos = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    require(x[k] > 0.0 && y[k] > 0.0 && std::isfinite(x[k]) && std::isfinite(y[k]), ErrorCode::NonPositiveData,
            "power-law fit needs positive data");
    lx[k] = std::log(x[k]);
    ly[k] = std::log(y[k]);
    sig[k] = std::max(0.0, y_err[k]) / y[k];
    if (sig[k] > 0.0) min_pos = std::min(min_pos, sig[k]);
  }
  const bool weighted = std::isfinite(min_pos);
  std::vector<double> w(n, 1.0);
  if (weighted) {
    for (std::size_t k = 0; k < n; ++k) w[k] = 1.0 / std::pow(sig[k] > 0.0 ? sig[k] : min_pos, 2);
  }
  double sw = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sw += w[k];
    mx += w[k] * lx[k];
    my += w[k] * ly[k];
  }
  mx /= sw;
  my /= sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += w[k] * (lx[k] - mx) * (lx[k] - mx);
    sxy += w[k] * (lx[k] - mx) * (ly[k] - my);
    syy += w[k] * (ly[k] - my) * (ly[k] - my);
  }
  require(sxx > 0.0, ErrorCode::DegenerateFit, "all abscissae are equal");
  PowerLawFit f;
  f.exponent = sxy / sxx;
  f.prefactor = std::exp(my - f.exponent * mx);
  double ssr = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double res = ly[k] - (my + f.exponent * (lx[k] - mx));
    ssr += w[k] * res * res;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  if (weighted) {
    f.stderr_ = std::sqrt(1.0 / sxx);
  } else {
    f.stderr_ = n > 2 ? std::sqrt(ssr / static_cast<double>(n - 2) / sxx) : 0.0;
  }
  return f;
}

PowerLawFit powerlaw_fit(const ResultTable& table, FitAxis axis, const std::string& statistic,
                         std::optional<int> fixed_L, std::optional<double> fixed_epsilon, int dimension) {
  std::map<double, std::vector<double>> groups;
  for (const auto& r : table.rows) {
    if (r.statistic != statistic) continue;
    if (fixed_L && r.L != *fixed_L) continue;
    if (fixed_epsilon && r.epsilon != *fixed_epsilon) continue;
    const double key = axis == FitAxis::Volume ? std::pow(static_cast<double>(r.L), dimension) : r.epsilon;
    groups[key].push_back(r.value);
  }
  std::vector<double> x, y, e;
  for (const auto& [key, vals] : groups) {
    const auto [m, se] = mean_stderr(vals);
    x.push_back(key);
    y.push_back(m);
    e.push_back(se);
  }
  return powerlaw_fit_points(x, y, e);
}

LandauBand landau_band(const ModelSpec& model, int L, int band_index) {
  require(model.flux.has_value(), ErrorCode::InvalidArgument, "Landau runs need a flux");
  require(model.dimension == 2, ErrorCode::DimensionMismatch, "Landau runs need dimension 2");
  require(model.flux->p == 1, ErrorCode::InvalidArgument, "Landau bands need flux 1/q per plaquette");
  const BoxSpec box = model.box(L);
  const long side = static_cast<long>(box.points_per_side());
  const long area = side * side;
  require(area % model.flux->q == 0, ErrorCode::NoAdmissibleFlux,
          "flux 1/" + std::to_string(model.flux->q) + " per plaquette is not quantized on a " +
              std::to_string(side) + "^2 grid");
  const long quanta = area / model.flux->q;
  const auto sd = eigensolve(model_background_magnetic(model, L), false);
  const Index first = static_cast<Index>(quanta) * band_index;
  const Index last = first + quanta;  // exclusive
  require(last <= sd.dim(), ErrorCode::InvalidArgument, "landau_index beyond the spectrum");
  const auto ev = sd.eigenvalues.segment(first, quanta);
  LandauBand b;
  b.L = L;
  b.flux_quanta = quanta;
  b.center = 0.5 * (ev(0) + ev(quanta - 1));
  b.width = ev(quanta - 1) - ev(0);
  b.gap_below = first > 0 ? ev(0) - sd.eigenvalues(first - 1) : std::numeric_limits<double>::infinity();
  b.gap_above = last < sd.dim() ? sd.eigenvalues(last) - ev(quanta - 1) : std::numeric_limits<double>::infinity();
  const double w = 0.5 * b.width + 0.25 * std::min(b.gap_below, b.gap_above);
  b.degeneracy = interval_trace(sd, Interval{b.center - w, b.center + w});
  return b;
}

LandauResult run_landau(const ExperimentConfig& cfg) {
  cfg.validate();
  require(cfg.model.flux.has_value(), ErrorCode::InvalidArgument, "Landau runs need model.flux_per_plaquette");
  LandauResult out;
  for (int L : cfg.model.box_sizes) {
    const BoxSpec box = cfg.model.box(L);
    const long side = static_cast<long>(box.points_per_side());
    require((side * side) % cfg.model.flux->q == 0, ErrorCode::NoAdmissibleFlux,
            "no quantized flux for L=" + std::to_string(L) + " at 1/" + std::to_string(cfg.model.flux->q) +
                " per plaquette");
  }
  for (int L : cfg.model.box_sizes) {
    out.bands.push_back(landau_band(cfg.model, L, cfg.model.landau_index));
    out.unperturbed_traces.push_back(out.bands.back().degeneracy);
  }
  const double e0 = cfg.energy_E0 ? *cfg.energy_E0 : out.bands.front().center;
  out.table = wegner_impl<std::complex<double>>(cfg, e0);
  return out;
}

}  // namespace wegnerlab
