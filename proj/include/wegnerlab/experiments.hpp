#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wegnerlab/measures.hpp"
#include "wegnerlab/operators.hpp"

namespace wegnerlab {

struct PotentialSpec {
  enum class Kind { CosineBump, Box };
  Kind kind = Kind::CosineBump;
  double radius = 0.4;
  double height = 1.0;

  SingleSitePotential build(int dimension, int points_per_cell) const;
};

/// Rational flux p/q (in units of 2 pi) through every grid plaquette.
struct FluxSpec {
  long p = 1;
  long q = 16;
};

struct ModelSpec {
  int dimension = 1;
  std::vector<int> box_sizes{32};
  int points_per_cell = 1;
  PotentialSpec u;
  Eigen::VectorXd v0;
  double kinetic_scale = 1.0;
  std::optional<FluxSpec> flux;
  int landau_index = 0;
  Index dense_cap = 4096;

  BoxSpec box(int L) const { return BoxSpec{dimension, L, points_per_cell, dense_cap}; }
};

struct Expectation {
  double value;
  double tolerance;
};

/// Optional assertions a run is checked against.
struct ExpectSpec {
  std::optional<Expectation> volume_exponent;
  std::optional<Expectation> epsilon_exponent;
  bool plateau = false;
};

struct ExperimentConfig {
  ModelSpec model;
  MeasureSpec measure = MeasureSpec::uniform(0.0, 1.0);
  std::optional<double> energy_E0;
  std::vector<double> epsilons{0.05};
  std::vector<double> energy_grid;
  int n_realizations = 8;
  std::uint64_t master_seed = 0;
  int workers = 1;
  ExpectSpec expect;

  /// Rejects epsilons outside (0, 1], fewer than 8 realizations, empty box
  /// lists and inconsistent model settings.
  void validate() const;
};

struct ResultRow {
  std::int64_t realization;
  int L;
  double epsilon;
  std::string statistic;
  double value;
};

struct FitSummary {
  std::string name;
  double estimate;
  double stderr_;
  double r_squared;
};

/// Per-(L, epsilon) aggregates of the Wegner statistic.
struct WegnerCell {
  int L;
  double volume;
  double epsilon;
  double mean;
  double stderr_;
  double prob_near;  // fraction of realizations with dist(sigma(H), E0) < eps
  double s_2eps;     // modulus of the single-site law at 2 eps (plus error bound)
  double cw_ratio;   // mean / (|Lambda| s(2 eps))
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::vector<FitSummary> summary;
  std::vector<WegnerCell> cells;
  double energy_E0 = 0.0;

  /// Rows sorted by (statistic, L, epsilon, realization).
  void canonical_sort();
  void write_csv(std::ostream& out) const;
  const FitSummary* find_fit(const std::string& name) const;
};

/// Coupling field for one realization: one value per site, drawn from a
/// stream derived from (master seed, L, realization, site). Toeplitz laws
/// draw base variables and convolve them periodically.
Eigen::VectorXd draw_couplings(const BoxSpec& box, const MeasureSpec& measure, std::uint64_t master_seed,
                               std::int64_t realization);

/// Background operator of the model for box size L (real when B = 0).
RealOperator model_background(const ModelSpec& model, int L);
ComplexOperator model_background_magnetic(const ModelSpec& model, int L);

/// Default energy: middle of the spectrum of H0 shifted by the mean
/// potential (m0 + M0)/2 * mean(V~).
double default_energy(const ExperimentConfig& cfg);

/// Wegner statistic Tr E([E0 - eps, E0 + eps]) per (L, eps, realization).
ResultTable run_wegner(const ExperimentConfig& cfg);

/// N_hat(E) = N_Lambda(E) / |Lambda| per realization on the energy grid
/// ("ids@E=..." rows, epsilon 0) and increments N_hat(E + eps) - N_hat(E)
/// ("ids_increment@E=..." rows).
ResultTable run_ids(const ExperimentConfig& cfg, const std::vector<double>& energy_grid);

struct PowerLawFit {
  double exponent;
  double stderr_;
  double r_squared;
  double prefactor;
};

enum class FitAxis { Volume, Epsilon };

/// Weighted least squares of log(mean statistic) against log(axis), weights
/// from the Monte Carlo standard errors of the means (equal weights when all
/// vanish). Rows are restricted to those matching `fixed_L` (epsilon axis) or
/// `fixed_epsilon` (volume axis) when given.
PowerLawFit powerlaw_fit(const ResultTable& table, FitAxis axis, const std::string& statistic,
                         std::optional<int> fixed_L = std::nullopt,
                         std::optional<double> fixed_epsilon = std::nullopt, int dimension = 1);

/// Weighted log-log fit on raw (x, mean, stderr) triples; needs >= 2 points.
PowerLawFit powerlaw_fit_points(const std::vector<double>& x, const std::vector<double>& y,
                                const std::vector<double>& y_err);

struct LandauBand {
  int L;
  long flux_quanta;
  Index degeneracy;   // number of eigenvalues in the band cluster
  double center;
  double width;
  double gap_below;   // distance to the previous eigenvalue (inf for band 0)
  double gap_above;
};

/// Bands of the unperturbed Landau operator: band n consists of eigenvalues
/// n*D ... (n+1)*D - 1 with D the flux count.
LandauBand landau_band(const ModelSpec& model, int L, int band_index);

struct LandauResult {
  ResultTable table;
  std::vector<LandauBand> bands;
  std::vector<Index> unperturbed_traces;  // Tr E0([E0 - w, E0 + w]) per L
};

/// Landau-level Wegner statistic at the centre of band `landau_index`.
LandauResult run_landau(const ExperimentConfig& cfg);

}  // namespace wegnerlab
