#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wegnerlab/experiments.hpp"
#include "wegnerlab/measures.hpp"
#include "wegnerlab/tracebounds.hpp"

namespace wegnerlab {

/// One numerical inequality. `margin` is the distance to the boundary on the
/// passing side (negative when violated).
struct Check {
  std::string name;
  std::string anchor;
  double measured;
  double bound;
  double margin;
  bool passed;
  std::optional<std::uint64_t> instance_seed;
};

/// measured <= bound.
Check check_at_most(std::string name, std::string anchor, double measured, double bound,
                    std::optional<std::uint64_t> seed = std::nullopt);
/// measured >= bound.
Check check_at_least(std::string name, std::string anchor, double measured, double bound,
                     std::optional<std::uint64_t> seed = std::nullopt);

struct ExtraFile {
  std::string filename;
  std::string contents;
};

struct SuiteOutput {
  ResultTable table;
  std::vector<Check> checks;
  std::vector<ExtraFile> extra_files;

  bool all_passed() const;
  void append(SuiteOutput other);
};

struct ResolventSuiteConfig {
  int cells = 64;
  int site = 32;
  MeasureSpec measure = MeasureSpec::uniform(0.0, 1.0);
  double energy_E0 = 2.0;
  std::vector<double> epsilons{0.02, 0.05, 0.1};
  int n_realizations = 500;
};

struct AveragingSuiteConfig {
  std::uint64_t seed = 1;
  int instances = 1000;
  int dimension = 16;
  double b_min = 0.01;
  int y_grid = 64;
  int singular_instances = 100;
  std::vector<double> lambdas{0.25, 0.5, 1.0};
  int dissipative_instances = 1000;
  int arctan_instances = 1000;
  int arctan_dimension = 32;
  std::vector<double> ell_bs{0.1, 0.5, 1.0, 2.0, 10.0};
  std::optional<ResolventSuiteConfig> resolvent = ResolventSuiteConfig{};
  int workers = 1;
};

struct TraceSuiteConfig {
  std::uint64_t seed = 1;
  int cells = 64;
  double shift_M = 1.0;
  std::vector<int> separations{2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24};
  std::vector<int> kernel_separations{4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24};
  BumpSpec::Kind bump_kind = BumpSpec::Kind::Exponential;
  int bump_order = 2;
  int k0_instances = 1000;
  int trace_instances = 500;
  int trace_dimension = 32;
  int trace_rank = 8;
  std::vector<int> volume_sizes{8, 12, 16};
  int volume_points_per_cell = 4;
  double volume_bump_radius = 0.8;
  int volume_m = 1;
  std::vector<int> ucp_sizes{8, 16, 32};
  int ucp_points_per_cell = 4;
  int workers = 1;
};

SuiteOutput wegner_suite(const ExperimentConfig& cfg);
SuiteOutput ids_suite(const ExperimentConfig& cfg);
SuiteOutput landau_suite(const ExperimentConfig& cfg);
SuiteOutput averaging_suite(const AveragingSuiteConfig& cfg);
SuiteOutput tracebounds_suite(const TraceSuiteConfig& cfg);

/// Decay of ||chi_0 (H0 + M)^{-2} chi_r||_1 for the 1D free Laplacian on
/// `cells` sites, with the exponential fit.
struct DecayStudy {
  std::vector<double> separations;
  std::vector<double> norms;
  DecayFit fit;
};
DecayStudy trace_decay_study(int dimension, int cells, int points_per_cell, double shift_M,
                             const std::vector<int>& separations);

/// Log-log decay of ||chi_0 f(H0) chi_r||_1 for a bump over the lower half of
/// the spectrum of the 1D free Laplacian.
DecayStudy smooth_kernel_study(int cells, BumpSpec::Kind kind, int order, const std::vector<int>& separations);

/// Smallest eigenvalue of E0(bottom band) V~ E0(bottom band) for the 1D
/// free Laplacian with n points per cell, where the bottom band is the
/// first Brillouin-zone band of the unit-cell lattice.
double ucp_bottom_band(int cells, int points_per_cell, const PotentialSpec& u);

}  // namespace wegnerlab
