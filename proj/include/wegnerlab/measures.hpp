#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wegnerlab/random.hpp"

namespace wegnerlab {

class MeasureSpec;

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  double width() const noexcept { return hi - lo; }
};

struct UniformDensity {
  double lo;
  double hi;
};

/// Continuous piecewise-linear density through the knots (point, density);
/// zero outside the first and last knot.
struct PiecewiseLinearDensity {
  std::vector<std::pair<double, double>> knots;
};

/// Middle-thirds Cantor measure on [0, 1]. `depth` is the ternary resolution
/// used when sampling (samples lie in the Cantor set to within 3^-depth).
struct CantorMeasure {
  int depth;
};

struct Atomic {
  std::vector<std::pair<double, double>> atoms;  // (point, weight)
};

struct GammaCoefficient {
  std::array<int, 2> offset;  // lattice offset; second entry unused in 1D
  double alpha;
};

/// Correlated couplings eta_j = sum_k alpha_{j-k} omega_k with omega iid from
/// `base`. Valid only when sum_{k != 0} |alpha_k| < |alpha_0|.
struct ToeplitzCorrelated {
  std::shared_ptr<const MeasureSpec> base;
  std::vector<GammaCoefficient> coeffs;

  double alpha0() const;
};

/// Law of scale * X + shift for X distributed as `base`.
struct AffinePushforward {
  std::shared_ptr<const MeasureSpec> base;
  double scale;
  double shift;
};

/// A validated single-site probability law with bounded support.
class MeasureSpec {
 public:
  using Variant = std::variant<UniformDensity, PiecewiseLinearDensity, CantorMeasure, Atomic,
                               ToeplitzCorrelated, AffinePushforward>;

  static MeasureSpec uniform(double lo, double hi);
  static MeasureSpec piecewise_linear(std::vector<std::pair<double, double>> knots);
  static MeasureSpec cantor(int depth);
  static MeasureSpec atomic(std::vector<std::pair<double, double>> atoms);
  static MeasureSpec toeplitz(MeasureSpec base, std::vector<GammaCoefficient> coeffs);
  static MeasureSpec affine(MeasureSpec base, double scale, double shift);

  const Variant& variant() const noexcept { return v_; }
  std::string kind() const;

  /// Smallest closed interval [m0, M0] carrying all the mass.
  Interval support() const;

 private:
  explicit MeasureSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// One draw. For ToeplitzCorrelated this is a draw of the marginal eta_0.
double sample(const MeasureSpec& measure, CounterStream& stream);

struct ModulusValue {
  double value;
  double error_bound;
};

/// s(eps) = sup_E mu([E, E + eps]), with a guaranteed absolute error bound.
/// For ToeplitzCorrelated the conditional modulus is returned.
ModulusValue modulus_s(const MeasureSpec& measure, double epsilon);

struct ModulusCurve {
  std::vector<double> epsilons;
  std::vector<double> s_values;
  std::vector<double> error_bounds;
};

ModulusCurve modulus_curve(const MeasureSpec& measure, std::span<const double> epsilons);

/// Conditional law of eta_j given every omega_k with k != j: the pushforward of
/// the base law under w -> alpha_0 w + shift.
MeasureSpec effective_conditional_measure(const MeasureSpec& correlated, double shift = 0.0);

/// Cumulative distribution function P(X <= x). Not available for
/// ToeplitzCorrelated.
double cdf(const MeasureSpec& measure, double x);

/// Devil's staircase F(x) = mu_Cantor([0, x]).
double cantor_function(double x);

/// sup_x |F_n(x) - F(x)| for the empirical law of `samples`.
double kolmogorov_distance(std::vector<double> samples, const MeasureSpec& measure);

/// Largest mass an interval of length epsilon collects from an empirical law.
double empirical_window_sup(std::vector<double> samples, double epsilon);

}  // namespace wegnerlab
