#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <iosfwd>
#include <numbers>
#include <string>
#include <type_traits>

#include <Eigen/Dense>

#include "wegnerlab/errors.hpp"

namespace wegnerlab {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
inline constexpr bool is_complex_v = false;
template <typename T>
inline constexpr bool is_complex_v<std::complex<T>> = true;

/// Periodic box of L^d unit cells, each sampled by n^d grid points (h = 1/n).
/// Grid point (ix, iy) sits at ((ix + 1/2) h, (iy + 1/2) h); site j is the
/// cell [j, j + 1)^d. Flattened indices are x-fastest.
struct BoxSpec {
  int dimension = 1;
  int cells_per_side = 1;
  int points_per_cell = 1;
  Index dense_cap = 4096;

  Index points_per_side() const { return Index{cells_per_side} * points_per_cell; }
  Index grid_points() const { return dimension == 1 ? points_per_side() : points_per_side() * points_per_side(); }
  Index sites() const { return dimension == 1 ? Index{cells_per_side} : Index{cells_per_side} * cells_per_side; }
  double spacing() const { return 1.0 / points_per_cell; }
  /// |Lambda| in units of the unit cell.
  double volume() const { return std::pow(static_cast<double>(cells_per_side), dimension); }

  void validate() const;
};

/// Background operator parameters: cell-periodic potential samples v0 (n^d
/// values or empty for zero), magnetic field B, a prefactor on the kinetic
/// term, and the Landau-gauge origin in cells.
struct BackgroundSpec {
  Eigen::VectorXd v0;
  double field_B = 0.0;
  double kinetic_scale = 1.0;
  std::array<int, 2> gauge_origin{0, 0};
};

/// Finite Hermitian operator on the grid of a box.
template <typename Scalar>
class LatticeOperator {
 public:
  using scalar_type = Scalar;
  using Matrix = MatrixX<Scalar>;

  LatticeOperator(BoxSpec box, Matrix entries, std::string provenance)
      : box_(box), entries_(std::move(entries)), provenance_(std::move(provenance)) {}

  const BoxSpec& box() const noexcept { return box_; }
  const Matrix& matrix() const noexcept { return entries_; }
  const std::string& provenance() const noexcept { return provenance_; }
  Index dim() const noexcept { return entries_.rows(); }

  /// H + diag(v).
  LatticeOperator plus_diagonal(const Eigen::VectorXd& v, const std::string& tag) const {
    require(v.size() == dim(), ErrorCode::DimensionMismatch, "diagonal length does not match operator");
    Matrix m = entries_;
    m.diagonal() += v.template cast<Scalar>();
    return LatticeOperator(box_, std::move(m), provenance_ + "+" + tag);
  }

  /// max |H - H^dagger| relative to max |H|.
  double hermiticity_defect() const {
    const double scale = entries_.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() / scale;
  }

 private:
  BoxSpec box_;
  Matrix entries_;
  std::string provenance_;
};

using RealOperator = LatticeOperator<double>;
using ComplexOperator = LatticeOperator<std::complex<double>>;

/// Number of flux quanta B h^2 (Ln)^2 / 2pi through the box.
double flux_quanta(const BoxSpec& box, double field_B);

/// Field carrying `quanta` flux quanta through the box.
double field_for_flux(const BoxSpec& box, long quanta);

/// Periodic finite-difference -Laplacian (scaled by 1/h^2 and the kinetic
/// prefactor) with Landau-gauge Peierls phases when B != 0, plus diag(v0).
template <typename Scalar>
LatticeOperator<Scalar> build_background(const BoxSpec& box, const BackgroundSpec& spec) {
  box.validate();
  const bool magnetic = spec.field_B != 0.0;
  if (magnetic) {
    require(box.dimension == 2, ErrorCode::DimensionMismatch, "a magnetic field needs a 2D box");
    require(is_complex_v<Scalar>, ErrorCode::InvalidArgument, "a magnetic field needs a complex scalar type");
    const double q = flux_quanta(box, spec.field_B);
    require(std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, std::abs(q)), ErrorCode::FluxNotQuantized,
            "total flux " + std::to_string(q) + " is not an integer number of quanta");
  }
  const Index cell_points = box.dimension == 1 ? Index{box.points_per_cell}
                                               : Index{box.points_per_cell} * box.points_per_cell;
  require(spec.v0.size() == 0 || spec.v0.size() == cell_points, ErrorCode::DimensionMismatch,
          "v0 must hold one sample per grid point of a cell");
  require(spec.kinetic_scale > 0.0 && std::isfinite(spec.kinetic_scale), ErrorCode::InvalidArgument,
          "kinetic prefactor must be positive");

  const Index n = box.points_per_side();
  const Index dim = box.grid_points();
  const double h = box.spacing();
  const double hop = spec.kinetic_scale / (h * h);
  MatrixX<Scalar> m = MatrixX<Scalar>::Zero(dim, dim);

  auto v0_at = [&](Index ix, Index iy) -> double {
    if (spec.v0.size() == 0) return 0.0;
    const Index p = box.points_per_cell;
    return box.dimension == 1 ? spec.v0(ix % p) : spec.v0((ix % p) + p * (iy % p));
  };

  if (box.dimension == 1) {
    for (Index i = 0; i < n; ++i) {
      m(i, i) = Scalar(2.0 * hop + v0_at(i, 0));
      // accumulate so that n == 2 (both neighbours coincide) stays correct
      m((i + 1) % n, i) += Scalar(-hop);
      m(i, (i + 1) % n) += Scalar(-hop);
    }
    return LatticeOperator<Scalar>(box, std::move(m), "background");
  }

  // Landau gauge A = (-B (y - y0), 0): x-hops from row iy carry phase
  // -Phi (iy - iy0) with Phi = B h^2 per plaquette; the y-hop that wraps
  // from the top row back to row 0 carries Phi n (ix - ix0) so that every
  // plaquette of the torus encloses the same flux.
  const double phi = spec.field_B * h * h;
  const Index ix0 = Index{spec.gauge_origin[0]} * box.points_per_cell;
  const Index iy0 = Index{spec.gauge_origin[1]} * box.points_per_cell;
  auto idx = [n](Index ix, Index iy) { return ((ix % n + n) % n) + n * ((iy % n + n) % n); };
  auto link = [&](Index from, Index to, double theta) {
    Scalar value;
    if constexpr (is_complex_v<Scalar>) {
      value = -hop * std::polar(1.0, theta);
    } else {
      value = Scalar(-hop);
    }
    m(to, from) += value;
    if constexpr (is_complex_v<Scalar>) {
      m(from, to) += std::conj(value);
    } else {
      m(from, to) += value;
    }
  };
  for (Index iy = 0; iy < n; ++iy) {
    for (Index ix = 0; ix < n; ++ix) {
      const Index r = idx(ix, iy);
      m(r, r) += Scalar(4.0 * hop + v0_at(ix, iy));
      const double theta_x = magnetic ? -phi * static_cast<double>(iy - iy0) : 0.0;
      const double theta_y =
          (magnetic && iy == n - 1) ? phi * static_cast<double>(n) * static_cast<double>(ix - ix0) : 0.0;
      link(r, idx(ix + 1, iy), theta_x);
      link(r, idx(ix, iy + 1), theta_y);
    }
  }
  return LatticeOperator<Scalar>(box, std::move(m), magnetic ? "landau" : "background");
}

/// Nonnegative single-site profile u sampled on grid offsets relative to the
/// first grid point of its cell.
class SingleSitePotential {
 public:
  /// Truncated cosine bump (1 + cos(pi r / R)) / 2 * height, Euclidean r,
  /// measured from the cell centre.
  static SingleSitePotential cosine_bump(int dimension, int points_per_cell, double radius = 0.4,
                                         double height = 1.0);
  /// height on the closed sup-norm ball of `radius` cells around the cell
  /// centre; radius 0.5 is the indicator of the cell.
  static SingleSitePotential box(int dimension, int points_per_cell, double radius = 0.5, double height = 1.0);

  int dimension() const noexcept { return dimension_; }
  int points_per_cell() const noexcept { return points_per_cell_; }
  double support_radius() const noexcept { return radius_; }
  Index offset_min() const noexcept { return kmin_; }
  Index offset_max() const noexcept { return kmax_; }
  /// Profile on offsets [kmin, kmax]^d, x-fastest.
  const Eigen::ArrayXd& profile() const noexcept { return values_; }
  double sup_norm() const { return values_.size() ? values_.maxCoeff() : 0.0; }
  Index extent() const noexcept { return kmax_ - kmin_ + 1; }

 private:
  SingleSitePotential(int dimension, int points_per_cell, double radius, Index kmin, Index kmax,
                      Eigen::ArrayXd values);
  static SingleSitePotential make(int dimension, int points_per_cell, double radius, double height, bool euclid,
                                  bool cosine);

  int dimension_;
  int points_per_cell_;
  double radius_;
  Index kmin_, kmax_;
  Eigen::ArrayXd values_;
};

/// Diagonal of V = sum_j omega_j u(x - j), periodically wrapped. `couplings`
/// holds one value per site (x-fastest).
Eigen::VectorXd assemble_anderson(const BoxSpec& box, const SingleSitePotential& u,
                                  const Eigen::VectorXd& couplings);

/// Diagonal of sum_j u(x - j) (all couplings one).
Eigen::VectorXd assemble_tilde(const BoxSpec& box, const SingleSitePotential& u);

/// D0 = max diagonal entry, so that V~^2 <= D0 V~.
double d0_constant(const Eigen::VectorXd& tilde);

/// Rejects coupling fields outside [m0, M0].
void validate_couplings(const Eigen::VectorXd& couplings, double m0, double M0);

/// Raw dump of an operator: "WLOP", u32 version, u32 scalar kind (0 real, 1
/// complex), u64 rows, u64 cols, then column-major little-endian doubles
/// (real/imag interleaved for complex).
template <typename Scalar>
void write_dense_binary(std::ostream& out, const LatticeOperator<Scalar>& op);

}  // namespace wegnerlab
