#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "wegnerlab/operators.hpp"
#include "wegnerlab/spectra.hpp"

namespace wegnerlab {

/// Two diagonal cutoffs chi_i, chi_j (entries in [0, 1]) and the distance of
/// their centres in cells.
struct CutoffPair {
  Eigen::VectorXd chi_i;
  Eigen::VectorXd chi_j;
  double separation;
};

/// Indicator of the grid points within sup-distance `radius` cells of the
/// centre of `site`, periodically wrapped. radius 0.5 is the cell itself.
Eigen::VectorXd site_cutoff(const BoxSpec& box, Index site, double radius = 0.5);

/// Periodic Euclidean distance between the centres of two sites, in cells.
double site_distance(const BoxSpec& box, Index site_i, Index site_j);

CutoffPair cutoff_pair(const BoxSpec& box, Index site_i, Index site_j, double radius = 0.5);

/// Sum of singular values.
template <typename Derived>
double trace_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  using Plain = typename Derived::PlainObject;
  return Eigen::BDCSVD<Plain>(m.eval()).singularValues().sum();
}

/// ||chi_i (H0 + M)^{-2} chi_j||_1 via the SVD of the product restricted to
/// the supports of the cutoffs.
template <typename Scalar>
double cutoff_trace_norm(const SpectralData<Scalar>& sd0, double shift_M, const CutoffPair& pair) {
  require(sd0.dim() > 0, ErrorCode::InvalidArgument, "empty operator");
  require(sd0.eigenvalues(0) + shift_M >= 1e-6, ErrorCode::ShiftTooSmall, "H0 + M must be >= 1e-6");
  require(pair.chi_i.size() == sd0.dim() && pair.chi_j.size() == sd0.dim(), ErrorCode::DimensionMismatch,
          "cutoff length does not match operator");
  const auto& v = sd0.vectors();
  std::vector<Index> rows, cols;
  for (Index x = 0; x < sd0.dim(); ++x) {
    if (pair.chi_i(x) != 0.0) rows.push_back(x);
    if (pair.chi_j(x) != 0.0) cols.push_back(x);
  }
  if (rows.empty() || cols.empty()) return 0.0;
  const Eigen::VectorXd g = (sd0.eigenvalues.array() + shift_M).square().inverse().matrix();
  const MatrixX<Scalar> vr = v(rows, Eigen::all);
  const MatrixX<Scalar> vc = v(cols, Eigen::all);
  MatrixX<Scalar> block = vr * g.template cast<Scalar>().asDiagonal() * vc.adjoint();
  for (std::size_t a = 0; a < rows.size(); ++a) block.row(a) *= pair.chi_i(rows[a]);
  for (std::size_t b = 0; b < cols.size(); ++b) block.col(b) *= pair.chi_j(cols[b]);
  return trace_norm(block);
}

/// Least-squares fit log(norm) = log(C0) - c0 * separation.
struct DecayFit {
  double C0;
  double c0;
  double r_squared;
  bool decaying;  // c0 > 0
  std::vector<double> residuals;  // log-scale residual per point
};

DecayFit decay_fit(const std::vector<double>& separations, const std::vector<double>& norms);

/// Least-squares slope of log(norm) against log(separation).
DecayFit loglog_fit(const std::vector<double>& separations, const std::vector<double>& norms);

/// Compactly supported bump f(E) = g((E - center) / half_width) with
/// g(r) = (1 - r^2)^(order + 1) (C^order) or exp(1 - 1/(1 - r^2)) (C^infinity)
/// for |r| < 1, zero outside. Both peak at 1.
struct BumpSpec {
  enum class Kind { Polynomial, Exponential };
  double center = 0.0;
  double half_width = 1.0;
  Kind kind = Kind::Polynomial;
  int order = 2;

  double operator()(double e) const;
};

/// ||chi_j f(H0) chi_k||_1 with f(H0) formed spectrally.
template <typename Scalar>
double smooth_kernel_norm(const SpectralData<Scalar>& sd0, const std::function<double(double)>& f,
                          const CutoffPair& pair) {
  require(pair.chi_i.size() == sd0.dim() && pair.chi_j.size() == sd0.dim(), ErrorCode::DimensionMismatch,
          "cutoff length does not match operator");
  const auto& v = sd0.vectors();
  std::vector<Index> rows, cols;
  for (Index x = 0; x < sd0.dim(); ++x) {
    if (pair.chi_i(x) != 0.0) rows.push_back(x);
    if (pair.chi_j(x) != 0.0) cols.push_back(x);
  }
  if (rows.empty() || cols.empty()) return 0.0;
  Eigen::VectorXd fl(sd0.dim());
  for (Index k = 0; k < sd0.dim(); ++k) fl(k) = f(sd0.eigenvalues(k));
  const MatrixX<Scalar> vr = v(rows, Eigen::all);
  const MatrixX<Scalar> vc = v(cols, Eigen::all);
  MatrixX<Scalar> block = vr * fl.template cast<Scalar>().asDiagonal() * vc.adjoint();
  for (std::size_t a = 0; a < rows.size(); ++a) block.row(a) *= pair.chi_i(rows[a]);
  for (std::size_t b = 0; b < cols.size(); ++b) block.col(b) *= pair.chi_j(cols[b]);
  return trace_norm(block);
}

struct K0Comparison {
  double lhs;
  double rhs;
  double K0;
};

/// lhs = <psi, E0(complement of delta_tilde) (H0 - E_m)^{-2} psi>,
/// rhs = K0 <psi, (H0 + M)^{-2} psi>.
template <typename Scalar>
K0Comparison k0_comparison(const SpectralData<Scalar>& sd0, const IntervalPair& ip, double e_m,
                           const VectorX<Scalar>& psi) {
  require(ip.delta.contains(e_m), ErrorCode::InvalidArgument, "E_m must lie in delta");
  require(psi.size() == sd0.dim(), ErrorCode::DimensionMismatch, "vector length does not match operator");
  require(sd0.dim() == 0 || sd0.eigenvalues(0) + ip.shift_M >= 1e-6, ErrorCode::ShiftTooSmall,
          "H0 + M must be >= 1e-6");
  const Eigen::VectorXd w = (sd0.vectors().adjoint() * psi).cwiseAbs2();
  double lhs = 0.0, resolvent = 0.0;
  for (Index k = 0; k < sd0.dim(); ++k) {
    const double l = sd0.eigenvalues(k);
    const double rm = l + ip.shift_M;
    resolvent += w(k) / (rm * rm);
    if (!ip.delta_tilde.contains(l)) lhs += w(k) / ((l - e_m) * (l - e_m));
  }
  const double k0 = ip.k0();
  return {lhs, k0 * resolvent, k0};
}

struct TraceInequality {
  double lhs;
  double rhs;
  double projector_coefficient;  // sum_j sigma_j / (2^j sigma_1 ... sigma_{j-1})
};

/// |Tr P K| <= (sum_j sigma_j / (2^j sigma_1 ... sigma_{j-1})) Tr P
///             + Tr P K^(2^m) / (2^m sigma_1 ... sigma_m).
TraceInequality iterated_trace_inequality(const Eigen::MatrixXcd& P, const Eigen::MatrixXcd& K, int m,
                                          const std::vector<double>& sigmas);

/// sigma_j = K0^(-2^(j-1)), for which the projector coefficient is
/// (1 - 2^-m) / K0.
std::vector<double> canonical_sigmas(double K0, int m);

/// K~ = sum over overlapping pairs (u_i u_j != 0) of u_i^2 (H0 + M)^{-2} u_j^2.
Eigen::MatrixXd ktilde_operator(const BoxSpec& box, const SingleSitePotential& u,
                                const SpectralData<double>& sd0, double shift_M);

/// ||A^(2^m)||_1 for Hermitian A (by repeated squaring).
double power_trace_norm(const Eigen::MatrixXd& A, int m);

}  // namespace wegnerlab
