#pragma once

#include <algorithm>
#include <iosfwd>
#include <optional>

#include <Eigen/Eigenvalues>

#include "wegnerlab/measures.hpp"
#include "wegnerlab/operators.hpp"

namespace wegnerlab {

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and, when
/// retained, orthonormal eigenvectors as columns.
template <typename Scalar>
struct SpectralData {
  Eigen::VectorXd eigenvalues;
  std::optional<MatrixX<Scalar>> eigenvectors;

  Index dim() const noexcept { return eigenvalues.size(); }
  bool has_vectors() const noexcept { return eigenvectors.has_value(); }
  const MatrixX<Scalar>& vectors() const {
    require(eigenvectors.has_value(), ErrorCode::VectorsNotRetained, "eigenvectors were not retained");
    return *eigenvectors;
  }
};

template <typename Scalar>
SpectralData<Scalar> eigensolve_matrix(const MatrixX<Scalar>& h, bool keep_vectors, Index dense_cap = 4096) {
  require(h.rows() == h.cols(), ErrorCode::DimensionMismatch, "matrix is not square");
  require(h.rows() <= dense_cap, ErrorCode::DimensionExceeded,
          "dimension " + std::to_string(h.rows()) + " exceeds the dense cap");
  SpectralData<Scalar> sd;
  if (h.rows() == 0) {
    sd.eigenvalues.resize(0);
    if (keep_vectors) sd.eigenvectors = MatrixX<Scalar>(0, 0);
    return sd;
  }
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(h, keep_vectors ? Eigen::ComputeEigenvectors
                                                                     : Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorCode::InvalidArgument, "eigensolver did not converge");
  sd.eigenvalues = es.eigenvalues();
  if (keep_vectors) sd.eigenvectors = es.eigenvectors();
  return sd;
}

template <typename Scalar>
SpectralData<Scalar> eigensolve(const LatticeOperator<Scalar>& h, bool keep_vectors) {
  return eigensolve_matrix<Scalar>(h.matrix(), keep_vectors, h.box().dense_cap);
}

/// #{lambda <= E}.
template <typename Scalar>
Index counting_function(const SpectralData<Scalar>& sd, double e) {
  const double* b = sd.eigenvalues.data();
  return std::upper_bound(b, b + sd.dim(), e) - b;
}

/// #{lambda in [lo, hi]}, endpoints included.
template <typename Scalar>
Index interval_trace(const SpectralData<Scalar>& sd, const Interval& iv) {
  if (iv.hi < iv.lo) return 0;
  const double* b = sd.eigenvalues.data();
  return (std::upper_bound(b, b + sd.dim(), iv.hi) - b) - (std::lower_bound(b, b + sd.dim(), iv.lo) - b);
}

/// Indices [first, last) of eigenvalues inside the closed interval.
template <typename Scalar>
std::pair<Index, Index> interval_range(const SpectralData<Scalar>& sd, const Interval& iv) {
  const double* b = sd.eigenvalues.data();
  const Index first = std::lower_bound(b, b + sd.dim(), iv.lo) - b;
  const Index last = std::max(first, Index(std::upper_bound(b, b + sd.dim(), iv.hi) - b));
  return {first, last};
}

/// <phi, E(iv) phi> = sum over eigenvalues in iv of |<v, phi>|^2.
template <typename Scalar>
double projector_quadratic_form(const SpectralData<Scalar>& sd, const Interval& iv, const VectorX<Scalar>& phi) {
  const auto& v = sd.vectors();
  require(phi.size() == sd.dim(), ErrorCode::DimensionMismatch, "vector length does not match operator");
  const auto [first, last] = interval_range(sd, iv);
  if (last == first) return 0.0;
  return (v.middleCols(first, last - first).adjoint() * phi).squaredNorm();
}

/// Spectral projector E(iv) as a dense matrix.
template <typename Scalar>
MatrixX<Scalar> spectral_projector(const SpectralData<Scalar>& sd, const Interval& iv) {
  const auto& v = sd.vectors();
  const auto [first, last] = interval_range(sd, iv);
  const auto block = v.middleCols(first, last - first);
  return block * block.adjoint();
}

/// f(H) = V diag(f(lambda)) V^dagger.
template <typename Scalar, typename F>
MatrixX<Scalar> spectral_function(const SpectralData<Scalar>& sd, F&& f) {
  const auto& v = sd.vectors();
  Eigen::VectorXd fl(sd.dim());
  for (Index k = 0; k < sd.dim(); ++k) fl(k) = f(sd.eigenvalues(k));
  return v * fl.template cast<Scalar>().asDiagonal() * v.adjoint();
}

/// Best constant C in P V~ P >= C P for P = E0(delta_tilde): the smallest
/// eigenvalue of V~ compressed to range(P).
template <typename Scalar>
double ucp_constant(const SpectralData<Scalar>& sd0, const Interval& delta_tilde, const Eigen::VectorXd& tilde) {
  const auto& v = sd0.vectors();
  require(tilde.size() == sd0.dim(), ErrorCode::DimensionMismatch, "V~ length does not match operator");
  const auto [first, last] = interval_range(sd0, delta_tilde);
  require(last > first, ErrorCode::EmptyProjector, "no eigenvalue of H0 lies in the interval");
  const MatrixX<Scalar> vp = v.middleCols(first, last - first);
  const MatrixX<Scalar> compressed = vp.adjoint() * tilde.template cast<Scalar>().asDiagonal() * vp;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(compressed, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Residual max_k ||H v_k - lambda_k v_k|| relative to ||H||.
template <typename Scalar>
double spectral_residual(const MatrixX<Scalar>& h, const SpectralData<Scalar>& sd) {
  const auto& v = sd.vectors();
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const MatrixX<Scalar> r = h * v - v * sd.eigenvalues.template cast<Scalar>().asDiagonal();
  return r.colwise().norm().maxCoeff() / scale;
}

template <typename Scalar>
double orthonormality_defect(const SpectralData<Scalar>& sd) {
  const auto& v = sd.vectors();
  return (v.adjoint() * v - MatrixX<Scalar>::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
}

/// Nested energy intervals delta inside delta_tilde with gap d = dist(delta,
/// complement of delta_tilde) and a shift M making H0 + M positive.
struct IntervalPair {
  Interval delta;
  Interval delta_tilde;
  double d_gap;
  double shift_M;

  /// Validates nesting, d > 0, M + min spectrum >= 1e-6 and M + delta.lo >= 0.
  static IntervalPair make(Interval delta, Interval delta_tilde, double shift_M, double h0_min_eigenvalue);

  /// K0 = (1 + (M + delta_+) / d)^2.
  double k0() const;
};

void write_eigenvalues_csv(std::ostream& out, const Eigen::VectorXd& eigenvalues);

}  // namespace wegnerlab
