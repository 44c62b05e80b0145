#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "wegnerlab/measures.hpp"
#include "wegnerlab/spectra.hpp"

namespace wegnerlab {

enum class SupCertification { ClosedForm, LipschitzGrid };

/// A sum over n in Z of per-term suprema over y in [0, 1], truncated to
/// |n| <= n_trunc. `partial_sum` is always a lower estimate of the full sum.
/// For grid certification each term is bounded above by its grid maximum times
/// exp(L / (2 * grid)), where |f'| <= L f on [0, 1] (a log-Lipschitz bound),
/// and `grid_slack` is the total amount this adds.
struct CertifiedSum {
  double partial_sum = 0.0;
  double tail_bound = 0.0;
  bool tail_available = true;
  double grid_slack = 0.0;
  SupCertification certification = SupCertification::ClosedForm;
  int grid = 0;
  double log_lipschitz = 0.0;
  double min_term = 0.0;

  double lower() const noexcept { return partial_sum; }
  /// +inf when no tail bound is available.
  double upper() const noexcept {
    return tail_available ? partial_sum + grid_slack + tail_bound : std::numeric_limits<double>::infinity();
  }
};

/// l(kappa; b) = sum_n sup_y b / ((y + n + kappa)^2 + b^2), term maxima in
/// closed form, tail 2b / (n_trunc - |kappa| - 1).
CertifiedSum ell_value(double kappa, double b, long n_trunc = 10000);

/// sum_n sup_y <B phi, ((A + (n + y) B)^2 + 1)^{-1} B phi> for Hermitian A and
/// B >= 0. The tail bound needs B invertible: with a = ||B^{-1} A||, every
/// term with |n| > n_trunc is at most ||phi||^2 / (|n| - 1 - a)^2, giving
/// 2 ||phi||^2 / (n_trunc - a - 1). n_trunc <= 0 picks ceil(a) + 400.
CertifiedSum averaging_sum(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, const Eigen::VectorXcd& phi,
                           long n_trunc = 0, int y_grid = 64);

/// The dissipative sum -sum_n sup_y Im <v, (A + (n + y) B + i lambda B)^{-1} v>
/// with v = B^{1/2} phi and A = A0 + i Gamma. No tail bound is attempted.
CertifiedSum dissipative_sum(const Eigen::MatrixXcd& A0, const Eigen::MatrixXcd& Gamma, const Eigen::MatrixXcd& B,
                             const Eigen::VectorXcd& phi, double lambda, long n_trunc = 200, int y_grid = 64);

/// Theorem-style bounds the sums are checked against.
double averaging_bound(const Eigen::MatrixXcd& B, const Eigen::VectorXcd& phi);
double dissipative_bound(double lambda, const Eigen::VectorXcd& phi);
double ell_bound(double b);

/// Hermitian square root of a PSD matrix; eigenvalues below -1e-12 are
/// rejected, the rest clamped at zero.
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& B);

/// Throws NotPositiveSemidefinite unless the smallest eigenvalue of the
/// Hermitian part is >= -tol.
void require_psd(const Eigen::MatrixXcd& M, double tol, const char* name);

struct ArctanCheck {
  double lhs;
  double rhs;
};

/// lhs = <phi, [arctan((E0 + eps - H)/eps) - arctan((E0 - H)/eps)] phi>,
/// rhs = (pi/4) <phi, E([E0, E0 + eps]) phi>.
template <typename Scalar>
ArctanCheck arctan_projector_check(const SpectralData<Scalar>& sd, const VectorX<Scalar>& phi, double e0,
                                   double epsilon) {
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
  const auto& v = sd.vectors();
  require(phi.size() == sd.dim(), ErrorCode::DimensionMismatch, "vector length does not match operator");
  const Eigen::VectorXd w = (v.adjoint() * phi).cwiseAbs2();
  double lhs = 0.0;
  for (Index k = 0; k < sd.dim(); ++k) {
    const double l = sd.eigenvalues(k);
    lhs += w(k) * (std::atan((e0 + epsilon - l) / epsilon) - std::atan((e0 - l) / epsilon));
  }
  const double rhs = std::numbers::pi / 4.0 * projector_quadratic_form(sd, Interval{e0, e0 + epsilon}, phi);
  return {lhs, rhs};
}

/// H_omega = h_perp + sum_k omega_k other_sites.col(k) + omega_j u_j (diagonal
/// factors), all couplings iid from `measure`.
struct ResolventModel {
  Eigen::MatrixXd h_perp;
  Eigen::VectorXd u_j;
  MeasureSpec measure;
  Eigen::MatrixXd other_sites;  // may have zero columns
};

struct ResolventExpectation {
  double integral_mean;
  double integral_stderr;
  double projector_mean;
  double projector_stderr;
  double s_eps;  // modulus value plus its error bound
  double bound_2pi;
  double bound_8s;
  double max_quadrature_error;  // worst |quadrature - closed form| / closed form
};

/// Monte Carlo estimates of E{int_{[E0, E0+eps]} dE Im <u phi, (H - E - i eps)^{-1} u phi>}
/// (adaptive Gauss-Kronrod in E) and of E{<u phi, E([E0, E0 + eps]) u phi>}.
ResolventExpectation resolvent_expectation(const ResolventModel& model, const Eigen::VectorXd& phi, double e0,
                                           double epsilon, int n_realizations, std::uint64_t seed,
                                           int workers = 1);

/// The Lorentzian energy integral in closed form and by quadrature for one
/// spectral decomposition; exposed for testing.
double lorentz_integral_closed(const Eigen::VectorXd& eigenvalues, const Eigen::VectorXd& weights, double e0,
                               double epsilon);
double lorentz_integral_quadrature(const Eigen::VectorXd& eigenvalues, const Eigen::VectorXd& weights, double e0,
                                   double epsilon, double rel_tol = 1e-6);

}  // namespace wegnerlab
