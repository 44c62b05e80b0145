#include "wegnerlab/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wegnerlab/parallel.hpp"

namespace wegnerlab {

namespace {

using cd = std::complex<double>;

// q(t) = <left, (T0 + t B)^{-1} right>. With T0^{-1} B = S diag(nu) S^{-1},
// (T0 + t B)^{-1} = S diag(1 / (1 + t nu)) S^{-1} T0^{-1}, so every
// evaluation after setup costs O(dim). Spot checks against direct solves
// decide whether the diagonalization is trustworthy; otherwise each
// evaluation falls back to an LU solve.
class PencilResolvent {
 public:
  PencilResolvent(const Eigen::MatrixXcd& t0, const Eigen::MatrixXcd& b, const Eigen::VectorXcd& left,
                  const Eigen::VectorXcd& right)
      : t0_(t0), b_(b), left_(left), right_(right) {
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu0(t0);
    const Eigen::MatrixXcd w = lu0.solve(b);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(w, true);
    if (es.info() != Eigen::Success) return;
    nu_ = es.eigenvalues();
    const Eigen::MatrixXcd& s = es.eigenvectors();
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lus(s);
    const Eigen::VectorXcd a = s.adjoint() * left;
    const Eigen::VectorXcd c = lus.solve(lu0.solve(right));
    p_ = a.conjugate().cwiseProduct(c);
    scale_ = left.norm() * right.norm();
    fast_ = true;
  }

  /// Compares against direct solves at the given points; disables the fast
  /// path on any disagreement.
  void spot_check(std::initializer_list<double> ts) {
    if (!fast_) return;
    for (double t : ts) {
      const cd fast = eval_fast(t);
      const cd direct = eval_direct(t);
      if (!(std::abs(fast - direct) <= 1e-8 * std::abs(direct) + 1e-13 * scale_)) {
        fast_ = false;
        return;
      }
    }
  }

  cd operator()(double t) const { return fast_ ? eval_fast(t) : eval_direct(t); }
  bool fast() const noexcept { return fast_; }

 private:
  cd eval_fast(double t) const {
    cd sum = 0.0;
    for (Index k = 0; k < p_.size(); ++k) sum += p_(k) / (1.0 + t * nu_(k));
    return sum;
  }
  cd eval_direct(double t) const {
    const Eigen::MatrixXcd m = t0_ + t * b_;
    return left_.dot(m.partialPivLu().solve(right_));
  }

  const Eigen::MatrixXcd& t0_;
  const Eigen::MatrixXcd& b_;
  const Eigen::VectorXcd& left_;
  const Eigen::VectorXcd& right_;
  Eigen::VectorXcd nu_, p_;
  double scale_ = 0.0;
  bool fast_ = false;
};

// Sum over |n| <= n_trunc of max over the y grid of f(n + y), with the
// multiplicative slack exp(L / (2 grid)) for |f'| <= L f.
template <typename F>
CertifiedSum grid_sum(F&& f, long n_trunc, int y_grid, double log_lipschitz) {
  CertifiedSum out;
  out.certification = SupCertification::LipschitzGrid;
  out.grid = y_grid;
  out.log_lipschitz = log_lipschitz;
  out.min_term = std::numeric_limits<double>::infinity();
  const double factor = std::exp(log_lipschitz / (2.0 * y_grid));
  double sum = 0.0;
  for (long n = -n_trunc; n <= n_trunc; ++n) {
    double best = -std::numeric_limits<double>::infinity();
    for (int g = 0; g <= y_grid; ++g) {
      const double v = f(static_cast<double>(n) + static_cast<double>(g) / y_grid);
      out.min_term = std::min(out.min_term, v);
      best = std::max(best, v);
    }
    sum += best;
  }
  out.partial_sum = sum;
  out.grid_slack = std::max(0.0, sum) * (factor - 1.0);
  return out;
}

double max_eigenvalue(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(m.rows() - 1);
}

}  // namespace

CertifiedSum ell_value(double kappa, double b, long n_trunc) {
  require(b > 0.0 && std::isfinite(b), ErrorCode::InvalidArgument, "b must be positive");
  require(static_cast<double>(n_trunc) > std::abs(kappa) + 1.0, ErrorCode::InvalidArgument,
          "n_trunc must exceed |kappa| + 1");
  CertifiedSum out;
  double sum = 0.0;
  for (long n = -n_trunc; n <= n_trunc; ++n) {
    const double shift = static_cast<double>(n) + kappa;
    const double y = std::clamp(-shift, 0.0, 1.0);
    const double x = y + shift;
    sum += b / (x * x + b * b);
  }
  out.partial_sum = sum;
  out.tail_bound = 2.0 * b / (static_cast<double>(n_trunc) - std::abs(kappa) - 1.0);
  out.min_term = 0.0;
  return out;
}

double ell_bound(double b) { return std::numbers::pi * (1.0 + 1.0 / b); }

void require_psd(const Eigen::MatrixXcd& m, double tol, const char* name) {
  require(m.rows() == m.cols(), ErrorCode::DimensionMismatch, std::string(name) + " is not square");
  if (m.rows() == 0) return;
  const Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  require(es.eigenvalues()(0) >= -tol, ErrorCode::NotPositiveSemidefinite,
          std::string(name) + " has eigenvalue " + std::to_string(es.eigenvalues()(0)));
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& b) {
  if (b.rows() == 0) return b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (b + b.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues();
  require(ev(0) >= -1e-12 * std::max(1.0, std::abs(ev(ev.size() - 1))), ErrorCode::NotPositiveSemidefinite,
          "matrix has a negative eigenvalue " + std::to_string(ev(0)));
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

double averaging_bound(const Eigen::MatrixXcd& b, const Eigen::VectorXcd& phi) {
  const double nb = std::max(0.0, max_eigenvalue(0.5 * (b + b.adjoint())));
  return std::numbers::pi * nb * (1.0 + nb) * phi.squaredNorm();
}

double dissipative_bound(double lambda, const Eigen::VectorXcd& phi) {
  return std::numbers::pi * (1.0 + 1.0 / lambda) * phi.squaredNorm();
}

CertifiedSum averaging_sum(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, const Eigen::VectorXcd& phi,
                           long n_trunc, int y_grid) {
  const Index dim = a.rows();
  require(a.cols() == dim && b.rows() == dim && b.cols() == dim && phi.size() == dim, ErrorCode::DimensionMismatch,
          "A, B and phi must have matching dimensions");
  require(y_grid >= 1, ErrorCode::InvalidArgument, "y_grid must be positive");
  require((a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()),
          ErrorCode::InvalidArgument, "A must be Hermitian");
  require_psd(b, 1e-10, "B");

  const Eigen::VectorXcd w = b * phi;
  if (w.norm() == 0.0) {
    CertifiedSum zero;
    zero.certification = SupCertification::ClosedForm;
    return zero;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> bes(0.5 * (b + b.adjoint()), Eigen::EigenvaluesOnly);
  const double bmin = bes.eigenvalues()(0);
  const double bnorm = bes.eigenvalues()(dim - 1);
  double a_ratio = std::numeric_limits<double>::infinity();
  const bool invertible = bmin > 1e-10 * std::max(1.0, bnorm);
  if (invertible) {
    const Eigen::MatrixXcd binv_a = b.llt().solve(a);
    a_ratio = Eigen::JacobiSVD<Eigen::MatrixXcd>(binv_a).singularValues()(0);
  }
  if (n_trunc <= 0) n_trunc = invertible ? static_cast<long>(std::ceil(a_ratio)) + 400 : 400;

  const Eigen::MatrixXcd t0 = a + cd(0.0, 1.0) * Eigen::MatrixXcd::Identity(dim, dim);
  PencilResolvent q(t0, b, w, w);
  const double nt = static_cast<double>(n_trunc);
  q.spot_check({0.0, 0.37, -1.61, nt, -nt, 0.5 * nt});
  // f(t) = <w, ((A + tB)^2 + 1)^{-1} w> = -Im <w, (A + tB + i)^{-1} w>, |f'| <= ||B|| f
  CertifiedSum out = grid_sum([&](double t) { return -q(t).imag(); }, n_trunc, y_grid, bnorm);
  if (invertible && nt > a_ratio + 1.0) {
    out.tail_bound = 2.0 * phi.squaredNorm() / (nt - a_ratio - 1.0);
  } else {
    out.tail_available = false;
    out.tail_bound = 0.0;
  }
  return out;
}

CertifiedSum dissipative_sum(const Eigen::MatrixXcd& a0, const Eigen::MatrixXcd& gamma, const Eigen::MatrixXcd& b,
                             const Eigen::VectorXcd& phi, double lambda, long n_trunc, int y_grid) {
  const Index dim = a0.rows();
  require(lambda > 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument, "lambda must be positive");
  require(a0.cols() == dim && gamma.rows() == dim && gamma.cols() == dim && b.rows() == dim && b.cols() == dim &&
              phi.size() == dim,
          ErrorCode::DimensionMismatch, "A0, Gamma, B and phi must have matching dimensions");
  require(n_trunc >= 1 && y_grid >= 1, ErrorCode::InvalidArgument, "n_trunc and y_grid must be positive");
  require_psd(gamma, 1e-10, "Gamma");
  require_psd(b, 1e-10, "B");

  const Eigen::VectorXcd v = psd_sqrt(b) * phi;
  if (v.norm() == 0.0) {
    CertifiedSum zero;
    zero.certification = SupCertification::ClosedForm;
    zero.tail_available = false;
    return zero;
  }
  const cd i(0.0, 1.0);
  const Eigen::MatrixXcd t0 = a0 + i * gamma + i * lambda * b;
  PencilResolvent q(t0, b, v, v);
  const double nt = static_cast<double>(n_trunc);
  q.spot_check({0.0, 0.41, -2.3, nt, -nt});
  // g(t) = -Im <v, (A + tB + i lambda B)^{-1} v> >= 0 and |g'| <= g / lambda
  CertifiedSum out = grid_sum([&](double t) { return -q(t).imag(); }, n_trunc, y_grid, 1.0 / lambda);
  out.tail_available = false;
  return out;
}

double lorentz_integral_closed(const Eigen::VectorXd& eigenvalues, const Eigen::VectorXd& weights, double e0,
                               double epsilon) {
  double total = 0.0;
  for (Index k = 0; k < eigenvalues.size(); ++k) {
    const double l = eigenvalues(k);
    total += weights(k) * (std::atan((e0 + epsilon - l) / epsilon) - std::atan((e0 - l) / epsilon));
  }
  return total;
}

double lorentz_integral_quadrature(const Eigen::VectorXd& eigenvalues, const Eigen::VectorXd& weights, double e0,
                                   double epsilon, double rel_tol) {
  // Im <psi, (H - E - i eps)^{-1} psi> = sum_k w_k eps / ((lambda_k - E)^2 + eps^2)
  auto f = [&](double e) {
    double s = 0.0;
    for (Index k = 0; k < eigenvalues.size(); ++k) {
      const double x = eigenvalues(k) - e;
      s += weights(k) * epsilon / (x * x + epsilon * epsilon);
    }
    return s;
  };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, e0, e0 + epsilon, 15, rel_tol, &err);
}

ResolventExpectation resolvent_expectation(const ResolventModel& model, const Eigen::VectorXd& phi, double e0,
                                           double epsilon, int n_realizations, std::uint64_t seed, int workers) {
  require(n_realizations >= 2, ErrorCode::InvalidArgument, "need at least two realizations");
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
  const Index dim = model.h_perp.rows();
  require(model.h_perp.cols() == dim && model.u_j.size() == dim && phi.size() == dim &&
              (model.other_sites.cols() == 0 || model.other_sites.rows() == dim),
          ErrorCode::DimensionMismatch, "model and phi dimensions disagree");
  require(model.u_j.size() == 0 || (model.u_j.minCoeff() >= 0.0 && model.u_j.maxCoeff() <= 1.0),
          ErrorCode::InvalidArgument, "u_j must satisfy 0 <= u_j <= 1");

  const Eigen::VectorXd psi = model.u_j.cwiseProduct(phi);
  std::vector<double> integrals(n_realizations), projections(n_realizations), quad_err(n_realizations);
  parallel_for(static_cast<std::size_t>(n_realizations), workers, [&](std::size_t r) {
    Eigen::MatrixXd h = model.h_perp;
    for (Index k = 0; k < model.other_sites.cols(); ++k) {
      CounterStream s(derive_seed({seed, r, static_cast<std::uint64_t>(k) + 1}));
      h.diagonal() += sample(model.measure, s) * model.other_sites.col(k);
    }
    CounterStream sj(derive_seed({seed, r, 0}));
    h.diagonal() += sample(model.measure, sj) * model.u_j;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::VectorXd w = (es.eigenvectors().transpose() * psi).cwiseAbs2();
    const Eigen::VectorXd& lam = es.eigenvalues();
    const double closed = lorentz_integral_closed(lam, w, e0, epsilon);
    const double quad = lorentz_integral_quadrature(lam, w, e0, epsilon);
    integrals[r] = quad;
    quad_err[r] = closed > 0.0 ? std::abs(quad - closed) / closed : std::abs(quad);
    double proj = 0.0;
    for (Index k = 0; k < dim; ++k) {
      if (lam(k) >= e0 && lam(k) <= e0 + epsilon) proj += w(k);
    }
    projections[r] = proj;
  });

  auto mean_stderr = [n = n_realizations](const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= n;
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::pair{m, std::sqrt(ss / (n - 1) / n)};
  };
  ResolventExpectation out{};
  std::tie(out.integral_mean, out.integral_stderr) = mean_stderr(integrals);
  std::tie(out.projector_mean, out.projector_stderr) = mean_stderr(projections);
  const ModulusValue s = modulus_s(model.measure, epsilon);
  out.s_eps = std::min(1.0, s.value + s.error_bound);
  out.bound_2pi = 2.0 * std::numbers::pi * out.s_eps * phi.squaredNorm();
  out.bound_8s = 8.0 * out.s_eps * phi.squaredNorm();
  out.max_quadrature_error = *std::max_element(quad_err.begin(), quad_err.end());
  return out;
}

}  // namespace wegnerlab
