#include "wegnerlab/tracebounds.hpp"

#include <cmath>
#include <numeric>

namespace wegnerlab {

namespace {

std::array<Index, 2> site_coords(const BoxSpec& box, Index site) {
  const Index L = box.cells_per_side;
  return box.dimension == 1 ? std::array<Index, 2>{site, 0} : std::array<Index, 2>{site % L, site / L};
}

double periodic_gap(double a, double b, double period) {
  const double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

}  // namespace

double site_distance(const BoxSpec& box, Index site_i, Index site_j) {
  const auto a = site_coords(box, site_i);
  const auto b = site_coords(box, site_j);
  const double L = box.cells_per_side;
  const double dx = periodic_gap(a[0], b[0], L);
  const double dy = box.dimension == 1 ? 0.0 : periodic_gap(a[1], b[1], L);
  return std::hypot(dx, dy);
}

Eigen::VectorXd site_cutoff(const BoxSpec& box, Index site, double radius) {
  box.validate();
  require(site >= 0 && site < box.sites(), ErrorCode::InvalidArgument, "site index out of range");
  const auto c = site_coords(box, site);
  const double n = box.points_per_cell;
  const double side = static_cast<double>(box.points_per_side()) / n;  // = L
  Eigen::VectorXd chi = Eigen::VectorXd::Zero(box.grid_points());
  const Index ns = box.points_per_side();
  for (Index p = 0; p < box.grid_points(); ++p) {
    const double x = (static_cast<double>(p % ns) + 0.5) / n;
    const double y = box.dimension == 1 ? 0.0 : (static_cast<double>(p / ns) + 0.5) / n;
    const double dx = periodic_gap(x, c[0] + 0.5, side);
    const double dy = box.dimension == 1 ? 0.0 : periodic_gap(y, c[1] + 0.5, side);
    if (std::max(dx, dy) <= radius + 1e-12) chi(p) = 1.0;
  }
  return chi;
}

CutoffPair cutoff_pair(const BoxSpec& box, Index site_i, Index site_j, double radius) {
  return {site_cutoff(box, site_i, radius), site_cutoff(box, site_j, radius), site_distance(box, site_i, site_j)};
}

namespace {

DecayFit linear_fit(const std::vector<double>& xs, const std::vector<double>& norms) {
  require(xs.size() == norms.size(), ErrorCode::DimensionMismatch, "separations and norms differ in length");
  require(xs.size() >= 4, ErrorCode::DegenerateFit, "need at least four points");
  for (double v : norms) require(v > 0.0 && std::isfinite(v), ErrorCode::NonPositiveData, "norms must be positive");
  const std::size_t n = xs.size();
  std::vector<double> ys(n);
  for (std::size_t k = 0; k < n; ++k) ys[k] = std::log(norms[k]);
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  require(sxx > 0.0, ErrorCode::DegenerateFit, "all abscissae are equal");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  DecayFit fit;
  fit.C0 = std::exp(intercept);
  fit.c0 = -slope;
  double ss_res = 0.0;
  fit.residuals.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    fit.residuals[k] = ys[k] - (intercept + slope * xs[k]);
    ss_res += fit.residuals[k] * fit.residuals[k];
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.decaying = fit.c0 > 1e-12;
  return fit;
}

}  // namespace

DecayFit decay_fit(const std::vector<double>& separations, const std::vector<double>& norms) {
  return linear_fit(separations, norms);
}

DecayFit loglog_fit(const std::vector<double>& separations, const std::vector<double>& norms) {
  std::vector<double> lx(separations.size());
  for (std::size_t k = 0; k < separations.size(); ++k) {
    require(separations[k] > 0.0, ErrorCode::NonPositiveData, "separations must be positive");
    lx[k] = std::log(separations[k]);
  }
  return linear_fit(lx, norms);
}

double BumpSpec::operator()(double e) const {
  const double r = (e - center) / half_width;
  if (std::abs(r) >= 1.0) return 0.0;
  const double q = 1.0 - r * r;
  return kind == Kind::Polynomial ? std::pow(q, order + 1) : std::exp(1.0 - 1.0 / q);
}

TraceInequality iterated_trace_inequality(const Eigen::MatrixXcd& P, const Eigen::MatrixXcd& K, int m,
                                          const std::vector<double>& sigmas) {
  require(m >= 1, ErrorCode::InvalidArgument, "m must be positive");
  require(static_cast<int>(sigmas.size()) >= m, ErrorCode::InvalidArgument, "need m sigmas");
  require(P.rows() == P.cols() && K.rows() == K.cols() && P.rows() == K.rows(), ErrorCode::DimensionMismatch,
          "P and K must be square of equal size");
  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  require((P - P.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * scale && (P * P - P).cwiseAbs().maxCoeff() <= 1e-10 * scale,
          ErrorCode::NotAProjector, "P must satisfy P^2 = P = P^dagger");
  for (int j = 0; j < m; ++j) require(sigmas[j] > 0.0, ErrorCode::InvalidArgument, "sigmas must be positive");

  double coef = 0.0, prod = 1.0;
  for (int j = 1; j <= m; ++j) {
    coef += sigmas[j - 1] / (std::ldexp(1.0, j) * prod);
    prod *= sigmas[j - 1];
  }
  Eigen::MatrixXcd kp = K;
  for (int j = 0; j < m; ++j) kp = (kp * kp).eval();
  const double tr_p = P.trace().real();
  const double tr_pk = (P * kp).trace().real();
  TraceInequality out;
  out.lhs = std::abs((P * K).trace());
  out.rhs = coef * tr_p + tr_pk / (std::ldexp(1.0, m) * prod);
  out.projector_coefficient = coef;
  return out;
}

std::vector<double> canonical_sigmas(double K0, int m) {
  require(K0 > 0.0, ErrorCode::InvalidArgument, "K0 must be positive");
  std::vector<double> s(m);
  for (int j = 1; j <= m; ++j) s[j - 1] = std::pow(K0, -std::ldexp(1.0, j - 1));
  return s;
}

Eigen::MatrixXd ktilde_operator(const BoxSpec& box, const SingleSitePotential& u, const SpectralData<double>& sd0,
                                double shift_M) {
  require(sd0.dim() == box.grid_points(), ErrorCode::DimensionMismatch, "spectral data does not match box");
  require(sd0.eigenvalues(0) + shift_M >= 1e-6, ErrorCode::ShiftTooSmall, "H0 + M must be >= 1e-6");
  const Index ns = box.sites();
  Eigen::MatrixXd profiles(box.grid_points(), ns);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(ns);
  for (Index s = 0; s < ns; ++s) {
    e.setZero();
    e(s) = 1.0;
    profiles.col(s) = assemble_anderson(box, u, e);
  }
  const Eigen::MatrixXd overlap = ((profiles.transpose() * profiles).array() > 0.0).cast<double>().matrix();
  const Eigen::MatrixXd u2 = profiles.array().square().matrix();
  const Eigen::MatrixXd weight = u2 * overlap * u2.transpose();
  const Eigen::VectorXd g = (sd0.eigenvalues.array() + shift_M).square().inverse().matrix();
  const Eigen::MatrixXd& v = sd0.vectors();
  const Eigen::MatrixXd r2 = v * g.asDiagonal() * v.transpose();
  return r2.cwiseProduct(weight);
}

double power_trace_norm(const Eigen::MatrixXd& A, int m) {
  require(m >= 0, ErrorCode::InvalidArgument, "m must be nonnegative");
  Eigen::MatrixXd p = 0.5 * (A + A.transpose());
  for (int j = 0; j < m; ++j) p = (p * p).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (p + p.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace wegnerlab
