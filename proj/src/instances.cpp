#include "wegnerlab/instances.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace wegnerlab {

namespace {

// Box-Muller on the stream's 53-bit uniforms, so the draws do not depend on
// the standard library's distribution implementation.
double gaussian(CounterStream& s) {
  double u1 = s.uniform01();
  while (u1 <= 0.0) u1 = s.uniform01();
  const double u2 = s.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::MatrixXcd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, CounterStream& s) {
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = gaussian(s);
      m(r, c) = std::complex<double>(re, gaussian(s));
    }
  }
  return m;
}

}  // namespace

Eigen::MatrixXcd random_hermitian(Eigen::Index dim, double scale, CounterStream& stream) {
  const Eigen::MatrixXcd g = gaussian_matrix(dim, dim, stream);
  return (g + g.adjoint()) * (scale / std::sqrt(8.0 * static_cast<double>(dim)));
}

Eigen::MatrixXcd random_unitary(Eigen::Index dim, CounterStream& stream) {
  const Eigen::MatrixXcd g = gaussian_matrix(dim, dim, stream);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
}

Eigen::MatrixXcd random_psd(Eigen::Index dim, double min_eig, double max_eig, CounterStream& stream) {
  const Eigen::MatrixXcd u = random_unitary(dim, stream);
  Eigen::VectorXd ev(dim);
  for (Eigen::Index k = 0; k < dim; ++k) ev(k) = min_eig + (max_eig - min_eig) * stream.uniform01();
  if (dim > 0) ev(0) = max_eig;
  const Eigen::MatrixXcd b = u * ev.cast<std::complex<double>>().asDiagonal() * u.adjoint();
  return 0.5 * (b + b.adjoint());
}

Eigen::MatrixXcd random_psd_rank(Eigen::Index dim, Eigen::Index rank, double max_eig, CounterStream& stream) {
  const Eigen::MatrixXcd u = random_unitary(dim, stream);
  Eigen::VectorXd ev = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index k = 0; k < rank && k < dim; ++k) ev(k) = max_eig * stream.uniform01();
  if (rank > 0 && dim > 0) ev(0) = max_eig;
  const Eigen::MatrixXcd b = u * ev.cast<std::complex<double>>().asDiagonal() * u.adjoint();
  return 0.5 * (b + b.adjoint());
}

Eigen::VectorXcd random_unit_vector(Eigen::Index dim, CounterStream& stream) {
  Eigen::VectorXcd v = gaussian_matrix(dim, 1, stream).col(0);
  return v / v.norm();
}

Eigen::MatrixXcd random_projector(Eigen::Index dim, Eigen::Index rank, CounterStream& stream) {
  const Eigen::MatrixXcd u = random_unitary(dim, stream);
  const Eigen::MatrixXcd q = u.leftCols(rank);
  return q * q.adjoint();
}

}  // namespace wegnerlab
