#include "wegnerlab/spectra.hpp"

#include <cstdio>
#include <ostream>

namespace wegnerlab {

IntervalPair IntervalPair::make(Interval delta, Interval delta_tilde, double shift_M, double h0_min_eigenvalue) {
  require(delta.lo <= delta.hi && delta_tilde.lo <= delta_tilde.hi, ErrorCode::InvalidArgument,
          "intervals must satisfy lo <= hi");
  require(delta_tilde.lo <= delta.lo && delta.hi <= delta_tilde.hi, ErrorCode::InvalidArgument,
          "delta must lie inside delta_tilde");
  const double d = std::min(delta.lo - delta_tilde.lo, delta_tilde.hi - delta.hi);
  require(d > 0.0, ErrorCode::InvalidArgument, "delta must have positive distance to the complement of delta_tilde");
  require(h0_min_eigenvalue + shift_M >= 1e-6, ErrorCode::ShiftTooSmall, "H0 + M must be positive definite");
  require(shift_M + delta.lo >= 0.0, ErrorCode::ShiftTooSmall, "M + inf(delta) must be nonnegative");
  return IntervalPair{delta, delta_tilde, d, shift_M};
}

double IntervalPair::k0() const {
  const double r = (shift_M + delta.hi) / d_gap;
  return (1.0 + r) * (1.0 + r);
}

void write_eigenvalues_csv(std::ostream& out, const Eigen::VectorXd& eigenvalues) {
  out << "index,eigenvalue\n";
  char buf[64];
  for (Index k = 0; k < eigenvalues.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", eigenvalues(k));
    out << k << ',' << buf << '\n';
  }
}

}  // namespace wegnerlab
