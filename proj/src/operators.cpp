#include "wegnerlab/operators.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <ostream>

namespace wegnerlab {

void BoxSpec::validate() const {
  require(dimension == 1 || dimension == 2, ErrorCode::InvalidArgument, "dimension must be 1 or 2");
  require(cells_per_side >= 1 && points_per_cell >= 1, ErrorCode::InvalidArgument,
          "cells_per_side and points_per_cell must be positive");
  require(grid_points() <= dense_cap, ErrorCode::DimensionExceeded,
          std::to_string(grid_points()) + " grid points exceed the dense cap " + std::to_string(dense_cap));
}

double flux_quanta(const BoxSpec& box, double field_B) {
  const double h = box.spacing();
  const double n = static_cast<double>(box.points_per_side());
  return field_B * h * h * n * n / (2.0 * std::numbers::pi);
}

double field_for_flux(const BoxSpec& box, long quanta) {
  const double h = box.spacing();
  const double n = static_cast<double>(box.points_per_side());
  return 2.0 * std::numbers::pi * static_cast<double>(quanta) / (h * h * n * n);
}

SingleSitePotential::SingleSitePotential(int dimension, int points_per_cell, double radius, Index kmin,
                                         Index kmax, Eigen::ArrayXd values)
    : dimension_(dimension),
      points_per_cell_(points_per_cell),
      radius_(radius),
      kmin_(kmin),
      kmax_(kmax),
      values_(std::move(values)) {}

SingleSitePotential SingleSitePotential::make(int dimension, int points_per_cell, double radius, double height,
                                              bool euclid, bool cosine) {
  require(dimension == 1 || dimension == 2, ErrorCode::InvalidArgument, "dimension must be 1 or 2");
  require(points_per_cell >= 1, ErrorCode::InvalidArgument, "points_per_cell must be positive");
  require(radius > 0.0 && std::isfinite(radius), ErrorCode::InvalidArgument, "support radius must be positive");
  require(height >= 0.0 && height <= 1.0, ErrorCode::InvalidArgument, "height must lie in [0, 1]");

  const double n = points_per_cell;
  auto disp = [n](Index k) { return (static_cast<double>(k) + 0.5) / n - 0.5; };
  // offsets whose displacement from the cell centre is within the radius
  const Index reach = static_cast<Index>(std::ceil(radius * n)) + points_per_cell;
  Index kmin = reach, kmax = -reach;
  for (Index k = -reach; k <= reach; ++k) {
    if (std::abs(disp(k)) <= radius + 1e-12) {
      kmin = std::min(kmin, k);
      kmax = std::max(kmax, k);
    }
  }
  if (kmin > kmax) kmin = kmax = 0;  // radius below half a grid step: keep the nearest point
  const Index ext = kmax - kmin + 1;
  const Index count = dimension == 1 ? ext : ext * ext;
  Eigen::ArrayXd values = Eigen::ArrayXd::Zero(count);
  for (Index t = 0; t < count; ++t) {
    const double dx = disp(kmin + t % ext);
    const double dy = dimension == 1 ? 0.0 : disp(kmin + t / ext);
    const double r = euclid ? std::hypot(dx, dy) : std::max(std::abs(dx), std::abs(dy));
    if (cosine) {
      values(t) = r < radius ? 0.5 * (1.0 + std::cos(std::numbers::pi * r / radius)) * height : 0.0;
    } else {
      values(t) = r <= radius + 1e-12 ? height : 0.0;
    }
  }
  if (height > 0.0) {
    require(values.maxCoeff() > 0.0, ErrorCode::InvalidArgument,
            "single-site potential vanishes on the grid; increase radius or points_per_cell");
  }
  return SingleSitePotential(dimension, points_per_cell, radius, kmin, kmax, std::move(values));
}

SingleSitePotential SingleSitePotential::cosine_bump(int dimension, int points_per_cell, double radius,
                                                     double height) {
  return make(dimension, points_per_cell, radius, height, true, true);
}

SingleSitePotential SingleSitePotential::box(int dimension, int points_per_cell, double radius, double height) {
  return make(dimension, points_per_cell, radius, height, false, false);
}

Eigen::VectorXd assemble_anderson(const BoxSpec& box, const SingleSitePotential& u,
                                  const Eigen::VectorXd& couplings) {
  box.validate();
  require(u.dimension() == box.dimension && u.points_per_cell() == box.points_per_cell,
          ErrorCode::DimensionMismatch, "single-site potential does not match the box grid");
  require(couplings.size() == box.sites(), ErrorCode::DimensionMismatch,
          "coupling field needs one value per site");
  const Index n = box.points_per_side();
  const Index p = box.points_per_cell;
  const Index L = box.cells_per_side;
  const Index ext = u.extent();
  const Eigen::ArrayXd& prof = u.profile();
  auto wrap = [n](Index i) { return ((i % n) + n) % n; };
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(box.grid_points());

  if (box.dimension == 1) {
    for (Index s = 0; s < L; ++s) {
      const double w = couplings(s);
      if (w == 0.0) continue;
      for (Index t = 0; t < ext; ++t) diag(wrap(s * p + u.offset_min() + t)) += w * prof(t);
    }
    return diag;
  }
  for (Index sy = 0; sy < L; ++sy) {
    for (Index sx = 0; sx < L; ++sx) {
      const double w = couplings(sx + L * sy);
      if (w == 0.0) continue;
      for (Index ty = 0; ty < ext; ++ty) {
        const Index iy = wrap(sy * p + u.offset_min() + ty);
        for (Index tx = 0; tx < ext; ++tx) {
          const Index ix = wrap(sx * p + u.offset_min() + tx);
          diag(ix + n * iy) += w * prof(tx + ext * ty);
        }
      }
    }
  }
  return diag;
}

Eigen::VectorXd assemble_tilde(const BoxSpec& box, const SingleSitePotential& u) {
  return assemble_anderson(box, u, Eigen::VectorXd::Ones(box.sites()));
}

double d0_constant(const Eigen::VectorXd& tilde) {
  if (tilde.size() == 0) return 0.0;
  require(tilde.minCoeff() >= 0.0, ErrorCode::InvalidArgument, "V~ must be nonnegative");
  return tilde.maxCoeff();
}

void validate_couplings(const Eigen::VectorXd& couplings, double m0, double M0) {
  for (Index i = 0; i < couplings.size(); ++i) {
    require(couplings(i) >= m0 && couplings(i) <= M0, ErrorCode::InvalidArgument,
            "coupling at site " + std::to_string(i) + " lies outside [m0, M0]");
  }
}

namespace {

template <typename T>
void put(std::ostream& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

}  // namespace

template <typename Scalar>
void write_dense_binary(std::ostream& out, const LatticeOperator<Scalar>& op) {
  out.write("WLOP", 4);
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, is_complex_v<Scalar> ? 1 : 0);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(op.matrix().rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(op.matrix().cols()));
  const auto& m = op.matrix();
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      if constexpr (is_complex_v<Scalar>) {
        put<double>(out, m(r, c).real());
        put<double>(out, m(r, c).imag());
      } else {
        put<double>(out, m(r, c));
      }
    }
  }
  require(static_cast<bool>(out), ErrorCode::InvalidArgument, "failed to write operator dump");
}

template void write_dense_binary<double>(std::ostream&, const LatticeOperator<double>&);
template void write_dense_binary<std::complex<double>>(std::ostream&, const LatticeOperator<std::complex<double>>&);

}  // namespace wegnerlab
