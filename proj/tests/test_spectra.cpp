#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "wegnerlab/instances.hpp"
#include "wegnerlab/operators.hpp"
#include "wegnerlab/spectra.hpp"
#include "wegnerlab/suites.hpp"

using namespace wegnerlab;

namespace {

SpectralData<double> diag_spectrum(std::initializer_list<double> d, bool keep = true) {
  Eigen::VectorXd v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return eigensolve_matrix<double>(v.asDiagonal().toDenseMatrix(), keep);
}

}  // namespace

TEST_CASE("eigensolve ordering and invariants") {
  const auto id = eigensolve_matrix<double>(Eigen::MatrixXd::Identity(5, 5), false);
  CHECK((id.eigenvalues.array() == 1.0).all());
  const auto d = diag_spectrum({3, 1, 2});
  CHECK(d.eigenvalues(0) == 1.0);
  CHECK(d.eigenvalues(1) == 2.0);
  CHECK(d.eigenvalues(2) == 3.0);

  for (int seed = 0; seed < 5; ++seed) {
    CounterStream s(static_cast<std::uint64_t>(seed));
    const Eigen::MatrixXcd h = random_hermitian(40, 3.0, s);
    const auto sd = eigensolve_matrix<std::complex<double>>(h, true);
    CHECK(std::is_sorted(sd.eigenvalues.data(), sd.eigenvalues.data() + sd.dim()));
    CHECK(spectral_residual(h, sd) <= 1e-9);
    CHECK(orthonormality_defect(sd) <= 1e-9);
  }
  const auto no_vectors = eigensolve_matrix<double>(Eigen::MatrixXd::Identity(2, 2), false);
  CHECK_THROWS_WITH_AS(no_vectors.vectors(), doctest::Contains("VectorsNotRetained"), Error);
  CHECK_THROWS_WITH_AS(eigensolve_matrix<double>(Eigen::MatrixXd::Identity(10, 10), false, 8),
                       doctest::Contains("DimensionExceeded"), Error);
}

TEST_CASE("counting function and interval trace conventions") {
  const auto d = diag_spectrum({1, 2, 3}, false);
  CHECK(counting_function(d, 0.5) == 0);
  CHECK(counting_function(d, 2.0) == 2);
  CHECK(counting_function(d, 3.0) == 3);
  CHECK(interval_trace(d, Interval{1, 2}) == 2);
  CHECK(interval_trace(d, Interval{1.5, 1.7}) == 0);
  CHECK(interval_trace(d, Interval{2.5, 2.0}) == 0);
  // additivity across a non-eigenvalue split point
  const auto sd = eigensolve(build_background<double>(BoxSpec{1, 16, 1}, {}), false);
  for (double b : {0.3, 1.1, 2.9}) {
    const Index right = counting_function(sd, 3.5) - counting_function(sd, b);
    CHECK(interval_trace(sd, Interval{0.0, b}) + right == interval_trace(sd, Interval{0.0, 3.5}));
  }
  CHECK(counting_function(sd, sd.eigenvalues(sd.dim() - 1)) == sd.dim());
}

TEST_CASE("projector quadratic forms") {
  const auto sd = eigensolve(build_background<double>(BoxSpec{1, 12, 1}, {}), true);
  const Eigen::VectorXd v3 = sd.vectors().col(3) * 2.0;
  const double l3 = sd.eigenvalues(3);
  CHECK(projector_quadratic_form(sd, Interval{l3 - 1e-9, l3 + 1e-9}, v3) == doctest::Approx(4.0));
  // eigenvalue 0 is simple, far from l3
  CHECK(projector_quadratic_form(sd, Interval{-1.0, 1e-6}, v3) == doctest::Approx(0.0).epsilon(1e-12));

  CounterStream s(5);
  const Eigen::VectorXd phi = random_unit_vector(12, s).real() * 3.0;
  CHECK(projector_quadratic_form(sd, Interval{-10, 10}, phi) == doctest::Approx(phi.squaredNorm()));
}

TEST_CASE("interval trace equals the projector trace over a basis") {
  CounterStream s(8);
  const Eigen::MatrixXcd h = random_hermitian(128, 2.0, s);
  const auto sd = eigensolve_matrix<std::complex<double>>(h, true);
  for (Interval iv : {Interval{-1.0, 0.5}, Interval{0.1, 0.2}, Interval{-5, 5}}) {
    double sum = 0.0;
    for (Index k = 0; k < 128; ++k) sum += projector_quadratic_form(sd, iv, Eigen::VectorXcd::Unit(128, k).eval());
    CHECK(std::abs(sum - static_cast<double>(interval_trace(sd, iv))) <= 1e-8);
  }
}

TEST_CASE("unique continuation constant") {
  const BoxSpec box{1, 8, 4};
  const auto sd = eigensolve(build_background<double>(box, {}), true);
  CHECK(ucp_constant(sd, Interval{-1, 5}, Eigen::VectorXd::Ones(32)) == doctest::Approx(1.0));
  CHECK(ucp_constant(sd, Interval{-1, 5}, Eigen::VectorXd::Zero(32)) == doctest::Approx(0.0));
  CHECK_THROWS_WITH_AS(ucp_constant(sd, Interval{-3, -2}, Eigen::VectorXd::Ones(32)),
                       doctest::Contains("EmptyProjector"), Error);

  std::vector<double> cs;
  for (int L : {8, 16, 32}) cs.push_back(ucp_bottom_band(L, 4, PotentialSpec{}));
  const auto [lo, hi] = std::minmax_element(cs.begin(), cs.end());
  CHECK(*lo > 0.0);
  CHECK(*hi / *lo < 2.0);
}

TEST_CASE("interval pairs") {
  const IntervalPair ip = IntervalPair::make({1.0, 1.5}, {0.5, 2.5}, 1.0, 0.0);
  CHECK(ip.d_gap == doctest::Approx(0.5));
  // [1 + (M + delta_+)/d]^2
  CHECK(ip.k0() == doctest::Approx(std::pow(1.0 + 2.5 / 0.5, 2)));
  CHECK_THROWS_AS(IntervalPair::make({1.0, 1.5}, {1.0, 2.5}, 1.0, 0.0), Error);
  CHECK_THROWS_AS(IntervalPair::make({1.0, 3.0}, {0.5, 2.5}, 1.0, 0.0), Error);
  CHECK_THROWS_WITH_AS(IntervalPair::make({1.0, 1.5}, {0.5, 2.5}, 0.5, -1.0), doctest::Contains("ShiftTooSmall"),
                       Error);
}

TEST_CASE("eigenvalue CSV export") {
  std::ostringstream out;
  write_eigenvalues_csv(out, Eigen::Vector2d(0.5, 2.0));
  CHECK(out.str() == "index,eigenvalue\n0,0.5\n1,2\n");
}
