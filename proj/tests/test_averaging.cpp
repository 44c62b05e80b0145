#include "doctest.h"

#include <cmath>
#include <numbers>

#include "wegnerlab/averaging.hpp"
#include "wegnerlab/instances.hpp"
#include "wegnerlab/operators.hpp"

using namespace wegnerlab;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd scalar(double x) { return Eigen::MatrixXcd::Constant(1, 1, x); }

// Direct summation of sup_y b/((y+n+kappa)^2+b^2) with the maximizer found by
// a dense scan in y, then the integral-comparison tail.
double ell_scan(double kappa, double b, int n_max) {
  double sum = 0.0;
  for (int n = -n_max; n <= n_max; ++n) {
    double best = 0.0;
    for (int k = 0; k <= 2000; ++k) {
      const double x = k / 2000.0 + n + kappa;
      best = std::max(best, b / (x * x + b * b));
    }
    sum += best;
  }
  return sum;
}

bool overlap(const CertifiedSum& a, const CertifiedSum& b, double tol = 0.0) {
  return a.lower() <= b.upper() + tol && b.lower() <= a.upper() + tol;
}

}  // namespace

TEST_CASE("lattice sum l(0;1) = 1 + pi coth pi") {
  const double oracle = 1.0 + kPi / std::tanh(kPi);
  const CertifiedSum s = ell_value(0.0, 1.0);
  CHECK(std::abs(s.partial_sum - oracle) < 1e-3);
  CHECK(s.lower() <= oracle);
  CHECK(s.upper() >= oracle);
  CHECK(s.certification == SupCertification::ClosedForm);
  CHECK(s.upper() <= ell_bound(1.0));
  CHECK(ell_bound(1.0) == doctest::Approx(2.0 * kPi));
}

TEST_CASE("lattice sum agrees with a direct scan") {
  for (double kappa : {0.0, 0.25, 0.7}) {
    for (double b : {0.5, 2.0}) {
      const CertifiedSum s = ell_value(kappa, b, 400);
      const double scan = ell_scan(kappa, b, 400);
      // the scan underestimates each sup by at most the grid error
      CHECK(scan <= s.partial_sum + 1e-12);
      CHECK(scan >= s.partial_sum - 1e-4);
    }
  }
}

TEST_CASE("lattice sum is Z-periodic in kappa and respects pi(1 + 1/b)") {
  const CertifiedSum a = ell_value(0.3, 1.0), b = ell_value(1.3, 1.0);
  CHECK(overlap(a, b));
  CHECK(ell_value(0.0, 100.0).upper() <= kPi * (1.0 + 1.0 / 100.0));
  for (int i = 0; i <= 10; ++i) {
    for (double bb : {0.1, 0.5, 1.0, 2.0, 10.0}) CHECK(ell_value(0.1 * i, bb).upper() <= ell_bound(bb));
  }
  CHECK_THROWS_AS(ell_value(0.0, 0.0), Error);
  CHECK_THROWS_AS(ell_value(0.0, -1.0), Error);
}

TEST_CASE("scalar averaging sum reduces to the lattice sum") {
  for (double a : {0.0, 0.4, -2.3}) {
    const CertifiedSum s = averaging_sum(scalar(a), scalar(1.0), Eigen::VectorXcd::Ones(1));
    const CertifiedSum ell = ell_value(a, 1.0);
    CHECK(overlap(s, ell));
    CHECK(s.upper() <= averaging_bound(scalar(1.0), Eigen::VectorXcd::Ones(1)));
    CHECK(s.upper() - s.lower() < 0.05);
  }
  CHECK(averaging_bound(scalar(1.0), Eigen::VectorXcd::Ones(1)) == doctest::Approx(2.0 * kPi));
}

TEST_CASE("averaging sum edge cases") {
  CounterStream s(3);
  const Eigen::MatrixXcd a = random_hermitian(6, 1.0, s);
  const Eigen::VectorXcd phi = random_unit_vector(6, s);
  const CertifiedSum zero = averaging_sum(a, Eigen::MatrixXcd::Zero(6, 6), phi, 50);
  CHECK(zero.partial_sum == 0.0);
  Eigen::MatrixXcd neg = Eigen::MatrixXcd::Identity(6, 6);
  neg(0, 0) = -0.1;
  CHECK_THROWS_WITH_AS(averaging_sum(a, neg, phi), doctest::Contains("NotPositiveSemidefinite"), Error);
  // singular B: only the partial sum is certified
  const Eigen::MatrixXcd b = random_psd_rank(6, 3, 1.0, s);
  const CertifiedSum part = averaging_sum(a, b, phi, 100);
  CHECK_FALSE(part.tail_available);
  CHECK(std::isinf(part.upper()));
  CHECK(part.lower() <= averaging_bound(b, phi));
}

TEST_CASE("random averaging instances stay below the bound") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterStream s(derive_seed({seed, 77}));
    const Eigen::MatrixXcd a = random_hermitian(16, 2.0, s);
    const Eigen::MatrixXcd b = random_psd(16, 0.01, 1.0, s);
    const Eigen::VectorXcd phi = random_unit_vector(16, s);
    const CertifiedSum sum = averaging_sum(a, b, phi);
    CHECK(sum.tail_available);
    CHECK(sum.upper() <= averaging_bound(b, phi));
    CHECK(averaging_bound(b, phi) <= 2.0 * kPi + 1e-12);
  }
}

TEST_CASE("dissipative sum: scalar Lorentzian reduction and sign") {
  for (double lambda : {0.25, 0.5, 1.0}) {
    const CertifiedSum d = dissipative_sum(scalar(0.3), scalar(0.0), scalar(1.0), Eigen::VectorXcd::Ones(1), lambda);
    const CertifiedSum ell = ell_value(0.3, lambda, 200);
    CHECK(d.lower() <= ell.lower() + 1e-12);
    CHECK(d.lower() + d.grid_slack >= ell.lower() - 1e-9);
    CHECK(d.lower() <= dissipative_bound(lambda, Eigen::VectorXcd::Ones(1)));
    CHECK(dissipative_bound(lambda, Eigen::VectorXcd::Ones(1)) == doctest::Approx(kPi * (1 + 1 / lambda)));
  }
  CHECK(dissipative_sum(scalar(0.3), scalar(0.2), scalar(1.0), Eigen::VectorXcd::Zero(1), 0.5).partial_sum == 0.0);
  CHECK_THROWS_AS(dissipative_sum(scalar(0.3), scalar(0.0), scalar(1.0), Eigen::VectorXcd::Ones(1), 0.0), Error);
  CHECK_THROWS_AS(dissipative_sum(scalar(0.3), scalar(-1.0), scalar(1.0), Eigen::VectorXcd::Ones(1), 0.5), Error);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterStream s(derive_seed({seed, 78}));
    const Eigen::MatrixXcd a0 = random_hermitian(16, 2.0, s);
    const Eigen::MatrixXcd g = random_psd(16, 0.0, 1.0, s);
    const Eigen::MatrixXcd b = random_psd(16, 0.0, 1.0, s);
    const Eigen::VectorXcd phi = random_unit_vector(16, s);
    const CertifiedSum d = dissipative_sum(a0, g, b, phi, 0.5);
    CHECK(d.min_term >= -1e-12);
    CHECK(d.lower() <= 3.0 * kPi);
  }
}

TEST_CASE("PSD square root") {
  CounterStream s(12);
  const Eigen::MatrixXcd b = random_psd_rank(8, 5, 1.0, s);
  const Eigen::MatrixXcd r = psd_sqrt(b);
  CHECK((r * r - b).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r - r.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("arctan projector inequality") {
  const double e0 = 0.7, eps = 0.1;
  auto one = [](double l) {
    Eigen::MatrixXcd h(1, 1);
    h(0, 0) = l;
    return eigensolve_matrix<std::complex<double>>(h, true);
  };
  const Eigen::VectorXcd phi = Eigen::VectorXcd::Ones(1);
  const ArctanCheck endpoint = arctan_projector_check(one(e0), phi, e0, eps);
  CHECK(std::abs(endpoint.lhs - kPi / 4) <= 1e-12);
  CHECK(std::abs(endpoint.lhs - endpoint.rhs) <= 1e-12);
  const ArctanCheck mid = arctan_projector_check(one(e0 + eps / 2), phi, e0, eps);
  CHECK(mid.lhs == doctest::Approx(2.0 * std::atan(0.5)));
  CHECK(mid.lhs == doctest::Approx(0.9273).epsilon(1e-4));
  CHECK(mid.rhs == doctest::Approx(kPi / 4));
  const ArctanCheck far = arctan_projector_check(one(e0 + 50.0), phi, e0, eps);
  CHECK(far.rhs == 0.0);
  CHECK(far.lhs >= 0.0);
  CHECK_THROWS_AS(arctan_projector_check(one(e0), phi, e0, 0.0), Error);

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CounterStream s(derive_seed({seed, 79}));
    const Index d = 1 + static_cast<Index>(seed % 64);
    const auto sd = eigensolve_matrix<std::complex<double>>(random_hermitian(d, 2.0, s), true);
    const Eigen::VectorXcd p = random_unit_vector(d, s);
    const ArctanCheck c = arctan_projector_check(sd, p, -1.0 + 2.0 * s.uniform01(), 0.01 + s.uniform01());
    CHECK(c.lhs >= c.rhs - 1e-10);
  }
}

TEST_CASE("Lorentzian energy integral: quadrature against arctan form") {
  const Eigen::Vector3d lam(0.1, 0.55, 2.0);
  const Eigen::Vector3d w(0.2, 0.5, 0.3);
  for (double eps : {0.01, 0.1, 1.0}) {
    double oracle = 0.0;
    for (int k = 0; k < 3; ++k) {
      oracle += w(k) * (std::atan((0.5 + eps - lam(k)) / eps) - std::atan((0.5 - lam(k)) / eps));
    }
    CHECK(lorentz_integral_closed(lam, w, 0.5, eps) == doctest::Approx(oracle).epsilon(1e-13));
    CHECK(std::abs(lorentz_integral_quadrature(lam, w, 0.5, eps) - oracle) <= 1e-6 * oracle);
  }
}

TEST_CASE("resolvent expectation: 1x1 model and lattice harness") {
  ResolventModel one{Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1), MeasureSpec::uniform(0, 1),
                     Eigen::MatrixXd(1, 0)};
  const ResolventExpectation r = resolvent_expectation(one, Eigen::VectorXd::Ones(1), 0.2, 0.1, 4000, 5);
  // the projector is the indicator of omega in [0.2, 0.3]
  CHECK(std::abs(r.projector_mean - 0.1) <= 3.0 * r.projector_stderr);
  CHECK(r.bound_8s == doctest::Approx(0.8));
  CHECK(r.bound_8s == doctest::Approx(4.0 / kPi * r.bound_2pi));
  CHECK(r.max_quadrature_error <= 1e-4);

  ResolventModel atom{Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1), MeasureSpec::atomic({{0.5, 1.0}}),
                      Eigen::MatrixXd(1, 0)};
  const ResolventExpectation a = resolvent_expectation(atom, Eigen::VectorXd::Ones(1), 0.0, 0.1, 16, 5);
  CHECK(a.projector_mean == 0.0);
  CHECK(a.bound_8s == doctest::Approx(8.0));
  CHECK_THROWS_AS(resolvent_expectation(one, Eigen::VectorXd::Ones(1), 0.2, 0.1, 1, 5), Error);

  // 1D lattice with bump potentials at every site, phi at site 32
  const BoxSpec box{1, 64, 1};
  const auto h0 = build_background<double>(box, {});
  Eigen::MatrixXd others = Eigen::MatrixXd::Zero(64, 63);
  for (Index k = 0, c = 0; k < 64; ++k) {
    if (k != 32) others(k, c++) = 1.0;
  }
  Eigen::VectorXd uj = Eigen::VectorXd::Zero(64);
  uj(32) = 1.0;
  ResolventModel lat{h0.matrix(), uj, MeasureSpec::uniform(0, 1), others};
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(64);
  phi(32) = 1.0;
  const ResolventExpectation l1 = resolvent_expectation(lat, phi, 2.0, 0.05, 100, 9, 1);
  const ResolventExpectation l3 = resolvent_expectation(lat, phi, 2.0, 0.05, 100, 9, 3);
  CHECK(l1.integral_mean <= 2.0 * kPi * 0.05 + 3.0 * l1.integral_stderr);
  CHECK(l1.projector_mean <= 8.0 * 0.05 + 3.0 * l1.projector_stderr);
  // per-realization seeds make the estimate independent of the worker count
  CHECK(l1.integral_mean == l3.integral_mean);
  CHECK(l1.projector_mean == l3.projector_mean);
}
