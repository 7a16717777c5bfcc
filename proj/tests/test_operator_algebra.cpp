#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dualrep/operator_algebra.hpp"

#include <complex>
#include <random>

using namespace dualrep;
using Cplx = std::complex<double>;

namespace {

std::mt19937 rng(421);

OperatorMatrix random_hermitian(int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  OperatorMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Cplx(g(rng), g(rng));
  return OperatorMatrix(0.5 * (m + m.adjoint()));
}

StateVector random_state(int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  StateVector v(d);
  for (int i = 0; i < d; ++i) v[i] = Cplx(g(rng), g(rng));
  return v;
}

}  // namespace

TEST_CASE("commutator basics") {
  const OperatorMatrix a = random_hermitian(6);
  CHECK(commutator(a, a).norm() == 0.0);

  const OperatorMatrix h = random_hermitian(6);
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(h);
  const DensityOperator rho = density_from_state(es.eigenvectors().col(2));
  CHECK(commutator(h, rho.matrix).norm() < 1e-13);

  OperatorMatrix wrong(4, 4);
  wrong.setZero();
  CHECK_THROWS(commutator(a, wrong));
}

TEST_CASE("ladder-basis canonical commutator on the interior block") {
  const LadderBasis basis(16, 1.0, 1.0);
  OperatorMatrix c = commutator(basis.X, basis.P);
  c -= Cplx(0.0, 1.0) * OperatorMatrix::Identity(16, 16);
  CHECK(c.topLeftCorner(15, 15).norm() < 1e-10);
  // Truncation corrupts exactly the corner element.
  CHECK(std::abs(c(15, 15)) > 1.0);
}

TEST_CASE("anticommutator identities") {
  const int d = 6;
  const DensityOperator rho = density_from_state(random_state(d));
  const double v0 = 1.7;
  const OperatorMatrix scalar = v0 * OperatorMatrix::Identity(d, d);
  CHECK((anticommutator(scalar, rho.matrix) - 2.0 * v0 * rho.matrix).norm() < 1e-13);

  CHECK(anticommutator(random_hermitian(d), OperatorMatrix::Zero(d, d)).norm() == 0.0);

  const OperatorMatrix h = random_hermitian(d);
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(h);
  for (int e = 0; e < d; ++e) {
    const DensityOperator proj = density_from_state(es.eigenvectors().col(e));
    CHECK((anticommutator(h, proj.matrix) - 2.0 * es.eigenvalues()[e] * proj.matrix)
              .norm() < 1e-10);
  }
}

TEST_CASE("density operators from states") {
  StateVector e0 = StateVector::Zero(4);
  e0[0] = 1.0;
  const DensityOperator d0 = density_from_state(e0);
  CHECK(std::abs(d0.matrix(0, 0).real() - 1.0) < 1e-15);
  CHECK(d0.matrix.norm() == doctest::Approx(1.0));

  StateVector plus = StateVector::Zero(4);
  plus[0] = plus[1] = 1.0 / std::sqrt(2.0);
  const DensityOperator dp = density_from_state(plus);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(dp.matrix(i, j) - Cplx(0.5, 0.0)) < 1e-15);

  for (int trial = 0; trial < 100; ++trial) {
    const DensityOperator rho = density_from_state(random_state(7));
    CHECK(std::abs(rho.matrix.trace().real() - 1.0) < 1e-12);
    CHECK((rho.matrix * rho.matrix - rho.matrix).norm() < 1e-10);
  }
  CHECK_THROWS(density_from_state(StateVector::Zero(5)));
}

TEST_CASE("density operator invariants enforced") {
  OperatorMatrix bad(3, 3);
  bad.setZero();
  bad(0, 1) = Cplx(0.0, 0.4);  // not Hermitian
  bad(0, 0) = 1.0;
  CHECK_THROWS(DensityOperator::create(bad, false));

  OperatorMatrix mixed = OperatorMatrix::Zero(3, 3);
  mixed(0, 0) = 0.5;
  mixed(1, 1) = 0.5;
  CHECK_NOTHROW(DensityOperator::create(mixed, false));
  CHECK_THROWS(DensityOperator::create(mixed, true));  // not idempotent
}

TEST_CASE("heisenberg evolution") {
  const int d = 8;
  // Unit Frobenius scale keeps the finite-difference step/tolerance pairing
  // (1e-4 / 1e-6) meaningful.
  OperatorMatrix h = random_hermitian(d);
  h /= h.norm();
  OperatorMatrix a = random_hermitian(d);
  a /= a.norm();

  CHECK((heisenberg_evolve(a, h, 0.0) - a).norm() < 1e-12);
  CHECK((heisenberg_evolve(h, h, 1.37) - h).norm() < 1e-11);

  // dA/dt at t = 0 equals (1/i)[A, H] within the finite-difference tolerance.
  const double step = 1e-4;
  const OperatorMatrix fd =
      (heisenberg_evolve(a, h, step) - heisenberg_evolve(a, h, -step)) / (2.0 * step);
  const OperatorMatrix expected = Cplx(0.0, -1.0) * commutator(a, h);
  CHECK((fd - expected).norm() < 1e-6);

  // Spectrum preserved.
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> before(a);
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> after(heisenberg_evolve(a, h, 0.9));
  CHECK((before.eigenvalues() - after.eigenvalues()).norm() < 1e-10);

  OperatorMatrix nonhermitian = random_hermitian(d);
  nonhermitian(0, 1) += Cplx(0.3, 0.3);
  CHECK_THROWS(heisenberg_evolve(a, nonhermitian, 1.0));
}

TEST_CASE("liouville right-hand side") {
  const int d = 8;
  const OperatorMatrix h = random_hermitian(d);
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(h);
  const DensityOperator proj = density_from_state(es.eigenvectors().col(1));
  CHECK(liouville_rhs(h, proj).norm() < 1e-12);

  const DensityOperator rho = density_from_state(random_state(d));
  CHECK(liouville_rhs(OperatorMatrix::Zero(d, d), rho).norm() == 0.0);

  const OperatorMatrix rhs = liouville_rhs(h, rho);
  CHECK(hermiticity_defect(rhs) < 1e-12);
  CHECK(std::abs(rhs.trace()) < 1e-12);

  // Finite-difference d(rho)/dt under unitary evolution.
  const double step = 1e-4;
  const auto series = evolve_density_series(h, rho, {-step, 0.0, step});
  const OperatorMatrix fd = (series[2].matrix - series[0].matrix) / (2.0 * step);
  CHECK((fd - rhs).norm() < 1e-6);
}

TEST_CASE("operator derivative rule") {
  const LadderBasis basis(24, 1.3, 0.8);
  const DensityOperator rho = density_from_state(basis.coherent_state(Cplx(0.9, 0.5)));

  SUBCASE("free particle closed form") {
    const auto c = operator_derivatives(rho, PolynomialHamiltonian::kinetic(1.3), basis);
    const OperatorMatrix expected =
        (rho.matrix * basis.P + basis.P * rho.matrix) / (2.0 * 1.3);
    CHECK((c.J_X - expected).norm() < 1e-14);  // same symbolic expansion
    CHECK(c.J_P.norm() == 0.0);
  }
  SUBCASE("linear potential closed form") {
    PolynomialHamiltonian h;
    h.terms.push_back({0.7, 1, 0});  // V = 0.7 X
    const auto c = operator_derivatives(rho, h, basis);
    CHECK((c.J_P + 0.7 * rho.matrix).norm() == 0.0);
    CHECK(c.J_X.norm() == 0.0);
  }
  SUBCASE("harmonic potential closed form") {
    PolynomialHamiltonian h;
    h.terms.push_back({0.5 * 2.2, 2, 0});  // V = (K/2) X^2, K = 2.2
    const auto c = operator_derivatives(rho, h, basis);
    const OperatorMatrix expected =
        -0.5 * 2.2 * (basis.X * rho.matrix + rho.matrix * basis.X);
    CHECK((c.J_P - expected).norm() < 1e-14);
  }
  SUBCASE("hermitian outputs for hermitian hamiltonians") {
    const auto c = operator_derivatives(
        rho, PolynomialHamiltonian::harmonic(1.3, 2.0), basis);
    CHECK(hermiticity_defect(c.J_X) < 1e-12);
    CHECK(hermiticity_defect(c.J_P) < 1e-12);
  }
  SUBCASE("negative exponents rejected") {
    PolynomialHamiltonian h;
    h.terms.push_back({1.0, -1, 0});
    CHECK_THROWS(operator_derivatives(rho, h, basis));
  }
}

TEST_CASE("heisenberg and schroedinger pictures agree on expectation values") {
  const int d = 10;
  const OperatorMatrix h = random_hermitian(d);
  const OperatorMatrix a = random_hermitian(d);
  const DensityOperator rho = density_from_state(random_state(d));
  for (double t : {0.25, 1.1, 3.7}) {
    const auto series = evolve_density_series(h, rho, {t});
    const double schro = (a * series[0].matrix).trace().real();
    const double heis = (heisenberg_evolve(a, h, t) * rho.matrix).trace().real();
    CHECK(std::abs(schro - heis) < 1e-8);
  }
}

TEST_CASE("operator current identity residual") {
  const double h_fd = 1e-4;
  const std::vector<double> times = {0.25 - h_fd, 0.25, 0.25 + h_fd};
  const LadderBasis guard(128, 1.0, 1.0);
  const DensityOperator rho =
      density_from_state(guard.coherent_state(Cplx(2.8, 0.0)));

  SUBCASE("free particle, dim 32") {
    const PolynomialHamiltonian ham = PolynomialHamiltonian::kinetic(1.0);
    const auto series = evolve_density_series(ham.realize(guard), rho, times);
    const double r32 =
        operator_liouville_residual(series, times, ham, LadderBasis(32, 1.0, 1.0));
    CHECK(r32 <= 1e-4);
  }
  SUBCASE("zero hamiltonian gives zero residual") {
    PolynomialHamiltonian zero;
    const auto series =
        evolve_density_series(OperatorMatrix::Zero(128, 128), rho, times);
    const double r =
        operator_liouville_residual(series, times, zero, LadderBasis(16, 1.0, 1.0));
    CHECK(r < 1e-13);
  }
  SUBCASE("harmonic residual strictly decreases from dim 16 to 32") {
    const PolynomialHamiltonian ham = PolynomialHamiltonian::harmonic(1.0, 2.25);
    const auto series = evolve_density_series(ham.realize(guard), rho, times);
    const double r16 =
        operator_liouville_residual(series, times, ham, LadderBasis(16, 1.0, 1.0));
    const double r32 =
        operator_liouville_residual(series, times, ham, LadderBasis(32, 1.0, 1.0));
    CHECK(r32 < r16);
  }
  SUBCASE("too few samples rejected") {
    const PolynomialHamiltonian ham = PolynomialHamiltonian::kinetic(1.0);
    const auto series = evolve_density_series(ham.realize(guard), rho, {0.0, 0.1});
    CHECK_THROWS(operator_liouville_residual(series, {0.0, 0.1}, ham,
                                             LadderBasis(32, 1.0, 1.0)));
  }
}
