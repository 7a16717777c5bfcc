#include "dualrep/operator_algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace dualrep {

namespace {
using Complex = std::complex<double>;

void require_same_dim(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw std::invalid_argument("operator dimensions do not match");
}

void require_hermitian(const OperatorMatrix& h, const char* what) {
  double scale = std::max(1.0, h.norm());
  if (hermiticity_defect(h) > 1e-10 * scale)
    throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
}
}  // namespace

double hermiticity_defect(const OperatorMatrix& a) {
  return (a - a.adjoint()).norm();
}

DensityOperator DensityOperator::create(OperatorMatrix rho, bool pure) {
  if (rho.rows() != rho.cols() || rho.rows() < 2)
    throw std::invalid_argument("DensityOperator: dim must be >= 2");
  const double scale = rho.norm();
  if (hermiticity_defect(rho) > 1e-12 * scale)
    throw std::invalid_argument("DensityOperator: not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > 1e-12 || std::abs(rho.trace().imag()) > 1e-12)
    throw std::invalid_argument("DensityOperator: trace must be 1");
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12)
    throw std::invalid_argument("DensityOperator: negative eigenvalue");
  if (pure && (rho * rho - rho).norm() > 1e-10)
    throw std::invalid_argument("DensityOperator: purity flag set but rho^2 != rho");
  DensityOperator out;
  out.matrix = std::move(rho);
  out.purity_flag = pure;
  return out;
}

DensityOperator density_from_state(const StateVector& v) {
  double nrm = v.norm();
  if (!(nrm > 0.0)) throw std::invalid_argument("density_from_state: zero vector");
  StateVector u = v / nrm;
  return DensityOperator::create(u * u.adjoint(), true);
}

LadderBasis::LadderBasis(int dim_, double mass_, double omega_)
    : dim(dim_), mass(mass_), omega(omega_) {
  if (dim < 2) throw std::invalid_argument("LadderBasis: dim must be >= 2");
  if (!(mass > 0.0) || !(omega > 0.0))
    throw std::invalid_argument("LadderBasis: mass and omega must be positive");
  OperatorMatrix a = OperatorMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  const OperatorMatrix adag = a.adjoint();
  const double x_scale = 1.0 / std::sqrt(2.0 * mass * omega);
  const double p_scale = std::sqrt(mass * omega / 2.0);
  X = x_scale * (a + adag);
  P = Complex(0.0, 1.0) * p_scale * (adag - a);
}

StateVector LadderBasis::coherent_state(Complex alpha) const {
  StateVector v(dim);
  // c_n = alpha^n / sqrt(n!) up to normalization; normalized over the
  // truncated ladder.
  Complex c(1.0, 0.0);
  for (int n = 0; n < dim; ++n) {
    v[n] = c;
    c *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  return v / v.norm();
}

PolynomialHamiltonian PolynomialHamiltonian::kinetic(double mass) {
  PolynomialHamiltonian h;
  h.terms.push_back({1.0 / (2.0 * mass), 0, 2});
  return h;
}

PolynomialHamiltonian PolynomialHamiltonian::harmonic(double mass, double stiffness) {
  PolynomialHamiltonian h = kinetic(mass);
  h.terms.push_back({0.5 * stiffness, 2, 0});
  return h;
}

PolynomialHamiltonian PolynomialHamiltonian::linear(double mass, double slope) {
  PolynomialHamiltonian h = kinetic(mass);
  h.terms.push_back({slope, 1, 0});
  return h;
}

PolynomialHamiltonian PolynomialHamiltonian::cubic(double mass, double strength) {
  PolynomialHamiltonian h = kinetic(mass);
  h.terms.push_back({strength, 3, 0});
  return h;
}

OperatorMatrix PolynomialHamiltonian::realize(const LadderBasis& basis) const {
  OperatorMatrix h = OperatorMatrix::Zero(basis.dim, basis.dim);
  for (const auto& term : terms) {
    if (term.x_power < 0 || term.p_power < 0)
      throw std::invalid_argument("PolynomialHamiltonian: negative exponent");
    OperatorMatrix m = OperatorMatrix::Identity(basis.dim, basis.dim);
    for (int k = 0; k < term.x_power; ++k) m = m * basis.X;
    for (int n = 0; n < term.p_power; ++n) m = m * basis.P;
    h += term.coeff * m;
  }
  return h;
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a, b);
  return a * b - b * a;
}

OperatorMatrix anticommutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a, b);
  return a * b + b * a;
}

OperatorMatrix heisenberg_evolve(const OperatorMatrix& a, const OperatorMatrix& h,
                                 double t) {
  require_same_dim(a, h);
  require_hermitian(h, "heisenberg_evolve");
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(h);
  const auto& u = es.eigenvectors();
  Eigen::VectorXcd phases(h.rows());
  for (int i = 0; i < h.rows(); ++i)
    phases[i] = std::exp(Complex(0.0, es.eigenvalues()[i] * t));
  // exp(iHt) A exp(-iHt)
  OperatorMatrix left = u * phases.asDiagonal() * u.adjoint();
  OperatorMatrix right = u * phases.conjugate().asDiagonal() * u.adjoint();
  return left * a * right;
}

OperatorMatrix liouville_rhs(const OperatorMatrix& h, const DensityOperator& rho) {
  require_same_dim(h, rho.matrix);
  require_hermitian(h, "liouville_rhs");
  return Complex(0.0, -1.0) * commutator(h, rho.matrix);
}

namespace {
// Powers X^0..X^m (resp. P) cached for the derivative sums.
std::vector<OperatorMatrix> powers(const OperatorMatrix& m, int max_power) {
  std::vector<OperatorMatrix> p(max_power + 1);
  p[0] = OperatorMatrix::Identity(m.rows(), m.cols());
  for (int k = 1; k <= max_power; ++k) p[k] = p[k - 1] * m;
  return p;
}
}  // namespace

OperatorCurrents operator_derivatives(const DensityOperator& rho,
                                      const PolynomialHamiltonian& h,
                                      const LadderBasis& basis) {
  if (rho.dim() != basis.dim)
    throw std::invalid_argument("operator_derivatives: rho/basis dimension mismatch");
  int kmax = 0, nmax = 0;
  for (const auto& t : h.terms) {
    if (t.x_power < 0 || t.p_power < 0)
      throw std::invalid_argument("operator_derivatives: negative exponent");
    kmax = std::max(kmax, t.x_power);
    nmax = std::max(nmax, t.p_power);
  }
  const auto xp = powers(basis.X, kmax);
  const auto pp = powers(basis.P, nmax);
  const int d = basis.dim;
  OperatorMatrix dX = OperatorMatrix::Zero(d, d);
  OperatorMatrix dP = OperatorMatrix::Zero(d, d);
  for (const auto& t : h.terms) {
    const int k = t.x_power, n = t.p_power;
    for (int j = 0; j < k; ++j)
      dX += t.coeff * (xp[k - 1 - j] * pp[n] * rho.matrix * xp[j]);
    for (int j = 0; j < n; ++j)
      dP += t.coeff * (pp[n - 1 - j] * rho.matrix * xp[k] * pp[j]);
  }
  return {dP, -dX};  // J_X = d/dP, J_P = -d/dX
}

std::vector<DensityOperator> evolve_density_series(const OperatorMatrix& h,
                                                   const DensityOperator& rho0,
                                                   const std::vector<double>& times) {
  require_same_dim(h, rho0.matrix);
  require_hermitian(h, "evolve_density_series");
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(h);
  const auto& u = es.eigenvectors();
  const OperatorMatrix rho_eig = u.adjoint() * rho0.matrix * u;
  std::vector<DensityOperator> series;
  series.reserve(times.size());
  for (double t : times) {
    Eigen::VectorXcd phases(h.rows());
    for (int i = 0; i < h.rows(); ++i)
      phases[i] = std::exp(Complex(0.0, -es.eigenvalues()[i] * t));
    OperatorMatrix rho_t =
        u * (phases.asDiagonal() * rho_eig * phases.conjugate().asDiagonal()) *
        u.adjoint();
    // Evolution preserves the constructor invariants up to roundoff; symmetrize
    // to keep the Hermiticity check well inside tolerance.
    rho_t = 0.5 * (rho_t + rho_t.adjoint().eval());
    rho_t /= rho_t.trace().real();
    series.push_back(DensityOperator::create(std::move(rho_t), rho0.purity_flag));
  }
  return series;
}

double operator_liouville_residual(const std::vector<DensityOperator>& rho_series,
                                   const std::vector<double>& times,
                                   const PolynomialHamiltonian& h,
                                   const LadderBasis& basis) {
  if (rho_series.size() < 3 || times.size() != rho_series.size())
    throw std::invalid_argument(
        "operator_liouville_residual: need >= 3 matching time samples");
  const int d = basis.dim;
  const int interior = d - 2;

  // Truncate (and re-normalize) each slice into the evaluation basis.
  std::vector<OperatorMatrix> rho(rho_series.size());
  for (std::size_t i = 0; i < rho_series.size(); ++i) {
    if (rho_series[i].dim() < d)
      throw std::invalid_argument(
          "operator_liouville_residual: series dimension below basis dimension");
    OperatorMatrix block = rho_series[i].matrix.topLeftCorner(d, d);
    rho[i] = block / block.trace().real();
  }

  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < rho.size(); ++i) {
    const double dt_m = times[i] - times[i - 1];
    const double dt_p = times[i + 1] - times[i];
    if (!(dt_m > 0.0) || !(dt_p > 0.0))
      throw std::invalid_argument("operator_liouville_residual: times not ascending");
    OperatorMatrix drho_dt = (rho[i + 1] - rho[i - 1]) / (dt_m + dt_p);
    DensityOperator rho_i;
    rho_i.matrix = rho[i];
    rho_i.purity_flag = false;
    auto currents = operator_derivatives(rho_i, h, basis);
    OperatorMatrix residual = Complex(0.0, 1.0) * drho_dt +
                              commutator(currents.J_X, basis.P) -
                              commutator(currents.J_P, basis.X);
    worst = std::max(worst, residual.topLeftCorner(interior, interior).norm());
  }
  return worst;
}

}  // namespace dualrep
