#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace dualrep {

using OperatorMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

/// Positive unit-trace operator; pure states are idempotent projectors.
struct DensityOperator {
  OperatorMatrix matrix;
  bool purity_flag = false;

  int dim() const { return static_cast<int>(matrix.rows()); }

  /// Validates hermiticity, unit trace, positivity and (if pure) idempotency.
  static DensityOperator create(OperatorMatrix rho, bool pure);
};

/// Projector |v><v| / <v|v>.
DensityOperator density_from_state(const StateVector& v);

/// Truncated harmonic-ladder realization of X and P. The canonical
/// commutator [X, P] = i holds exactly on the top-left (dim-1) block; the
/// corner element is corrupted by truncation.
struct LadderBasis {
  int dim = 0;
  double mass = 1.0;
  double omega = 1.0;
  OperatorMatrix X;
  OperatorMatrix P;

  LadderBasis(int dim, double mass, double omega);

  /// Normalized truncation of the coherent state |alpha>.
  StateVector coherent_state(std::complex<double> alpha) const;
};

/// H = sum_t coeff * X^k P^n, stored in X-then-P order. Mixed orderings
/// (e.g. X rho P monomials) are not representable and not supported.
struct PolynomialHamiltonian {
  struct Term {
    double coeff = 0.0;
    int x_power = 0;
    int p_power = 0;
  };
  std::vector<Term> terms;

  static PolynomialHamiltonian kinetic(double mass);           // P^2 / 2m
  static PolynomialHamiltonian harmonic(double mass, double stiffness);
  static PolynomialHamiltonian linear(double mass, double slope);      // P^2/2m + a X
  static PolynomialHamiltonian cubic(double mass, double strength);    // P^2/2m + A X^3

  OperatorMatrix realize(const LadderBasis& basis) const;
};

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix anticommutator(const OperatorMatrix& a, const OperatorMatrix& b);

/// exp(iHt) A exp(-iHt); H must be Hermitian.
OperatorMatrix heisenberg_evolve(const OperatorMatrix& a, const OperatorMatrix& h,
                                 double t);

/// (1/i)[H, rho]; Hermitian for Hermitian inputs.
OperatorMatrix liouville_rhs(const OperatorMatrix& h, const DensityOperator& rho);

/// Operator-valued currents J_X = d(rho H)/dP, J_P = -d(rho H)/dX where the
/// derivative of rho X^k P^n is the symmetrized non-commutative rule
///   d/dX = sum_{j<k} X^{k-1-j} P^n rho X^j,  d/dP = sum_{j<n} P^{n-1-j} rho X^k P^j,
/// extended by zero for k = 0 (resp. n = 0).
struct OperatorCurrents {
  OperatorMatrix J_X;
  OperatorMatrix J_P;
};
OperatorCurrents operator_derivatives(const DensityOperator& rho,
                                      const PolynomialHamiltonian& h,
                                      const LadderBasis& basis);

/// Unitary time series rho(t_i) = U(t_i) rho0 U(t_i)^dagger under a
/// Hermitian matrix Hamiltonian, usually at a guard dimension larger than
/// the basis the residual is evaluated in.
std::vector<DensityOperator> evolve_density_series(const OperatorMatrix& h,
                                                   const DensityOperator& rho0,
                                                   const std::vector<double>& times);

/// Interior norm of i d(rho)/dt + [J_X, P] - [J_P, X] over the series,
/// evaluated in `basis` (series slices may live in a larger guard basis and
/// are truncated and re-normalized). The last two rows/columns, where
/// truncation breaks the canonical commutator, are excluded. Returns the
/// maximum over the interior time samples.
double operator_liouville_residual(const std::vector<DensityOperator>& rho_series,
                                   const std::vector<double>& times,
                                   const PolynomialHamiltonian& h,
                                   const LadderBasis& basis);

/// Frobenius-norm Hermiticity defect ||A - A^dagger||.
double hermiticity_defect(const OperatorMatrix& a);

}  // namespace dualrep
