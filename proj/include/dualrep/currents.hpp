#pragma once

#include "dualrep/grid.hpp"
#include "dualrep/potential.hpp"

#include <vector>

namespace dualrep {

/// Real scalar field sampled like a WaveField; the grid kind identifies the
/// representation.
struct RealField {
  Grid1D grid;
  std::vector<double> times;
  ArrayXXd values;  // [time x grid]

  ArrayXd slice(int t) const { return values.row(t).transpose(); }
  int n_times() const { return static_cast<int>(times.size()); }
};

using CurrentField = RealField;
using QuantumPotentialField = RealField;

/// P(q, t) = |psi|^2.
RealField density_field(const WaveField& field);

/// Position-representation probability current j = Im(psi* psi')/m
/// (division-free, so finite through nodes); equals R^2 S'/m off nodes.
ArrayXd current_x(const ArrayXcd& psi, const Grid1D& grid, double mass);
CurrentField current_x(const WaveField& field, double mass);

/// Momentum-representation current from the operator form
/// j_p = -<p| d(rho V(X))/dX |p> with X acting as i d/dp, expanded for
/// polynomial potentials (free/linear/harmonic/cubic). Tabulated potentials
/// have no closed expansion and are rejected.
ArrayXd current_p(const ArrayXcd& phi, const Grid1D& grid,
                  const PotentialSpec& potential);
CurrentField current_p(const WaveField& field, const PotentialSpec& potential);

/// Representation-appropriate quantum potential:
///   position:  -R''/(2 m R)
///   momentum:  0 for free/linear, -(K/2) R''/R for harmonic, and for the
///              cubic the three extra phase-equation terms
///              3A (R''/R) S' + 3A (R'/R) S'' + A S'''.
/// Masked samples are NaN.
ArrayXd quantum_potential(const ArrayXcd& psi, const Grid1D& grid,
                          const PotentialSpec& potential);
QuantumPotentialField quantum_potential(const WaveField& field,
                                        const PotentialSpec& potential);

/// L2 norm (grid measure) of dP/dt + dj/dq at each interior time sample.
std::vector<double> continuity_residual(const RealField& density,
                                        const CurrentField& current);

/// Polar form of a whole field with slice phases aligned in time (each
/// slice's unwrapped S is shifted by a multiple of 2 pi so consecutive
/// slices agree at the joint amplitude peak).
struct PolarSeries {
  Grid1D grid;
  std::vector<double> times;
  ArrayXXd R;
  ArrayXXd S;
  BoolArray ever_masked;  // per grid point, masked in any slice

  int n_times() const { return static_cast<int>(times.size()); }
};
PolarSeries build_polar_series(const WaveField& field);

/// L2 norm of the phase-equation left-hand side per interior time:
///   position:  dS/dt + S'^2/(2m) + V(x) - R''/(2 m R)
///   momentum:  dS/dt + p^2/(2m) + potential-specific beable and quantum
///              terms (free/linear/harmonic/cubic).
/// Evaluated where the amplitude supports the 1/R terms
/// (R >= 1e-2 max R in every slice).
std::vector<double> phase_equation_residual(const WaveField& field,
                                            const PotentialSpec& potential);

/// E(q) = -dS/dt for a stationary state (|psi| time-independent within
/// 1e-8; rejected otherwise). Spatially uniform for true eigenstates.
ArrayXd energy_from_phase(const WaveField& field);

/// Ingredients of the comparison between the direct operator evaluation of
/// the cubic-potential momentum current and its printed polar form.
struct CubicCurrentComparison {
  ArrayXd p;
  ArrayXd j_operator;        // -<p| d(rho A X^3)/dX |p>
  ArrayXd j_polar;           // -R^2 (dV/dx at x_r) + A (2 R R'' - R'^2)
  ArrayXd j_printed_polar;   // -R^2 (dV/dx at x_r)^2 + A (2 R R'' - R'^2)
};
CubicCurrentComparison cubic_current_comparison(const ArrayXcd& phi,
                                                const Grid1D& grid,
                                                const PotentialSpec& potential);

}  // namespace dualrep
