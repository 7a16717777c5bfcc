#pragma once

#include "dualrep/grid.hpp"

namespace dualrep {

/// V(x) for the worked scenarios plus tabulated values; carries the mass so
/// a spec fully fixes H = p^2/2m + V(x).
struct PotentialSpec {
  enum class Kind { free, linear, harmonic, cubic, tabulated };

  Kind kind = Kind::free;
  double mass = 1.0;
  double linear_slope = 0.0;    // V = a x
  double stiffness = 0.0;       // V = K x^2 / 2
  double cubic_strength = 0.0;  // V = A x^3
  ArrayXd table;                // V sampled on the evolution grid

  static PotentialSpec free_particle(double mass);
  static PotentialSpec linear(double mass, double a);
  static PotentialSpec harmonic(double mass, double K);
  static PotentialSpec cubic(double mass, double A);
  static PotentialSpec tabulated(double mass, ArrayXd values);

  /// V on the grid points.
  ArrayXd sample(const Grid1D& grid) const;
  /// dV/dx at a point (unsupported for tabulated).
  double force_gradient(double x) const;
  /// Coefficients (c1, c2, c3) of V = c1 x + c2 x^2 + c3 x^3; throws for
  /// tabulated potentials.
  std::array<double, 3> polynomial_coefficients() const;

  bool is_polynomial() const { return kind != Kind::tabulated; }
};

}  // namespace dualrep
