#pragma once

#include "dualrep/grid.hpp"
#include "dualrep/potential.hpp"

namespace dualrep {

struct EvolutionResult {
  WaveField field;
  double dt = 0.0;
  int method_order = 2;
  /// Set when amplitude reaches the domain boundary (relevant for the cubic
  /// potential, which is unbounded below).
  bool boundary_contamination = false;
  double max_norm_drift = 0.0;
};

/// Strang-split evolution of a normalized position-representation slice
/// under H = p^2/2m + V(x): half kick, spectral drift, half kick. Unitary
/// per step to roundoff; global error O(dt^2). Slices are stored every
/// `store_every` steps (plus the initial one).
EvolutionResult split_step_evolve(const ArrayXcd& psi0, const Grid1D& grid,
                                  const PotentialSpec& potential, double dt,
                                  int n_steps, int store_every = 1,
                                  double t0 = 0.0);

/// Closed-form free Gaussian packet (mean momentum zero, initial width
/// delta_x) in either representation at time t. Rejects grids whose
/// boundary amplitude exceeds 1e-12 of the peak.
ArrayXcd analytic_gaussian(Rep rep, double delta_x, double mass, double t,
                           const Grid1D& grid);

/// Spreading width D(t) = dx^2 + t^2/(4 m^2 dx^2) of the free packet.
double gaussian_spread(double delta_x, double mass, double t);

/// Harmonic oscillator ground state on a position grid; requires the width
/// (m omega)^{-1/2} to be resolved by at least 16 points.
ArrayXcd harmonic_ground(double mass, double stiffness, const Grid1D& grid);

/// Coherent state of the oscillator displaced by x0 at time t (exact
/// solution): Gaussian centred on the classical orbit with uniform phase
/// gradient p_c(t).
ArrayXcd harmonic_coherent(double mass, double stiffness, double x0, double t,
                           const Grid1D& grid);
double coherent_center(double mass, double stiffness, double x0, double t);
double coherent_momentum(double mass, double stiffness, double x0, double t);

/// Stationary zero-energy state of V = a x: psi proportional to Ai(A x),
/// A = (2 m a)^{1/3}. The non-normalizable oscillatory tail is rolled off
/// with a smooth window over the leftmost `taper_fraction` of the grid and
/// the state is normalized on the window.
ArrayXcd airy_stationary(double a, double mass, const Grid1D& grid,
                         double taper_fraction = 0.1);

/// Incident / reflected components of the Airy state at position x:
/// e^{-2 pi i/3} Ai(A x e^{-2 pi i/3}) and e^{+2 pi i/3} Ai(A x e^{+2 pi i/3}).
/// Their sum is -Ai(A x).
std::pair<Complex, Complex> airy_components(double a, double mass, double x);

/// <H> of a position-representation slice (kinetic part evaluated
/// spectrally).
double expectation_energy(const ArrayXcd& psi, const Grid1D& grid,
                          const PotentialSpec& potential);

}  // namespace dualrep
