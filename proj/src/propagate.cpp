#include "dualrep/propagate.hpp"

#include "dualrep/airy.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace dualrep {

namespace {
constexpr double kPi = std::numbers::pi;

ArrayXcd phase_factor(const ArrayXd& phase) {
  ArrayXcd out(phase.size());
  for (int i = 0; i < phase.size(); ++i)
    out[i] = Complex(std::cos(phase[i]), std::sin(phase[i]));
  return out;
}
}  // namespace

EvolutionResult split_step_evolve(const ArrayXcd& psi0, const Grid1D& grid,
                                  const PotentialSpec& potential, double dt,
                                  int n_steps, int store_every, double t0) {
  if (grid.kind != Rep::position)
    throw std::invalid_argument("split_step_evolve: expects a position grid");
  if (!(dt > 0.0) || n_steps < 1 || store_every < 1)
    throw std::invalid_argument("split_step_evolve: bad stepping parameters");
  require_normalized(psi0, grid, 1e-8);

  const Grid1D pgrid = grid.conjugate();
  const ArrayXd v = potential.sample(grid);
  const ArrayXcd half_kick = phase_factor(-0.5 * dt * v);
  const ArrayXd p = pgrid.coords();
  const ArrayXcd drift = phase_factor(-dt / (2.0 * potential.mass) * p.square());

  const int n_stored = n_steps / store_every + 1;
  EvolutionResult result;
  result.dt = dt;
  result.method_order = 2;
  result.field.grid = grid;
  result.field.times.reserve(n_stored);
  result.field.amplitudes.resize(n_stored, grid.n);
  result.field.times.push_back(t0);
  result.field.amplitudes.row(0) = psi0.transpose();

  // Contamination watch: outer 2% of the domain on each side.
  const int edge = std::max(1, grid.n / 50);

  ArrayXcd psi = psi0;
  int row = 1;
  for (int step = 1; step <= n_steps; ++step) {
    psi *= half_kick;
    psi = to_conjugate(psi, grid);
    psi *= drift;
    psi = to_conjugate(psi, pgrid);
    psi *= half_kick;
    if (step % store_every == 0) {
      result.field.times.push_back(t0 + step * dt);
      result.field.amplitudes.row(row++) = psi.transpose();
      const double peak = psi.abs().maxCoeff();
      const double edge_amp =
          std::max(psi.head(edge).abs().maxCoeff(), psi.tail(edge).abs().maxCoeff());
      if (edge_amp > 1e-10 * peak) result.boundary_contamination = true;
      result.max_norm_drift =
          std::max(result.max_norm_drift, std::abs(field_norm(psi, grid) - 1.0));
    }
  }
  result.field.amplitudes.conservativeResize(row, grid.n);
  result.field.times.resize(row);
  return result;
}

double gaussian_spread(double delta_x, double mass, double t) {
  return delta_x * delta_x + t * t / (4.0 * mass * mass * delta_x * delta_x);
}

ArrayXcd analytic_gaussian(Rep rep, double delta_x, double mass, double t,
                           const Grid1D& grid) {
  if (!(delta_x > 0.0)) throw std::invalid_argument("analytic_gaussian: delta_x > 0");
  if (grid.kind != rep)
    throw std::invalid_argument("analytic_gaussian: grid kind does not match rep");
  const ArrayXd q = grid.coords();
  ArrayXcd psi(grid.n);
  if (rep == Rep::momentum) {
    const double amp = std::pow(2.0 * delta_x * delta_x / kPi, 0.25);
    for (int i = 0; i < grid.n; ++i) {
      double p = q[i];
      double mag = amp * std::exp(-p * p * delta_x * delta_x);
      double ph = -p * p * t / (2.0 * mass);
      psi[i] = mag * Complex(std::cos(ph), std::sin(ph));
    }
  } else {
    const double d = gaussian_spread(delta_x, mass, t);
    const double amp = std::pow(2.0 * kPi * d, -0.25);
    const double theta = 0.5 * std::atan(t / (2.0 * mass * delta_x * delta_x));
    for (int i = 0; i < grid.n; ++i) {
      double x = q[i];
      double mag = amp * std::exp(-x * x / (4.0 * d));
      double ph = x * x * t / (8.0 * mass * delta_x * delta_x * d) - theta;
      psi[i] = mag * Complex(std::cos(ph), std::sin(ph));
    }
  }
  const double peak = psi.abs().maxCoeff();
  const double boundary = std::max(std::abs(psi[0]), std::abs(psi[grid.n - 1]));
  if (boundary > 1e-12 * peak) {
    double width = (rep == Rep::momentum) ? 1.0 / (2.0 * delta_x)
                                          : std::sqrt(gaussian_spread(delta_x, mass, t));
    std::ostringstream msg;
    msg << "analytic_gaussian: grid too narrow, need half extent >= " << 7.5 * width
        << " (boundary amplitude " << boundary / peak << " of peak)";
    throw std::invalid_argument(msg.str());
  }
  return normalized(psi, grid);
}

ArrayXcd harmonic_ground(double mass, double stiffness, const Grid1D& grid) {
  if (grid.kind != Rep::position)
    throw std::invalid_argument("harmonic_ground: expects a position grid");
  if (!(mass > 0.0) || !(stiffness > 0.0))
    throw std::invalid_argument("harmonic_ground: mass and stiffness must be positive");
  const double omega = std::sqrt(stiffness / mass);
  const double width = 1.0 / std::sqrt(mass * omega);
  if (grid.spacing > width / 16.0) {
    std::ostringstream msg;
    msg << "harmonic_ground: grid does not resolve the state; need spacing <= "
        << width / 16.0 << ", got " << grid.spacing;
    throw std::invalid_argument(msg.str());
  }
  const ArrayXd x = grid.coords();
  ArrayXcd psi = (-0.5 * mass * omega * x.square()).exp().cast<Complex>();
  return normalized(psi, grid);
}

double coherent_center(double mass, double stiffness, double x0, double t) {
  return x0 * std::cos(std::sqrt(stiffness / mass) * t);
}

double coherent_momentum(double mass, double stiffness, double x0, double t) {
  const double omega = std::sqrt(stiffness / mass);
  return -mass * omega * x0 * std::sin(omega * t);
}

ArrayXcd harmonic_coherent(double mass, double stiffness, double x0, double t,
                           const Grid1D& grid) {
  const double omega = std::sqrt(stiffness / mass);
  const double width = 1.0 / std::sqrt(mass * omega);
  if (grid.kind != Rep::position)
    throw std::invalid_argument("harmonic_coherent: expects a position grid");
  if (grid.spacing > width / 16.0)
    throw std::invalid_argument("harmonic_coherent: grid does not resolve the state");
  const double xc = coherent_center(mass, stiffness, x0, t);
  const double pc = coherent_momentum(mass, stiffness, x0, t);
  const double gamma =
      -0.5 * omega * t + 0.25 * mass * omega * x0 * x0 * std::sin(2.0 * omega * t);
  const ArrayXd x = grid.coords();
  ArrayXcd psi(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    double mag = std::exp(-0.5 * mass * omega * (x[i] - xc) * (x[i] - xc));
    double ph = pc * x[i] + gamma;
    psi[i] = mag * Complex(std::cos(ph), std::sin(ph));
  }
  return normalized(psi, grid);
}

namespace {
// Smooth compactly supported switch: 0 at s<=0, 1 at s>=1, C-infinity inside.
double planck_taper(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return 1.0 / (1.0 + std::exp(1.0 / s - 1.0 / (1.0 - s)));
}
}  // namespace

ArrayXcd airy_stationary(double a, double mass, const Grid1D& grid,
                         double taper_fraction) {
  if (!(a > 0.0)) throw std::invalid_argument("airy_stationary: a must be positive");
  if (!(mass > 0.0)) throw std::invalid_argument("airy_stationary: mass > 0");
  if (grid.kind != Rep::position)
    throw std::invalid_argument("airy_stationary: expects a position grid");
  if (!(taper_fraction > 0.0 && taper_fraction < 0.5))
    throw std::invalid_argument("airy_stationary: taper_fraction in (0, 0.5)");
  const double A = std::cbrt(2.0 * mass * a);
  const ArrayXd x = grid.coords();
  const double x_lo = x[0];
  const double x_hi = x[grid.n - 1];
  // Both ends are rolled to zero: the left one truncates the oscillatory
  // tail, the right one removes the residual decaying amplitude so the
  // periodic spectrum stays clean. The transitions occupy only part of the
  // taper window, leaving an exactly-untouched buffer next to the interior.
  const double left_width = 0.8 * taper_fraction * grid.length();
  const double right_width = 0.5 * taper_fraction * grid.length();
  ArrayXcd psi(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    double w = planck_taper((x[i] - x_lo) / left_width) *
               planck_taper((x_hi - x[i]) / right_width);
    psi[i] = w * airy_ai(A * x[i]);
  }
  return normalized(psi, grid);
}

std::pair<Complex, Complex> airy_components(double a, double mass, double x) {
  const double A = std::cbrt(2.0 * mass * a);
  const Complex rot = std::exp(Complex(0.0, 2.0 * kPi / 3.0));
  const Complex incident = std::conj(rot) * airy_ai(std::conj(rot) * (A * x));
  const Complex reflected = rot * airy_ai(rot * (A * x));
  return {incident, reflected};
}

double expectation_energy(const ArrayXcd& psi, const Grid1D& grid,
                          const PotentialSpec& potential) {
  if (grid.kind != Rep::position)
    throw std::invalid_argument("expectation_energy: expects a position grid");
  const Grid1D pgrid = grid.conjugate();
  const ArrayXcd phi = to_conjugate(psi, grid);
  const ArrayXd p = pgrid.coords();
  const double kinetic =
      (phi.abs2() * p.square()).sum() * pgrid.spacing / (2.0 * potential.mass);
  const double pot = (psi.abs2() * potential.sample(grid)).sum() * grid.spacing;
  return kinetic + pot;
}

}  // namespace dualrep
