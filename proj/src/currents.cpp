#include "dualrep/currents.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dualrep {

namespace {

// Amplitude floor for residual evaluation: below this the 1/R terms and the
// phase differencing near wandering nodes amplify discretization noise past
// the certified tolerances.
constexpr double kSupportRel = 1e-2;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_momentum_polynomial(const Grid1D& grid, const PotentialSpec& potential,
                                 const char* what) {
  if (grid.kind != Rep::momentum)
    throw std::invalid_argument(std::string(what) + ": expects a momentum grid");
  if (!potential.is_polynomial())
    throw std::invalid_argument(std::string(what) +
                                ": tabulated potentials are unsupported in the "
                                "momentum representation");
}

}  // namespace

RealField density_field(const WaveField& field) {
  RealField out;
  out.grid = field.grid;
  out.times = field.times;
  out.values = field.amplitudes.abs2();
  return out;
}

ArrayXd current_x(const ArrayXcd& psi, const Grid1D& grid, double mass) {
  if (grid.kind != Rep::position)
    throw std::invalid_argument("current_x: expects a position grid");
  require_normalized(psi, grid);
  const ArrayXcd dpsi = spectral_derivative(psi, grid, 1);
  ArrayXd j(grid.n);
  for (int i = 0; i < grid.n; ++i)
    j[i] = std::imag(std::conj(psi[i]) * dpsi[i]) / mass;
  return j;
}

CurrentField current_x(const WaveField& field, double mass) {
  CurrentField out;
  out.grid = field.grid;
  out.times = field.times;
  out.values.resize(field.n_times(), field.grid.n);
  for (int t = 0; t < field.n_times(); ++t)
    out.values.row(t) = current_x(field.slice(t), field.grid, mass).transpose();
  return out;
}

ArrayXd current_p(const ArrayXcd& phi, const Grid1D& grid,
                  const PotentialSpec& potential) {
  require_momentum_polynomial(grid, potential, "current_p");
  require_normalized(phi, grid);
  const auto coeff = potential.polynomial_coefficients();
  // j_p = -sum_k c_k sum_{j<k} i^{k-1-2j} phi^{(k-1-j)} conj(phi^{(j)});
  // the j <-> k-1-j pairing makes the sum real.
  int kmax = 0;
  for (int k = 1; k <= 3; ++k)
    if (coeff[k - 1] != 0.0) kmax = k;
  std::vector<ArrayXcd> d(kmax);  // d[m] = phi^{(m)}, m >= 1
  for (int m = 1; m < kmax; ++m) d[m] = spectral_derivative(phi, grid, m);
  auto phi_deriv = [&](int m) -> const ArrayXcd& {
    return m == 0 ? phi : d[m];
  };
  ArrayXd j = ArrayXd::Zero(grid.n);
  for (int k = 1; k <= kmax; ++k) {
    const double c = coeff[k - 1];
    if (c == 0.0) continue;
    for (int jj = 0; jj < k; ++jj) {
      const int a = k - 1 - jj;
      static const Complex i_cycle[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      const Complex i_pow = i_cycle[((a - jj) % 4 + 4) % 4];
      const ArrayXcd& left = phi_deriv(a);
      const ArrayXcd& right = phi_deriv(jj);
      for (int i = 0; i < grid.n; ++i)
        j[i] -= c * std::real(i_pow * left[i] * std::conj(right[i]));
    }
  }
  return j;
}

CurrentField current_p(const WaveField& field, const PotentialSpec& potential) {
  CurrentField out;
  out.grid = field.grid;
  out.times = field.times;
  out.values.resize(field.n_times(), field.grid.n);
  for (int t = 0; t < field.n_times(); ++t)
    out.values.row(t) = current_p(field.slice(t), field.grid, potential).transpose();
  return out;
}

ArrayXd quantum_potential(const ArrayXcd& psi, const Grid1D& grid,
                          const PotentialSpec& potential) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (grid.kind == Rep::position) {
    const PhaseDerivs pd = phase_derivatives(psi, grid);
    ArrayXd q(grid.n);
    for (int i = 0; i < grid.n; ++i)
      q[i] = pd.node_mask[i] ? nan : -pd.rpp[i] / (2.0 * potential.mass);
    return q;
  }
  require_momentum_polynomial(grid, potential, "quantum_potential");
  switch (potential.kind) {
    case PotentialSpec::Kind::free:
    case PotentialSpec::Kind::linear:
      return ArrayXd::Zero(grid.n);
    case PotentialSpec::Kind::harmonic: {
      const PhaseDerivs pd = phase_derivatives(psi, grid);
      ArrayXd q(grid.n);
      for (int i = 0; i < grid.n; ++i)
        q[i] = pd.node_mask[i] ? nan : -0.5 * potential.stiffness * pd.rpp[i];
      return q;
    }
    case PotentialSpec::Kind::cubic: {
      const PhaseDerivs pd = phase_derivatives(psi, grid);
      const double A = potential.cubic_strength;
      ArrayXd q(grid.n);
      for (int i = 0; i < grid.n; ++i) {
        if (pd.node_mask[i]) {
          q[i] = nan;
          continue;
        }
        q[i] = 3.0 * A * pd.rpp[i] * pd.Sp[i] + 3.0 * A * pd.rp[i] * pd.Spp[i] +
               A * pd.Sppp[i];
      }
      return q;
    }
    default:
      throw std::logic_error("quantum_potential: unreachable");
  }
}

QuantumPotentialField quantum_potential(const WaveField& field,
                                        const PotentialSpec& potential) {
  QuantumPotentialField out;
  out.grid = field.grid;
  out.times = field.times;
  out.values.resize(field.n_times(), field.grid.n);
  for (int t = 0; t < field.n_times(); ++t)
    out.values.row(t) = quantum_potential(field.slice(t), field.grid, potential)
                            .transpose();
  return out;
}

std::vector<double> continuity_residual(const RealField& density,
                                        const CurrentField& current) {
  if (!(density.grid == current.grid) || density.times != current.times)
    throw std::invalid_argument("continuity_residual: mismatched sampling");
  if (density.n_times() < 3)
    throw std::invalid_argument("continuity_residual: need >= 3 time samples");
  std::vector<double> out;
  out.reserve(density.n_times() - 2);
  const Grid1D& grid = density.grid;
  for (int t = 1; t + 1 < density.n_times(); ++t) {
    const double span = density.times[t + 1] - density.times[t - 1];
    if (!(span > 0.0))
      throw std::invalid_argument("continuity_residual: times not ascending");
    ArrayXd dpdt = (density.slice(t + 1) - density.slice(t - 1)) / span;
    ArrayXcd j = current.slice(t).cast<Complex>();
    ArrayXd djdq = spectral_derivative(j, grid, 1).real();
    out.push_back(std::sqrt(((dpdt + djdq).square()).sum() * grid.spacing));
  }
  return out;
}

PolarSeries build_polar_series(const WaveField& field) {
  PolarSeries out;
  out.grid = field.grid;
  out.times = field.times;
  const int nt = field.n_times();
  out.R.resize(nt, field.grid.n);
  out.S.resize(nt, field.grid.n);
  out.ever_masked = BoolArray::Constant(field.grid.n, false);
  for (int t = 0; t < nt; ++t) {
    PolarField pf = polar_decompose(field.slice(t), field.grid);
    out.R.row(t) = pf.R.transpose();
    out.S.row(t) = pf.S.transpose();
    out.ever_masked = out.ever_masked || pf.node_mask;
    if (t > 0) {
      // Align the 2 pi branch with the previous slice at the joint peak.
      int anchor = 0;
      (out.R.row(t) * out.R.row(t - 1)).maxCoeff(&anchor);
      double delta = out.S(t, anchor) - out.S(t - 1, anchor);
      double shift = kTwoPi * std::round(delta / kTwoPi);
      out.S.row(t) -= shift;
    }
  }
  return out;
}

namespace {

// Phase-equation left-hand side of one slice, NaN where unsupported.
ArrayXd phase_lhs_static_part(const ArrayXcd& psi, const Grid1D& grid,
                              const PotentialSpec& potential) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const PhaseDerivs pd = phase_derivatives(psi, grid);
  ArrayXd lhs(grid.n);
  if (grid.kind == Rep::position) {
    const ArrayXd v = potential.sample(grid);
    for (int i = 0; i < grid.n; ++i) {
      if (pd.node_mask[i]) {
        lhs[i] = nan;
        continue;
      }
      lhs[i] = pd.Sp[i] * pd.Sp[i] / (2.0 * potential.mass) + v[i] -
               pd.rpp[i] / (2.0 * potential.mass);
    }
    return lhs;
  }
  require_momentum_polynomial(grid, potential, "phase_equation_residual");
  const ArrayXd p = grid.coords();
  const double m = potential.mass;
  for (int i = 0; i < grid.n; ++i) {
    if (pd.node_mask[i]) {
      lhs[i] = nan;
      continue;
    }
    const double kin = p[i] * p[i] / (2.0 * m);
    const double xr = -pd.Sp[i];
    switch (potential.kind) {
      case PotentialSpec::Kind::free:
        lhs[i] = kin;
        break;
      case PotentialSpec::Kind::linear:
        lhs[i] = kin + potential.linear_slope * xr;
        break;
      case PotentialSpec::Kind::harmonic:
        lhs[i] = kin + 0.5 * potential.stiffness * pd.Sp[i] * pd.Sp[i] -
                 0.5 * potential.stiffness * pd.rpp[i];
        break;
      case PotentialSpec::Kind::cubic: {
        const double A = potential.cubic_strength;
        lhs[i] = kin + A * xr * xr * xr + 3.0 * A * pd.rpp[i] * pd.Sp[i] +
                 3.0 * A * pd.rp[i] * pd.Spp[i] + A * pd.Sppp[i];
        break;
      }
      default:
        lhs[i] = nan;
    }
  }
  return lhs;
}

}  // namespace

std::vector<double> phase_equation_residual(const WaveField& field,
                                            const PotentialSpec& potential) {
  if (field.n_times() < 3)
    throw std::invalid_argument("phase_equation_residual: need >= 3 time samples");
  const PolarSeries polar = build_polar_series(field);
  const Grid1D& grid = field.grid;
  std::vector<double> out;
  out.reserve(field.n_times() - 2);
  for (int t = 1; t + 1 < field.n_times(); ++t) {
    const double span = field.times[t + 1] - field.times[t - 1];
    ArrayXd dsdt = (polar.S.row(t + 1) - polar.S.row(t - 1)).transpose() / span;
    ArrayXd lhs = phase_lhs_static_part(field.slice(t), grid, potential);
    // Evaluation window: amplitude large enough in all three slices for the
    // 1/R terms and the time differencing to be meaningful.
    ArrayXd rmin = polar.R.row(t - 1).min(polar.R.row(t)).min(polar.R.row(t + 1))
                       .transpose();
    const double floor = kSupportRel * polar.R.row(t).maxCoeff();
    double acc = 0.0;
    for (int i = 0; i < grid.n; ++i) {
      if (rmin[i] < floor || !std::isfinite(lhs[i])) continue;
      const double r = dsdt[i] + lhs[i];
      acc += r * r;
    }
    out.push_back(std::sqrt(acc * grid.spacing));
  }
  return out;
}

ArrayXd energy_from_phase(const WaveField& field) {
  if (field.n_times() < 3)
    throw std::invalid_argument("energy_from_phase: need >= 3 time samples");
  const PolarSeries polar = build_polar_series(field);
  const int nt = field.n_times();
  const double peak = polar.R.row(0).maxCoeff();
  double drift = 0.0;
  for (int t = 1; t < nt; ++t)
    drift = std::max(drift, (polar.R.row(t) - polar.R.row(0)).abs().maxCoeff());
  if (drift > 1e-8 * std::max(1.0, peak)) {
    throw std::invalid_argument(
        "energy_from_phase: input is not stationary (|psi| drift " +
        std::to_string(drift) + " exceeds 1e-8)");
  }
  // -dS/dt averaged over the interior time samples.
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ArrayXd energy = ArrayXd::Zero(field.grid.n);
  for (int t = 1; t + 1 < nt; ++t) {
    const double span = field.times[t + 1] - field.times[t - 1];
    energy -= (polar.S.row(t + 1) - polar.S.row(t - 1)).transpose() / span;
  }
  energy /= (nt - 2);
  for (int i = 0; i < field.grid.n; ++i)
    if (polar.ever_masked[i]) energy[i] = nan;
  return energy;
}

CubicCurrentComparison cubic_current_comparison(const ArrayXcd& phi,
                                                const Grid1D& grid,
                                                const PotentialSpec& potential) {
  if (potential.kind != PotentialSpec::Kind::cubic)
    throw std::invalid_argument("cubic_current_comparison: cubic potential only");
  CubicCurrentComparison out;
  out.p = grid.coords();
  out.j_operator = current_p(phi, grid, potential);
  const PhaseDerivs pd = phase_derivatives(phi, grid);
  const double A = potential.cubic_strength;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.j_polar.resize(grid.n);
  out.j_printed_polar.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    if (pd.node_mask[i]) {
      out.j_polar[i] = nan;
      out.j_printed_polar[i] = nan;
      continue;
    }
    const double R = std::abs(phi[i]);
    const double R2 = R * R;
    const double Rp = pd.rp[i] * R;
    const double Rpp = pd.rpp[i] * R;
    const double xr = -pd.Sp[i];
    const double force = 3.0 * A * xr * xr;  // dV/dx at x_r
    const double quantum = A * (2.0 * R * Rpp - Rp * Rp);
    out.j_polar[i] = -R2 * force + quantum;
    out.j_printed_polar[i] = -R2 * force * force + quantum;
  }
  return out;
}

}  // namespace dualrep
