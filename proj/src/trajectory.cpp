#include "dualrep/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace dualrep {

namespace {

// Catmull-Rom in difference form; exact for constant data.
double cubic_interp(double p0, double p1, double p2, double p3, double s) {
  const double d01 = p0 - p1;
  const double d12 = p1 - p2;
  const double d23 = p2 - p3;
  const double c1 = -(d01 + d12);
  const double c2 = 2.0 * d01 - 3.0 * d12 + d23;
  const double c3 = -d01 + 2.0 * d12 - d23;
  return p1 + 0.5 * s * (c1 + s * (c2 + s * c3));
}

struct SampleResult {
  double v = 0.0;
  bool masked = false;
  bool outside = false;
};

// v(q, t): cubic in q, linear in t between the bracketing slices.
SampleResult sample_velocity(const VelocityField& f, double q, double t) {
  SampleResult r;
  const Grid1D& g = f.grid;
  const double pos = (q - g.origin()) / g.spacing;
  if (pos < 0.0 || pos > g.n - 1) {
    r.outside = true;
    return r;
  }
  int i1 = static_cast<int>(std::floor(pos));
  if (i1 >= g.n - 1) i1 = g.n - 2;
  const double s = pos - i1;
  const int i0 = std::max(i1 - 1, 0);
  const int i2 = i1 + 1;
  const int i3 = std::min(i1 + 2, g.n - 1);

  const int nt = static_cast<int>(f.times.size());
  int t1 = 0;
  if (nt > 1) {
    while (t1 < nt - 2 && f.times[t1 + 1] <= t) ++t1;
  }
  const int t2 = std::min(t1 + 1, nt - 1);
  double tau = 0.0;
  if (t2 > t1) {
    tau = (t - f.times[t1]) / (f.times[t2] - f.times[t1]);
    tau = std::clamp(tau, 0.0, 1.0);
  }

  for (int row : {t1, t2}) {
    if (f.masked(row, i0) || f.masked(row, i1) || f.masked(row, i2) ||
        f.masked(row, i3)) {
      r.masked = true;
      return r;
    }
  }
  const double va =
      cubic_interp(f.v(t1, i0), f.v(t1, i1), f.v(t1, i2), f.v(t1, i3), s);
  const double vb =
      cubic_interp(f.v(t2, i0), f.v(t2, i1), f.v(t2, i2), f.v(t2, i3), s);
  r.v = va + tau * (vb - va);
  return r;
}

}  // namespace

VelocityField velocity_field(const CurrentField& current, const RealField& density) {
  if (!(current.grid == density.grid) || current.times != density.times)
    throw std::invalid_argument("velocity_field: mismatched sampling");
  VelocityField out;
  out.grid = current.grid;
  out.times = current.times;
  const int nt = current.n_times();
  const int n = current.grid.n;
  out.v.resize(nt, n);
  out.masked.resize(nt, n);
  for (int t = 0; t < nt; ++t) {
    const double threshold =
        kNodeThresholdRel * kNodeThresholdRel * density.values.row(t).maxCoeff();
    for (int i = 0; i < n; ++i) {
      const double p = density.values(t, i);
      if (p < threshold) {
        out.v(t, i) = 0.0;
        out.masked(t, i) = true;
      } else {
        out.v(t, i) = current.values(t, i) / p;
        out.masked(t, i) = false;
      }
    }
  }
  return out;
}

TrajectoryBundle integrate(const VelocityField& vfield, const std::vector<double>& seeds,
                           double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (vfield.times.empty()) throw std::invalid_argument("integrate: empty field");
  const double t_begin = vfield.times.front();
  const double t_end = vfield.times.back();
  const double span = t_end - t_begin;
  int n_steps = std::max(1, static_cast<int>(std::llround(span / dt)));
  if (std::abs(n_steps * dt - span) > 1e-9 * std::max(1.0, span))
    throw std::invalid_argument("integrate: dt must divide the field time span");

  TrajectoryBundle bundle;
  bundle.representation = vfield.grid.kind;
  bundle.seeds = seeds;
  bundle.times.resize(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k) bundle.times[k] = t_begin + k * dt;
  const int n_seeds = static_cast<int>(seeds.size());
  bundle.paths.resize(n_seeds, n_steps + 1);
  bundle.status.assign(n_seeds, TrajectoryStatus::ok);
  bundle.terminated_at.assign(n_seeds, n_steps + 1);

  for (int s = 0; s < n_seeds; ++s) {
    double q = seeds[s];
    bundle.paths(s, 0) = q;
    SampleResult probe = sample_velocity(vfield, q, t_begin);
    if (probe.outside || probe.masked) {
      bundle.status[s] = probe.outside ? TrajectoryStatus::left_domain
                                       : TrajectoryStatus::rejected_seed;
      bundle.terminated_at[s] = 0;
      for (int k = 1; k <= n_steps; ++k) bundle.paths(s, k) = q;
      continue;
    }
    for (int k = 0; k < n_steps; ++k) {
      const double t = bundle.times[k];
      SampleResult k1 = sample_velocity(vfield, q, t);
      SampleResult k2 = sample_velocity(vfield, q + 0.5 * dt * k1.v, t + 0.5 * dt);
      SampleResult k3 = sample_velocity(vfield, q + 0.5 * dt * k2.v, t + 0.5 * dt);
      SampleResult k4 = sample_velocity(vfield, q + dt * k3.v, t + dt);
      if (k1.masked || k2.masked || k3.masked || k4.masked || k1.outside ||
          k2.outside || k3.outside || k4.outside) {
        bool outside = k1.outside || k2.outside || k3.outside || k4.outside;
        bundle.status[s] =
            outside ? TrajectoryStatus::left_domain : TrajectoryStatus::terminated_node;
        bundle.terminated_at[s] = k;
        for (int r = k + 1; r <= n_steps; ++r) bundle.paths(s, r) = q;
        break;
      }
      // Sum first, then /6: keeps constant fields integrated exactly.
      q += dt * ((k1.v + 2.0 * (k2.v + k3.v) + k4.v) / 6.0);
      bundle.paths(s, k + 1) = q;
    }
  }
  return bundle;
}

ShadowPhaseSpace shadow_phase_space(const TrajectoryBundle& bundle,
                                    const RealField& beable_field) {
  const int n_seeds = static_cast<int>(bundle.seeds.size());
  const int n_times = static_cast<int>(bundle.times.size());
  ShadowPhaseSpace out;
  out.beable.resize(n_seeds, n_times);
  out.has_gap.assign(n_seeds, false);
  const Grid1D& g = beable_field.grid;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (int s = 0; s < n_seeds; ++s) {
    for (int k = 0; k < n_times; ++k) {
      if (k >= bundle.terminated_at[s] && bundle.status[s] != TrajectoryStatus::ok) {
        out.beable(s, k) = nan;
        out.has_gap[s] = true;
        continue;
      }
      const double q = bundle.paths(s, k);
      const double t = bundle.times[k];
      const double pos = (q - g.origin()) / g.spacing;
      if (pos < 0.0 || pos > g.n - 1) {
        out.beable(s, k) = nan;
        out.has_gap[s] = true;
        continue;
      }
      int i1 = std::min(static_cast<int>(std::floor(pos)), g.n - 2);
      const double frac = pos - i1;
      const int i0 = std::max(i1 - 1, 0);
      const int i2 = i1 + 1;
      const int i3 = std::min(i1 + 2, g.n - 1);
      const int nt = beable_field.n_times();
      int t1 = 0;
      while (t1 < nt - 2 && beable_field.times[t1 + 1] <= t) ++t1;
      const int t2 = std::min(t1 + 1, nt - 1);
      double tau = 0.0;
      if (t2 > t1)
        tau = std::clamp(
            (t - beable_field.times[t1]) / (beable_field.times[t2] - beable_field.times[t1]),
            0.0, 1.0);
      bool gap = false;
      double vals[2];
      int rows[2] = {t1, t2};
      for (int r = 0; r < 2; ++r) {
        const double b0 = beable_field.values(rows[r], i0);
        const double b1 = beable_field.values(rows[r], i1);
        const double b2 = beable_field.values(rows[r], i2);
        const double b3 = beable_field.values(rows[r], i3);
        if (!std::isfinite(b0) || !std::isfinite(b1) || !std::isfinite(b2) ||
            !std::isfinite(b3)) {
          gap = true;
          break;
        }
        vals[r] = cubic_interp(b0, b1, b2, b3, frac);
      }
      if (gap) {
        out.beable(s, k) = nan;
        out.has_gap[s] = true;
      } else {
        out.beable(s, k) = vals[0] + tau * (vals[1] - vals[0]);
      }
    }
  }
  return out;
}

std::vector<double> quantile_seeds(const ArrayXd& density, const Grid1D& grid,
                                   int count, double mass_span) {
  if (count < 1) throw std::invalid_argument("quantile_seeds: count >= 1");
  if (!(mass_span > 0.0 && mass_span < 1.0))
    throw std::invalid_argument("quantile_seeds: mass_span in (0, 1)");
  const int n = grid.n;
  // Cumulative trapezoid of the density.
  ArrayXd cdf(n);
  cdf[0] = 0.0;
  for (int i = 1; i < n; ++i)
    cdf[i] = cdf[i - 1] + 0.5 * (density[i - 1] + density[i]) * grid.spacing;
  const double total = cdf[n - 1];
  if (!(total > 0.0)) throw std::invalid_argument("quantile_seeds: zero density");

  std::vector<double> seeds(count);
  const double lo = 0.5 * (1.0 - mass_span);
  int idx = 1;
  for (int s = 0; s < count; ++s) {
    const double u = (lo + mass_span * (s + 0.5) / count) * total;
    while (idx < n - 1 && cdf[idx] < u) ++idx;
    const double c0 = cdf[idx - 1];
    const double c1 = cdf[idx];
    const double w = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.5;
    seeds[s] = grid.coord(idx - 1) + w * grid.spacing;
  }
  return seeds;
}

TransportComparison compare_transported_density(const ArrayXd& positions,
                                                double mass_span,
                                                const ArrayXd& density,
                                                const Grid1D& grid, double lo,
                                                double hi, int n_bins) {
  if (!(hi > lo) || n_bins < 2)
    throw std::invalid_argument("compare_transported_density: bad binning");
  TransportComparison out;
  out.bin_prob_expected = ArrayXd::Zero(n_bins);
  out.bin_prob_transported = ArrayXd::Zero(n_bins);
  const double bin_w = (hi - lo) / n_bins;

  // Expected mass per bin from the cumulative trapezoid, interpolated at the
  // bin edges.
  ArrayXd cdf(grid.n);
  cdf[0] = 0.0;
  for (int i = 1; i < grid.n; ++i)
    cdf[i] = cdf[i - 1] + 0.5 * (density[i - 1] + density[i]) * grid.spacing;
  auto cdf_at = [&](double x) {
    const double pos = (x - grid.origin()) / grid.spacing;
    if (pos <= 0.0) return 0.0;
    if (pos >= grid.n - 1) return cdf[grid.n - 1];
    const int i = static_cast<int>(std::floor(pos));
    const double w = pos - i;
    return (1.0 - w) * cdf[i] + w * cdf[i + 1];
  };
  for (int b = 0; b < n_bins; ++b)
    out.bin_prob_expected[b] =
        cdf_at(lo + (b + 1) * bin_w) - cdf_at(lo + b * bin_w);
  const double w_sample = mass_span / positions.size();
  for (int s = 0; s < positions.size(); ++s) {
    const int b = static_cast<int>(std::floor((positions[s] - lo) / bin_w));
    if (b >= 0 && b < n_bins) out.bin_prob_transported[b] += w_sample;
  }
  const double num = (out.bin_prob_transported - out.bin_prob_expected).matrix().norm();
  const double den = out.bin_prob_expected.matrix().norm();
  out.rms_relative_error = num / den;
  return out;
}

}  // namespace dualrep
