#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dualrep/propagate.hpp"
#include "dualrep/trajectory.hpp"

#include <cmath>
#include <numbers>

using namespace dualrep;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

WaveField analytic_free_field(const Grid1D& grid, double delta_x, double mass,
                              const std::vector<double>& times) {
  WaveField f;
  f.grid = grid;
  f.times = times;
  f.amplitudes.resize(static_cast<int>(times.size()), grid.n);
  for (std::size_t t = 0; t < times.size(); ++t)
    f.amplitudes.row(t) =
        analytic_gaussian(grid.kind, delta_x, mass, times[t], grid).transpose();
  return f;
}

WaveField coherent_field(const Grid1D& grid, double mass, double stiffness, double x0,
                         const std::vector<double>& times) {
  WaveField f;
  f.grid = grid;
  f.times = times;
  f.amplitudes.resize(static_cast<int>(times.size()), grid.n);
  for (std::size_t t = 0; t < times.size(); ++t)
    f.amplitudes.row(t) =
        harmonic_coherent(mass, stiffness, x0, times[t], grid).transpose();
  return f;
}

// Dense-quadrature oracle for the free-packet path: the separable flow
// dx/dt = x v(t) integrates to x(t) = x0 exp(int v), evaluated with fine
// Simpson panels, independent of the RK4/interpolation machinery.
double free_path_oracle(double x0, double delta_x, double mass, double t) {
  auto v = [&](double s) {
    return s / (4.0 * mass * mass * delta_x * delta_x * gaussian_spread(delta_x, mass, s));
  };
  const int panels = 20000;
  double acc = 0.0;
  const double h = t / panels;
  for (int i = 0; i < panels; ++i) {
    const double a = i * h;
    acc += h / 6.0 * (v(a) + 4.0 * v(a + 0.5 * h) + v(a + h));
  }
  return x0 * std::exp(acc);
}

RealField beable_field_of(const WaveField& f) {
  RealField b;
  b.grid = f.grid;
  b.times = f.times;
  b.values.resize(f.n_times(), f.grid.n);
  for (int t = 0; t < f.n_times(); ++t)
    b.values.row(t) = local_beable(f.slice(t), f.grid).transpose();
  return b;
}

}  // namespace

TEST_CASE("velocity fields of the worked states") {
  const Grid1D g = Grid1D::centered(Rep::position, 512, 16.0);
  SUBCASE("free gaussian in position space") {
    const std::vector<double> times = linspace(0.2, 1.0, 5);
    const WaveField f = analytic_free_field(g, 1.0, 1.0, times);
    const VelocityField vel = velocity_field(current_x(f, 1.0), density_field(f));
    for (int t = 0; t < 5; ++t) {
      const double d = gaussian_spread(1.0, 1.0, times[t]);
      for (int i = 0; i < g.n; i += 13) {
        if (vel.masked(t, i)) continue;
        const double expected = g.coord(i) * times[t] / (4.0 * d);
        CHECK(vel.v(t, i) == doctest::Approx(expected).epsilon(1e-7));
      }
    }
  }
  SUBCASE("free gaussian in momentum space is static") {
    const Grid1D pg = g.conjugate();
    const WaveField f = analytic_free_field(pg, 1.0, 1.0, linspace(0.0, 1.0, 5));
    const VelocityField vel =
        velocity_field(current_p(f, PotentialSpec::free_particle(1.0)),
                       density_field(f));
    CHECK(vel.v.abs().maxCoeff() == 0.0);
  }
  SUBCASE("linear potential in momentum space drifts at exactly -a") {
    const Grid1D pg = g.conjugate();
    const double a = 0.5;
    const WaveField f = analytic_free_field(pg, 1.0, 1.0, linspace(0.0, 1.0, 5));
    const VelocityField vel = velocity_field(
        current_p(f, PotentialSpec::linear(1.0, a)), density_field(f));
    for (int t = 0; t < 5; ++t)
      for (int i = 0; i < pg.n; ++i)
        if (!vel.masked(t, i)) CHECK(vel.v(t, i) == -a);
  }
  SUBCASE("mismatched sampling rejected") {
    const WaveField f = analytic_free_field(g, 1.0, 1.0, linspace(0.0, 1.0, 5));
    RealField dens = density_field(f);
    CurrentField cur = current_x(f, 1.0);
    cur.times[2] += 1e-3;
    CHECK_THROWS(velocity_field(cur, dens));
  }
}

TEST_CASE("integration basics") {
  const Grid1D g = Grid1D::centered(Rep::position, 128, 8.0);
  SUBCASE("zero field keeps paths constant") {
    VelocityField vel;
    vel.grid = g;
    vel.times = {0.0, 1.0};
    vel.v = ArrayXXd::Zero(2, g.n);
    vel.masked = BoolGrid::Constant(2, g.n, false);
    const TrajectoryBundle b = integrate(vel, {-1.0, 0.25, 2.0}, 0.125);
    for (int s = 0; s < 3; ++s)
      for (std::size_t t = 0; t < b.times.size(); ++t)
        CHECK(b.paths(s, t) == b.seeds[s]);
  }
  SUBCASE("constant field integrates exactly") {
    const double a = 0.5;  // dyadic slope: RK4 increments stay exact
    VelocityField vel;
    vel.grid = g;
    vel.times = {0.0, 1.0};
    vel.v = ArrayXXd::Constant(2, g.n, -a);
    vel.masked = BoolGrid::Constant(2, g.n, false);
    const TrajectoryBundle b = integrate(vel, {0.25, 0.5, 1.5}, 0.015625);
    for (int s = 0; s < 3; ++s)
      for (std::size_t t = 0; t < b.times.size(); ++t)
        CHECK(b.paths(s, t) == b.seeds[s] - a * b.times[t]);
  }
  SUBCASE("seed on mask rejected per seed") {
    VelocityField vel;
    vel.grid = g;
    vel.times = {0.0, 1.0};
    vel.v = ArrayXXd::Zero(2, g.n);
    vel.masked = BoolGrid::Constant(2, g.n, false);
    for (int t = 0; t < 2; ++t)
      for (int i = 0; i < g.n; ++i)
        if (std::abs(g.coord(i)) < 1.0) vel.masked(t, i) = true;
    const TrajectoryBundle b = integrate(vel, {0.2, 4.0}, 0.25);
    CHECK(b.status[0] == TrajectoryStatus::rejected_seed);
    CHECK(b.status[1] == TrajectoryStatus::ok);
  }
  SUBCASE("path entering a masked region terminates flagged") {
    VelocityField vel;
    vel.grid = g;
    vel.times = {0.0, 4.0};
    vel.v = ArrayXXd::Constant(2, g.n, 1.0);  // drift to the right
    vel.masked = BoolGrid::Constant(2, g.n, false);
    for (int t = 0; t < 2; ++t)
      for (int i = 0; i < g.n; ++i)
        if (g.coord(i) > 3.0) vel.masked(t, i) = true;
    const TrajectoryBundle b = integrate(vel, {0.0}, 0.125);
    CHECK(b.status[0] == TrajectoryStatus::terminated_node);
    CHECK(b.terminated_at[0] < static_cast<int>(b.times.size()));
    // Frozen at the termination point, not extrapolated.
    const double last = b.paths(0, b.times.size() - 1);
    CHECK(last < 3.2);
    // Beables along the terminated stretch are recorded as a gap.
    RealField beable;
    beable.grid = g;
    beable.times = {0.0, 4.0};
    beable.values = ArrayXXd::Constant(2, g.n, 1.0);
    const ShadowPhaseSpace shadow = shadow_phase_space(b, beable);
    CHECK(shadow.has_gap[0]);
    CHECK(!std::isfinite(shadow.beable(0, b.times.size() - 1)));
  }
}

TEST_CASE("free gaussian fan-out against the quadrature oracle") {
  const Grid1D g = Grid1D::centered(Rep::position, 512, 16.0);
  const std::vector<double> times = linspace(0.0, 1.0, 51);
  const WaveField f = analytic_free_field(g, 1.0, 1.0, times);
  const VelocityField vel = velocity_field(current_x(f, 1.0), density_field(f));
  const std::vector<double> seeds = {-2.0, -0.7, 0.6, 1.8};
  const TrajectoryBundle b = integrate(vel, seeds, 0.02);
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    REQUIRE(b.status[s] == TrajectoryStatus::ok);
    for (std::size_t t = 10; t < b.times.size(); t += 10) {
      const double oracle = free_path_oracle(seeds[s], 1.0, 1.0, b.times[t]);
      CHECK(std::abs(b.paths(s, t) - oracle) < 1e-5);
      // Also the closed form x0 sqrt(D(t)/D(0)).
      const double closed = seeds[s] * std::sqrt(gaussian_spread(1.0, 1.0, b.times[t]));
      CHECK(std::abs(b.paths(s, t) - closed) < 1e-5);
    }
  }
}

TEST_CASE("fourth-order step convergence") {
  // Velocity linear in t (so the time interpolation is exact) and smooth in
  // q; the dense-step reference integrates the same interpolated field, so
  // the differences isolate the one-step-method order.
  const Grid1D g = Grid1D::centered(Rep::position, 512, 8.0);
  VelocityField vel;
  vel.grid = g;
  vel.times = {0.0, 2.0};
  vel.v.resize(2, g.n);
  vel.masked = BoolGrid::Constant(2, g.n, false);
  // Linear in q as well, so the cubic interpolation reproduces the field
  // exactly and the integrated ODE is genuinely smooth.
  for (int t = 0; t < 2; ++t)
    for (int i = 0; i < g.n; ++i) {
      const double x = g.coord(i);
      vel.v(t, i) = (0.2 + 0.15 * vel.times[t]) * x + (0.3 - 0.1 * vel.times[t]);
    }
  const std::vector<double> seeds = {0.8};
  auto endpoint = [&](double dt) {
    const TrajectoryBundle b = integrate(vel, seeds, dt);
    return b.paths(0, b.times.size() - 1);
  };
  const double fine = endpoint(0.00125);
  const double e1 = std::abs(endpoint(0.08) - fine);
  const double e2 = std::abs(endpoint(0.04) - fine);
  CHECK(e1 / e2 > 16.0 * 0.7);
  CHECK(e1 / e2 < 16.0 * 1.3);
}

TEST_CASE("paths stay ordered and move within the velocity bound") {
  const Grid1D g = Grid1D::centered(Rep::position, 512, 16.0);
  const Grid1D hg = Grid1D::centered(Rep::position, 512, 12.0);
  const std::vector<double> dense = linspace(0.0, 1.5, 76);
  const WaveField fields[2] = {analytic_free_field(g, 1.0, 1.0, dense),
                               coherent_field(hg, 1.0, 1.0, 2.0, dense)};
  for (const WaveField& f : fields) {
    const VelocityField vel = velocity_field(current_x(f, 1.0), density_field(f));
    const std::vector<double> seeds =
        quantile_seeds(density_field(f).slice(0), f.grid, 24, 0.99);
    const double dt = 0.02;
    const TrajectoryBundle b = integrate(vel, seeds, dt);
    double vmax = 0.0;
    for (int t = 0; t < static_cast<int>(dense.size()); ++t)
      for (int i = 0; i < f.grid.n; ++i)
        if (!vel.masked(t, i)) vmax = std::max(vmax, std::abs(vel.v(t, i)));
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      REQUIRE(b.status[s] == TrajectoryStatus::ok);
      for (std::size_t t = 1; t < b.times.size(); ++t) {
        CHECK(std::abs(b.paths(s, t) - b.paths(s, t - 1)) <= 5.0 * vmax * dt);
        if (s > 0) CHECK(b.paths(s, t) > b.paths(s - 1, t));  // no crossing
      }
    }
  }
}

TEST_CASE("shadow phase spaces") {
  SUBCASE("harmonic ground state: static points with zero beable momentum") {
    const Grid1D g = Grid1D::centered(Rep::position, 512, 12.0);
    const std::vector<double> times = linspace(0.0, 1.0, 21);
    WaveField f;
    f.grid = g;
    f.times = times;
    const ArrayXcd ground = harmonic_ground(1.0, 1.0, g);
    f.amplitudes.resize(static_cast<int>(times.size()), g.n);
    for (std::size_t t = 0; t < times.size(); ++t) {
      const Complex ph = std::exp(Complex(0.0, -0.5 * times[t]));
      f.amplitudes.row(t) = (ground * ph).transpose();
    }
    const VelocityField vel = velocity_field(current_x(f, 1.0), density_field(f));
    const TrajectoryBundle b = integrate(vel, {-1.0, 0.0, 1.2}, 0.05);
    const ShadowPhaseSpace shadow = shadow_phase_space(b, beable_field_of(f));
    for (int s = 0; s < 3; ++s)
      for (std::size_t t = 0; t < b.times.size(); ++t) {
        CHECK(std::abs(b.paths(s, t) - b.seeds[s]) < 1e-9);
        CHECK(std::abs(shadow.beable(s, t)) < 1e-7);
      }
  }
  SUBCASE("free gaussian momentum construction gives classical lines") {
    const Grid1D pg = Grid1D::centered(Rep::position, 512, 16.0).conjugate();
    const std::vector<double> times = linspace(0.0, 1.2, 25);
    const WaveField f = analytic_free_field(pg, 1.0, 1.0, times);
    const VelocityField vel = velocity_field(
        current_p(f, PotentialSpec::free_particle(1.0)), density_field(f));
    const std::vector<double> seeds = {-0.4, 0.3, 0.9};
    const TrajectoryBundle b = integrate(vel, seeds, 0.05);
    const ShadowPhaseSpace shadow = shadow_phase_space(b, beable_field_of(f));
    for (std::size_t s = 0; s < seeds.size(); ++s)
      for (std::size_t t = 0; t < b.times.size(); ++t) {
        CHECK(b.paths(s, t) == doctest::Approx(seeds[s]));  // constant momentum
        CHECK(shadow.beable(s, t) ==
              doctest::Approx(seeds[s] * b.times[t]).epsilon(1e-6));  // x_r = p t / m
      }
  }
  SUBCASE("classical-limit packet builds one phase space from either side") {
    // Large-action coherent state: the x-built and p-built shadow curves of
    // the central trajectory trace the same classical ellipse to ~2%.
    const double x0 = 50.0;
    const Grid1D g = Grid1D::centered(Rep::position, 4096, 56.0 + x0);
    const double period = 2.0 * kPi;
    const std::vector<double> times = linspace(0.0, period, 101);
    const WaveField f = coherent_field(g, 1.0, 1.0, x0, times);
    const WaveField fp = to_conjugate(f);

    const VelocityField vel_x = velocity_field(current_x(f, 1.0), density_field(f));
    const TrajectoryBundle bx = integrate(vel_x, {x0}, period / 100.0);
    const ShadowPhaseSpace sx = shadow_phase_space(bx, beable_field_of(f));

    const VelocityField vel_p = velocity_field(
        current_p(fp, PotentialSpec::harmonic(1.0, 1.0)), density_field(fp));
    const TrajectoryBundle bp = integrate(vel_p, {0.0}, period / 100.0);
    const ShadowPhaseSpace sp = shadow_phase_space(bp, beable_field_of(fp));

    REQUIRE(bx.status[0] == TrajectoryStatus::ok);
    REQUIRE(bp.status[0] == TrajectoryStatus::ok);
    double rms = 0.0;
    int count = 0;
    for (std::size_t t = 0; t < bx.times.size(); ++t) {
      // x-curve point (q, p_r) and p-curve point (x_r, p) at matching times.
      const double qx = bx.paths(0, t), px = sx.beable(0, t);
      const double pp = bp.paths(0, t), xp = sp.beable(0, t);
      if (!std::isfinite(px) || !std::isfinite(xp)) continue;
      const double dq = (qx - xp) / x0;
      const double dp = (px - pp) / x0;  // m omega = 1 scales p like x
      rms += dq * dq + dp * dp;
      ++count;
    }
    rms = std::sqrt(rms / count);
    CHECK(count > 90);
    CHECK(rms < 0.02);
  }
}

TEST_CASE("transported seed density reproduces the evolved density") {
  const Grid1D g = Grid1D::centered(Rep::position, 512, 16.0);
  const std::vector<double> times = linspace(0.0, 1.0, 51);
  const WaveField f = analytic_free_field(g, 1.0, 1.0, times);
  const RealField dens = density_field(f);
  const VelocityField vel = velocity_field(current_x(f, 1.0), dens);
  const int n_seeds = 4000;
  const double span = 0.999;
  const std::vector<double> seeds = quantile_seeds(dens.slice(0), g, n_seeds, span);
  const TrajectoryBundle b = integrate(vel, seeds, 0.02);
  ArrayXd finals(n_seeds);
  for (int s = 0; s < n_seeds; ++s) finals[s] = b.paths(s, b.times.size() - 1);
  const auto cmp = compare_transported_density(finals, span, dens.slice(50), g,
                                               -8.0, 8.0, 48);
  CHECK(cmp.rms_relative_error < 0.02);
}
