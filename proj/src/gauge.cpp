#include "dualrep/gauge.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dualrep {

namespace {
using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 7-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGaussN = 7;
constexpr double kGaussX[kGaussN] = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr double kGaussW[kGaussN] = {
    0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
    0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
    0.1294849661688697};

double line_integral(const FieldFn& field, const PathSpec& path) {
  path.validate();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < path.points.size(); ++i) {
    const Vector3d a = path.points[i];
    const Vector3d b = path.points[i + 1];
    const Vector3d d = b - a;
    if (d.norm() == 0.0)
      throw std::invalid_argument("line_integral: degenerate path (repeated point)");
    double seg = 0.0;
    for (int g = 0; g < kGaussN; ++g) {
      const double s = 0.5 * (kGaussX[g] + 1.0);
      seg += kGaussW[g] * field(a + s * d).dot(d);
    }
    acc += 0.5 * seg;
  }
  return acc;
}

// Adaptive Simpson with an absolute (not per-level halved) error target.
// When the top interval does not pass the acceptance test, the result is
// the literal sum of the two half-interval computations, so integrals over
// [a, b] recombine bit-for-bit when split at the midpoint.
double simpson(double a, double fa, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_rec(const ScalarTimeFn& f, double a, double fa, double b, double fb,
                    double m, double fm, double eps, int depth) {
  const double whole = simpson(a, fa, fm, b, fb);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, flm, m, fm);
  const double right = simpson(m, fm, frm, b, fb);
  const double two = left + right;
  if (std::abs(two - whole) < 15.0 * eps || depth > 48)
    return two + (two - whole) / 15.0;
  return adaptive_rec(f, a, fa, m, fm, lm, flm, eps, depth + 1) +
         adaptive_rec(f, m, fm, b, fb, rm, frm, eps, depth + 1);
}

double adaptive_integral(const ScalarTimeFn& f, double a, double b, double eps) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  return adaptive_rec(f, a, f(a), b, f(b), m, f(m), eps, 0);
}

}  // namespace

double Phase::total() const { return principal + kTwoPi * winding; }

Phase Phase::from_angle(double angle) {
  Phase p;
  double w = std::floor((angle + kPi) / kTwoPi);
  p.winding = static_cast<int>(w);
  p.principal = angle - kTwoPi * w;
  if (p.principal <= -kPi) {  // land exactly on (-pi, pi]
    p.principal += kTwoPi;
    --p.winding;
  }
  return p;
}

double phase_distance(double a, double b) {
  double d = std::remainder(a - b, kTwoPi);
  return std::abs(d);
}

PathSpec PathSpec::polyline(std::vector<Vector3d> pts, bool closed_flag) {
  PathSpec p;
  p.points = std::move(pts);
  p.closed = closed_flag;
  p.validate();
  return p;
}

void PathSpec::validate() const {
  if (points.size() < 2) throw std::invalid_argument("PathSpec: need >= 2 samples");
  if (!times.empty()) {
    if (times.size() != points.size())
      throw std::invalid_argument("PathSpec: times/points size mismatch");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1]))
        throw std::invalid_argument("PathSpec: times must ascend");
  }
  if (closed && (points.front() - points.back()).norm() > 1e-12)
    throw std::invalid_argument("PathSpec: closed path must return to start");
}

ParameterLoop ParameterLoop::circle(double radius, double polar_angle, int n_samples) {
  if (n_samples < 2) throw std::invalid_argument("ParameterLoop: need >= 2 samples");
  ParameterLoop loop;
  loop.samples.reserve(n_samples + 1);
  for (int i = 0; i <= n_samples; ++i) {
    const double phi = kTwoPi * i / n_samples;
    loop.samples.emplace_back(radius * std::sin(polar_angle) * std::cos(phi),
                              radius * std::sin(polar_angle) * std::sin(phi),
                              radius * std::cos(polar_angle));
  }
  loop.samples.back() = loop.samples.front();
  loop.closed = true;
  return loop;
}

void ParameterLoop::validate() const {
  if (samples.size() < 3) throw std::invalid_argument("ParameterLoop: need >= 3 samples");
  if (!closed || (samples.front() - samples.back()).norm() > 1e-12)
    throw std::invalid_argument("ParameterLoop: loop must be closed");
}

Phase ab_scalar_phase(const ScalarTimeFn& v0, double t0, double t1) {
  if (t1 < t0) throw std::invalid_argument("ab_scalar_phase: t1 < t0");
  return Phase::from_angle(adaptive_integral(v0, t0, t1, 1e-11));
}

Phase ab_vector_phase(const FieldFn& vector_potential, double charge,
                      const PathSpec& path) {
  return Phase::from_angle(charge * line_integral(vector_potential, path));
}

Phase ac_phase(const FieldFn& electric_field, const Vector3d& moment,
               const PathSpec& path) {
  FieldFn effective = [&electric_field, moment](const Vector3d& x) -> Vector3d {
    return electric_field(x).cross(moment);
  };
  return Phase::from_angle(line_integral(effective, path));
}

Phase berry_phase(const EigenstateFn& eigenstate, const ParameterLoop& loop) {
  loop.validate();
  const std::size_t m = loop.samples.size() - 1;  // last sample repeats the first
  std::vector<VectorXcd> states(m);
  for (std::size_t i = 0; i < m; ++i) {
    states[i] = eigenstate(loop.samples[i]);
    states[i].normalize();
  }
  Complex product(1.0, 0.0);
  double accumulated = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Complex overlap = states[i].dot(states[(i + 1) % m]);  // <psi_i|psi_i+1>
    const double mag = std::abs(overlap);
    if (mag < 0.5)
      throw std::invalid_argument(
          "berry_phase: consecutive overlap below 0.5, refine the loop sampling");
    product *= overlap / mag;
    accumulated += std::arg(overlap);
  }
  // Principal value from the gauge-invariant product; winding from the
  // accumulated small-step phases.
  Phase p;
  p.principal = Phase::from_angle(-std::arg(product)).principal;
  p.winding = static_cast<int>(std::lround((-accumulated - p.principal) / kTwoPi));
  return p;
}

namespace fields {

FieldFn flux_line(double flux) {
  return [flux](const Vector3d& x) -> Vector3d {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return Vector3d(-x[1], x[0], 0.0) * (flux / (kTwoPi * r2));
  };
}

FieldFn line_charge(double lambda) {
  return [lambda](const Vector3d& x) -> Vector3d {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return Vector3d(x[0], x[1], 0.0) * (lambda / (kTwoPi * r2));
  };
}

FieldFn uniform(const Vector3d& value) {
  return [value](const Vector3d&) -> Vector3d { return value; };
}

}  // namespace fields

EigenstateFn spin_half_up_state() {
  return [](const Vector3d& b) -> VectorXcd {
    const double r = b.norm();
    if (!(r > 0.0))
      throw std::invalid_argument("spin_half_up_state: field must be non-zero");
    const double theta = std::acos(std::clamp(b[2] / r, -1.0, 1.0));
    const double phi = std::atan2(b[1], b[0]);
    VectorXcd v(2);
    v[0] = Complex(std::cos(0.5 * theta), 0.0);
    v[1] = std::exp(Complex(0.0, phi)) * std::sin(0.5 * theta);
    return v;
  };
}

}  // namespace dualrep
