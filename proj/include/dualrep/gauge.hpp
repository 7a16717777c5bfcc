#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

namespace dualrep {

using Eigen::Vector3d;
using Eigen::VectorXcd;

/// Phase split into a principal value in (-pi, pi] and an integer winding
/// count; total() is the accumulated phase.
struct Phase {
  double principal = 0.0;
  int winding = 0;

  double total() const;
  /// Splits an accumulated angle into principal value and winding.
  static Phase from_angle(double angle);
};

/// Ordered spatial path samples; closed paths return to their start.
struct PathSpec {
  std::vector<Vector3d> points;
  std::vector<double> times;  // optional, ascending when present
  bool closed = false;

  static PathSpec polyline(std::vector<Vector3d> pts, bool closed);
  void validate() const;
};

/// Closed loop in parameter space for cyclic transport.
struct ParameterLoop {
  std::vector<Vector3d> samples;
  bool closed = false;

  static ParameterLoop circle(double radius, double polar_angle, int n_samples);
  void validate() const;
};

using ScalarTimeFn = std::function<double(double)>;
using FieldFn = std::function<Vector3d(const Vector3d&)>;
using EigenstateFn = std::function<VectorXcd(const Vector3d&)>;

/// Scalar gauge phase: integral of V0(t) over [t0, t1], adaptive Simpson to
/// 1e-10 absolute.
Phase ab_scalar_phase(const ScalarTimeFn& v0, double t0, double t1);

/// Vector gauge phase: e * line integral of A along the (polygonal) path,
/// Gauss-Legendre per segment. For a closed path around an idealized flux
/// line this is e times the enclosed flux.
Phase ab_vector_phase(const FieldFn& vector_potential, double charge,
                      const PathSpec& path);

/// Moment-in-electric-field phase: line integral of E x mu along the path.
Phase ac_phase(const FieldFn& electric_field, const Vector3d& moment,
               const PathSpec& path);

/// Discrete geometric phase of a single-valued eigenstate family around a
/// closed parameter loop: -arg prod_j <psi(B_j)|psi(B_j+1)>. Exactly
/// invariant under per-sample phase redefinitions. Overlaps with modulus
/// below 0.5 demand a finer loop and are rejected.
Phase berry_phase(const EigenstateFn& eigenstate, const ParameterLoop& loop);

/// Circle-distance between two phases ( |a - b| modulo 2 pi, in [0, pi] ).
double phase_distance(double a, double b);

/// Built-in analytic field presets.
namespace fields {
/// Idealized flux line of total flux `flux` along z: A = flux/(2 pi) *
/// (-y, x, 0)/r^2.
FieldFn flux_line(double flux);
/// Line charge of density lambda along z: E = lambda/(2 pi) (x, y, 0)/r^2.
FieldFn line_charge(double lambda);
FieldFn uniform(const Vector3d& value);
}  // namespace fields

/// Eigenstate of sigma . n(B) with eigenvalue +1, n the unit direction of B:
/// (cos(theta/2), e^{i phi} sin(theta/2)). The standard Berry-phase test
/// family for spin-1/2 in a slowly rotated field.
EigenstateFn spin_half_up_state();

}  // namespace dualrep
