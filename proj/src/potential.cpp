#include "dualrep/potential.hpp"

#include <stdexcept>

namespace dualrep {

namespace {
void require_mass(double mass) {
  if (!(mass > 0.0)) throw std::invalid_argument("PotentialSpec: mass must be positive");
}
}  // namespace

PotentialSpec PotentialSpec::free_particle(double mass) {
  require_mass(mass);
  PotentialSpec v;
  v.kind = Kind::free;
  v.mass = mass;
  return v;
}

PotentialSpec PotentialSpec::linear(double mass, double a) {
  require_mass(mass);
  PotentialSpec v;
  v.kind = Kind::linear;
  v.mass = mass;
  v.linear_slope = a;
  return v;
}

PotentialSpec PotentialSpec::harmonic(double mass, double K) {
  require_mass(mass);
  if (!(K > 0.0)) throw std::invalid_argument("PotentialSpec: harmonic requires K > 0");
  PotentialSpec v;
  v.kind = Kind::harmonic;
  v.mass = mass;
  v.stiffness = K;
  return v;
}

PotentialSpec PotentialSpec::cubic(double mass, double A) {
  require_mass(mass);
  PotentialSpec v;
  v.kind = Kind::cubic;
  v.mass = mass;
  v.cubic_strength = A;
  return v;
}

PotentialSpec PotentialSpec::tabulated(double mass, ArrayXd values) {
  require_mass(mass);
  if (!values.isFinite().all())
    throw std::invalid_argument("PotentialSpec: tabulated values must be finite");
  PotentialSpec v;
  v.kind = Kind::tabulated;
  v.mass = mass;
  v.table = std::move(values);
  return v;
}

ArrayXd PotentialSpec::sample(const Grid1D& grid) const {
  switch (kind) {
    case Kind::free:
      return ArrayXd::Zero(grid.n);
    case Kind::linear:
      return linear_slope * grid.coords();
    case Kind::harmonic:
      return 0.5 * stiffness * grid.coords().square();
    case Kind::cubic:
      return cubic_strength * grid.coords().cube();
    case Kind::tabulated:
      if (table.size() != grid.n)
        throw std::invalid_argument("PotentialSpec: table size does not match grid");
      return table;
  }
  throw std::logic_error("PotentialSpec: unknown kind");
}

double PotentialSpec::force_gradient(double x) const {
  switch (kind) {
    case Kind::free:
      return 0.0;
    case Kind::linear:
      return linear_slope;
    case Kind::harmonic:
      return stiffness * x;
    case Kind::cubic:
      return 3.0 * cubic_strength * x * x;
    case Kind::tabulated:
      throw std::invalid_argument("PotentialSpec: no closed gradient for tabulated");
  }
  throw std::logic_error("PotentialSpec: unknown kind");
}

std::array<double, 3> PotentialSpec::polynomial_coefficients() const {
  switch (kind) {
    case Kind::free:
      return {0.0, 0.0, 0.0};
    case Kind::linear:
      return {linear_slope, 0.0, 0.0};
    case Kind::harmonic:
      return {0.0, 0.5 * stiffness, 0.0};
    case Kind::cubic:
      return {0.0, 0.0, cubic_strength};
    case Kind::tabulated:
      throw std::invalid_argument(
          "PotentialSpec: tabulated potential has no polynomial expansion");
  }
  throw std::logic_error("PotentialSpec: unknown kind");
}

}  // namespace dualrep
