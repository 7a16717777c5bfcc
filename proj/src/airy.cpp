#include "dualrep/airy.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace dualrep {

namespace {

using Cplx = std::complex<double>;

constexpr double kSeriesRadius = 6.0;
constexpr int kMaxSeriesTerms = 200;
constexpr int kMaxAsymTerms = 60;

// Ai(0) and -Ai'(0).
double ai0() {
  static const double v = 1.0 / (std::pow(3.0, 2.0 / 3.0) * std::tgamma(2.0 / 3.0));
  return v;
}
double aip0() {
  static const double v = 1.0 / (std::pow(3.0, 1.0 / 3.0) * std::tgamma(1.0 / 3.0));
  return v;
}

// Coefficients u_k of the asymptotic expansions,
// u_k = u_{k-1} (6k-5)(6k-3)(6k-1) / (216 k (2k-1)).
const std::vector<double>& asym_u() {
  static const std::vector<double> u = [] {
    std::vector<double> v(kMaxAsymTerms);
    v[0] = 1.0;
    for (int k = 1; k < kMaxAsymTerms; ++k)
      v[k] = v[k - 1] * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
             (216.0 * k * (2.0 * k - 1.0));
    return v;
  }();
  return u;
}

// Maclaurin series: Ai(z) = c1 f(z) - c2 g(z) with f'' = z f, g'' = z g,
// f = sum z^{3k} prod, g = sum z^{3k+1} prod.
Cplx series_ai(Cplx z) {
  const Cplx z3 = z * z * z;
  Cplx f_term(1.0, 0.0);
  Cplx g_term = z;
  Cplx f = f_term;
  Cplx g = g_term;
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    f_term *= z3 / ((3.0 * k + 2.0) * (3.0 * k + 3.0));
    g_term *= z3 / ((3.0 * k + 3.0) * (3.0 * k + 4.0));
    f += f_term;
    g += g_term;
    if (std::abs(f_term) < 1e-18 * (1.0 + std::abs(f)) &&
        std::abs(g_term) < 1e-18 * (1.0 + std::abs(g)))
      break;
  }
  return ai0() * f - aip0() * g;
}

// Decaying expansion for real x > 0 and general complex z (principal branch):
// Ai(z) ~ e^{-zeta}/(2 sqrt(pi) z^{1/4}) sum_k (-1)^k u_k zeta^{-k}.
Cplx asym_ai(Cplx z) {
  const auto& u = asym_u();
  const Cplx zeta = (2.0 / 3.0) * std::pow(z, 1.5);
  Cplx sum(0.0, 0.0);
  Cplx pow_term(1.0, 0.0);
  double prev = std::numeric_limits<double>::max();
  for (int k = 0; k < kMaxAsymTerms; ++k) {
    Cplx term = (k % 2 == 0 ? 1.0 : -1.0) * u[k] * pow_term;
    double mag = std::abs(term);
    if (mag > prev) break;  // past optimal truncation
    sum += term;
    if (mag < 1e-18) break;
    prev = mag;
    pow_term /= zeta;
  }
  return std::exp(-zeta) / (2.0 * std::sqrt(std::numbers::pi) * std::pow(z, 0.25)) * sum;
}

// Oscillatory expansion for real x < 0, t = -x:
// Ai(-t) ~ (cos(zeta - pi/4) S_even + sin(zeta - pi/4) S_odd) / (sqrt(pi) t^{1/4}).
double asym_ai_neg(double t) {
  const auto& u = asym_u();
  const double zeta = (2.0 / 3.0) * std::pow(t, 1.5);
  double s_even = 0.0, s_odd = 0.0;
  double zpow = 1.0;  // zeta^{-k}
  double prev = std::numeric_limits<double>::max();
  for (int k = 0; k < kMaxAsymTerms; ++k) {
    double term = u[k] * zpow;
    if (term > prev) break;
    double signed_term = ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    if (k % 2 == 0)
      s_even += signed_term;
    else
      s_odd += signed_term;
    if (term < 1e-18) break;
    prev = term;
    zpow /= zeta;
  }
  const double phase = zeta - 0.25 * std::numbers::pi;
  return (std::cos(phase) * s_even + std::sin(phase) * s_odd) /
         (std::sqrt(std::numbers::pi) * std::pow(t, 0.25));
}

}  // namespace

double airy_ai(double x) {
  if (std::abs(x) <= kSeriesRadius) return series_ai(Cplx(x, 0.0)).real();
  if (x > 0.0) return asym_ai(Cplx(x, 0.0)).real();
  return asym_ai_neg(-x);
}

Cplx airy_ai(Cplx z) {
  if (std::abs(z) <= kSeriesRadius) return series_ai(z);
  // The principal expansion fails near the negative real axis where both
  // oscillatory exponentials contribute; route real arguments through the
  // cos/sin form.
  if (z.imag() == 0.0) return Cplx(airy_ai(z.real()), 0.0);
  return asym_ai(z);
}

}  // namespace dualrep
