#pragma once

#include <complex>

namespace dualrep {

/// Airy function of the first kind. Maclaurin series for |x| <= 6,
/// asymptotic expansions beyond (decaying form for x > 6, oscillatory
/// cos/sin form for x < -6).
double airy_ai(double x);

/// Airy Ai for complex argument: series for |z| <= 6, the principal
/// asymptotic expansion e^{-zeta}/(2 sqrt(pi) z^{1/4}) sum (-1)^k u_k/zeta^k
/// beyond. Most accurate away from the Stokes rays arg z = +-2pi/3.
std::complex<double> airy_ai(std::complex<double> z);

}  // namespace dualrep
