#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace dualrep {

using Complex = std::complex<double>;
using Eigen::ArrayXcd;
using Eigen::ArrayXd;
using Eigen::ArrayXXcd;
using Eigen::ArrayXXd;

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Which operator is diagonal on the grid.
enum class Rep { position, momentum };

/// Uniform, centered 1D sample grid. Grids are always symmetric about zero
/// (coord(i) = (i - n/2) * spacing) so that the conjugate of the conjugate
/// grid is the original grid.
struct Grid1D {
  int n = 0;
  double spacing = 0.0;
  Rep kind = Rep::position;

  Grid1D() = default;
  Grid1D(Rep kind, int n_points, double spacing);

  /// Grid covering [-half_extent, half_extent).
  static Grid1D centered(Rep kind, int n_points, double half_extent);

  double origin() const { return -0.5 * n * spacing; }
  double coord(int i) const { return (i - n / 2) * spacing; }
  ArrayXd coords() const;
  double length() const { return n * spacing; }

  /// Conjugate grid: spacing 2*pi/(n*spacing), opposite kind.
  Grid1D conjugate() const;

  bool operator==(const Grid1D& o) const {
    return n == o.n && spacing == o.spacing && kind == o.kind;
  }
};

/// Complex amplitudes on a grid at a sequence of times. Each row of
/// `amplitudes` is one time slice, normalized so sum |psi|^2 * spacing = 1.
struct WaveField {
  Grid1D grid;
  std::vector<double> times;
  ArrayXXcd amplitudes;  // [time x grid]

  ArrayXcd slice(int t) const { return amplitudes.row(t).transpose(); }
  int n_times() const { return static_cast<int>(times.size()); }
};

/// Amplitude/unwrapped-phase form of one slice. Samples where R falls below
/// node_threshold (1e-6 of the peak) are flagged in node_mask; S there is
/// linearly interpolated and carries no physical meaning.
struct PolarField {
  Grid1D grid;
  ArrayXd R;
  ArrayXd S;
  BoolArray node_mask;
};

inline constexpr double kNodeThresholdRel = 1e-6;

/// L2 norm with the grid measure: sqrt(sum |f|^2 * spacing).
double field_norm(const ArrayXcd& f, const Grid1D& grid);
ArrayXcd normalized(const ArrayXcd& f, const Grid1D& grid);
void require_normalized(const ArrayXcd& f, const Grid1D& grid, double tol = 1e-6);

/// Unitary change of representation for one slice. Position -> momentum uses
/// the kernel exp(-i p x)/sqrt(2 pi); momentum -> position its inverse.
ArrayXcd to_conjugate(const ArrayXcd& f, const Grid1D& grid);

/// Change of representation for a whole field (slice-wise).
WaveField to_conjugate(const WaveField& field);

/// Spectral derivative d^order/dq^order of a grid function (periodic).
ArrayXcd spectral_derivative(const ArrayXcd& f, const Grid1D& grid, int order = 1);

/// R = |psi|, S = unwrapped arg psi anchored at the peak of R.
PolarField polar_decompose(const ArrayXcd& psi, const Grid1D& grid);

/// Pointwise phase/log-amplitude derivatives extracted from spectral
/// derivatives of the complex slice: Sp = dS/dq, Spp, Sppp and rp = R'/R,
/// rpp = R''/R. Entries under the node mask are NaN.
struct PhaseDerivs {
  ArrayXd Sp, Spp, Sppp;
  ArrayXd rp, rpp;
  BoolArray node_mask;
};
PhaseDerivs phase_derivatives(const ArrayXcd& psi, const Grid1D& grid);

/// Local expectation value of the conjugate operator: dS/dx on a position
/// grid (the momentum beable), -dS/dp on a momentum grid (the position
/// beable). Masked samples are NaN.
ArrayXd local_beable(const ArrayXcd& psi, const Grid1D& grid);

/// Finite-difference gradient of an unwrapped phase array (8th-order
/// centered stencil, one-sided near the ends). Independent of the spectral
/// route through the complex slice; used as its cross-check.
ArrayXd phase_gradient_fd(const ArrayXd& S, const Grid1D& grid);

namespace detail {
/// In-place radix-2 FFT, sign -1 forward. n must be a power of two.
void fft_radix2(ArrayXcd& a, bool inverse);
bool is_pow2(int n);
}  // namespace detail

}  // namespace dualrep
