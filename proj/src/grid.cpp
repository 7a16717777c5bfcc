#include "dualrep/grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace dualrep {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_to_pi(double x) {
  double y = x - kTwoPi * std::floor((x + std::numbers::pi) / kTwoPi);
  if (y <= -std::numbers::pi) y += kTwoPi;
  return y;
}
}  // namespace

namespace detail {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

namespace {
// Twiddle table e^{-2 pi i k / n}, k < n/2, cached per size.
const std::vector<Complex>& twiddles(int n) {
  static std::map<int, std::vector<Complex>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<Complex> tw(n / 2);
  for (int k = 0; k < n / 2; ++k) {
    double ang = -kTwoPi * k / n;
    tw[k] = Complex(std::cos(ang), std::sin(ang));
  }
  return cache.emplace(n, std::move(tw)).first->second;
}
}  // namespace

void fft_radix2(ArrayXcd& a, bool inverse) {
  const int n = static_cast<int>(a.size());
  if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
  const auto& tw = twiddles(n);

  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const int stride = n / len;
    for (int i = 0; i < n; i += len) {
      for (int j = 0; j < len / 2; ++j) {
        Complex w = tw[j * stride];
        if (inverse) w = std::conj(w);
        Complex u = a[i + j];
        Complex v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
}

}  // namespace detail

Grid1D::Grid1D(Rep kind_, int n_points, double spacing_)
    : n(n_points), spacing(spacing_), kind(kind_) {
  if (!detail::is_pow2(n) || n < 64)
    throw std::invalid_argument("Grid1D: n_points must be a power of two >= 64");
  if (!(spacing > 0.0)) throw std::invalid_argument("Grid1D: spacing must be positive");
}

Grid1D Grid1D::centered(Rep kind, int n_points, double half_extent) {
  if (!(half_extent > 0.0))
    throw std::invalid_argument("Grid1D: half_extent must be positive");
  return Grid1D(kind, n_points, 2.0 * half_extent / n_points);
}

ArrayXd Grid1D::coords() const {
  ArrayXd q(n);
  for (int i = 0; i < n; ++i) q[i] = coord(i);
  return q;
}

Grid1D Grid1D::conjugate() const {
  Rep other = (kind == Rep::position) ? Rep::momentum : Rep::position;
  return Grid1D(other, n, kTwoPi / (n * spacing));
}

double field_norm(const ArrayXcd& f, const Grid1D& grid) {
  return std::sqrt(f.abs2().sum() * grid.spacing);
}

ArrayXcd normalized(const ArrayXcd& f, const Grid1D& grid) {
  double nrm = field_norm(f, grid);
  if (!(nrm > 0.0)) throw std::invalid_argument("normalized: zero field");
  return f / nrm;
}

void require_normalized(const ArrayXcd& f, const Grid1D& grid, double tol) {
  if (std::abs(field_norm(f, grid) - 1.0) > tol)
    throw std::invalid_argument("field is not normalized");
}

ArrayXcd to_conjugate(const ArrayXcd& f, const Grid1D& grid) {
  if (f.size() != grid.n) throw std::invalid_argument("to_conjugate: size mismatch");
  const Grid1D conj_grid = grid.conjugate();
  const int n = grid.n;
  const double q0 = grid.origin();
  const double k0 = conj_grid.origin();
  const double dq = grid.spacing;
  const bool forward = (grid.kind == Rep::position);
  // position -> momentum: phi_k = dx/sqrt(2 pi) e^{-i p_k x0} sum_j psi_j e^{-i p0 x_j'} w^{jk}
  // momentum -> position: conjugated kernel.
  const double sign = forward ? -1.0 : 1.0;
  ArrayXcd tmp(n);
  for (int j = 0; j < n; ++j) {
    double ph = sign * k0 * (j * dq);
    tmp[j] = f[j] * Complex(std::cos(ph), std::sin(ph));
  }
  detail::fft_radix2(tmp, !forward);
  const double scale = dq / std::sqrt(kTwoPi);
  ArrayXcd out(n);
  for (int k = 0; k < n; ++k) {
    double ph = sign * conj_grid.coord(k) * q0;
    out[k] = tmp[k] * (scale * Complex(std::cos(ph), std::sin(ph)));
  }
  return out;
}

WaveField to_conjugate(const WaveField& field) {
  WaveField out;
  out.grid = field.grid.conjugate();
  out.times = field.times;
  out.amplitudes.resize(field.amplitudes.rows(), field.amplitudes.cols());
  for (int t = 0; t < field.n_times(); ++t)
    out.amplitudes.row(t) = to_conjugate(field.slice(t), field.grid).transpose();
  return out;
}

ArrayXcd spectral_derivative(const ArrayXcd& f, const Grid1D& grid, int order) {
  if (f.size() != grid.n)
    throw std::invalid_argument("spectral_derivative: size mismatch");
  if (order < 1) throw std::invalid_argument("spectral_derivative: order >= 1");
  const int n = grid.n;
  ArrayXcd s = f;
  detail::fft_radix2(s, false);
  const double dk = kTwoPi / (n * grid.spacing);
  for (int m = 0; m < n; ++m) {
    double k;
    if (m < n / 2)
      k = m * dk;
    else if (m == n / 2)
      k = (order % 2 == 0) ? (n / 2) * dk : 0.0;  // Nyquist
    else
      k = (m - n) * dk;
    Complex mult = std::pow(Complex(0.0, k), order);
    s[m] *= mult;
  }
  detail::fft_radix2(s, true);
  return s / static_cast<double>(n);
}

PolarField polar_decompose(const ArrayXcd& psi, const Grid1D& grid) {
  if (psi.size() != grid.n) throw std::invalid_argument("polar_decompose: size mismatch");
  PolarField out;
  out.grid = grid;
  out.R = psi.abs();
  const double rmax = out.R.maxCoeff();
  if (!(rmax > 0.0)) throw std::invalid_argument("polar_decompose: all-zero slice");
  require_normalized(psi, grid);

  const int n = grid.n;
  const double threshold = kNodeThresholdRel * rmax;
  out.node_mask = out.R < threshold;

  int anchor = 0;
  out.R.maxCoeff(&anchor);

  ArrayXd raw(n);
  for (int i = 0; i < n; ++i) raw[i] = std::arg(psi[i]);

  out.S = ArrayXd::Zero(n);
  out.S[anchor] = raw[anchor];  // principal value in (-pi, pi] at the peak

  // Unwrap outward over unmasked samples; masked runs are bridged by the
  // nearest valid neighbours and filled by linear interpolation below.
  int prev = anchor;
  for (int i = anchor + 1; i < n; ++i) {
    if (out.node_mask[i]) continue;
    out.S[i] = out.S[prev] + wrap_to_pi(raw[i] - raw[prev]);
    prev = i;
  }
  prev = anchor;
  for (int i = anchor - 1; i >= 0; --i) {
    if (out.node_mask[i]) continue;
    out.S[i] = out.S[prev] + wrap_to_pi(raw[i] - raw[prev]);
    prev = i;
  }

  // Linear interpolation of S across masked runs.
  int i = 0;
  while (i < n) {
    if (!out.node_mask[i]) {
      ++i;
      continue;
    }
    int lo = i - 1;
    int hi = i;
    while (hi < n && out.node_mask[hi]) ++hi;
    for (int j = i; j < hi; ++j) {
      if (lo < 0 && hi >= n)
        out.S[j] = 0.0;
      else if (lo < 0)
        out.S[j] = out.S[hi];
      else if (hi >= n)
        out.S[j] = out.S[lo];
      else {
        double w = static_cast<double>(j - lo) / (hi - lo);
        out.S[j] = (1.0 - w) * out.S[lo] + w * out.S[hi];
      }
    }
    i = hi;
  }
  return out;
}

PhaseDerivs phase_derivatives(const ArrayXcd& psi, const Grid1D& grid) {
  const int n = grid.n;
  const double rmax = psi.abs().maxCoeff();
  if (!(rmax > 0.0)) throw std::invalid_argument("phase_derivatives: all-zero slice");
  const double threshold = kNodeThresholdRel * rmax;

  ArrayXcd d1 = spectral_derivative(psi, grid, 1);
  ArrayXcd d2 = spectral_derivative(psi, grid, 2);
  ArrayXcd d3 = spectral_derivative(psi, grid, 3);

  PhaseDerivs out;
  out.Sp.resize(n);
  out.Spp.resize(n);
  out.Sppp.resize(n);
  out.rp.resize(n);
  out.rpp.resize(n);
  out.node_mask.resize(n);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < n; ++i) {
    double R = std::abs(psi[i]);
    out.node_mask[i] = R < threshold;
    if (out.node_mask[i]) {
      out.Sp[i] = out.Spp[i] = out.Sppp[i] = out.rp[i] = out.rpp[i] = nan;
      continue;
    }
    // h_m = psi^(m)/psi; with g = (log psi)' = R'/R + i S':
    //   g = h1,  g' = h2 - h1^2,  g'' = h3 - 3 h1 h2 + 2 h1^3.
    Complex h1 = d1[i] / psi[i];
    Complex h2 = d2[i] / psi[i];
    Complex h3 = d3[i] / psi[i];
    Complex g1 = h1;
    Complex g2 = h2 - h1 * h1;
    Complex g3 = h3 - 3.0 * h1 * h2 + 2.0 * h1 * h1 * h1;
    out.Sp[i] = g1.imag();
    out.Spp[i] = g2.imag();
    out.Sppp[i] = g3.imag();
    out.rp[i] = g1.real();
    out.rpp[i] = h2.real() + g1.imag() * g1.imag();  // R''/R = Re h2 + S'^2
  }
  return out;
}

ArrayXd local_beable(const ArrayXcd& psi, const Grid1D& grid) {
  require_normalized(psi, grid);
  const int n = grid.n;
  const double rmax = psi.abs().maxCoeff();
  const double threshold = kNodeThresholdRel * rmax;
  ArrayXcd d1 = spectral_derivative(psi, grid, 1);
  ArrayXd out(n);
  const double sign = (grid.kind == Rep::position) ? 1.0 : -1.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < n; ++i) {
    double r2 = std::norm(psi[i]);
    if (std::abs(psi[i]) < threshold) {
      out[i] = nan;
      continue;
    }
    out[i] = sign * std::imag(std::conj(psi[i]) * d1[i]) / r2;
  }
  return out;
}

ArrayXd phase_gradient_fd(const ArrayXd& S, const Grid1D& grid) {
  if (S.size() != grid.n) throw std::invalid_argument("phase_gradient_fd: size mismatch");
  const int n = grid.n;
  const double h = grid.spacing;
  // 8th-order central weights for the first derivative.
  static const double w[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  ArrayXd out(n);
  for (int i = 0; i < n; ++i) {
    if (i >= 4 && i < n - 4) {
      double acc = 0.0;
      for (int k = 1; k <= 4; ++k) acc += w[k - 1] * (S[i + k] - S[i - k]);
      out[i] = acc / h;
    } else if (i >= 1 && i < n - 1) {
      out[i] = (S[i + 1] - S[i - 1]) / (2.0 * h);
    } else if (i == 0) {
      out[i] = (S[1] - S[0]) / h;
    } else {
      out[i] = (S[n - 1] - S[n - 2]) / h;
    }
  }
  return out;
}

}  // namespace dualrep
