#pragma once

// Free resolvent kernels of (-Delta + z) in 2D and their boundary limits,
// plus plane-wave traces.
//
// Resolvent regime (z off the cut (-inf,0]):  (1/2pi) K_0(sqrt(z) r) with the
// principal branch, Re sqrt(z) > 0.  Boundary-limit regime at energy
// lambda < 0, wavenumber k = sqrt(-lambda):
//   side "+" : (i/4) H1_0(k r)      (outgoing)
//   side "-" : -(i/4) H2_0(k r)     (elementwise conjugate)
// The lambda <-> z continuity checks approach the "+" side from Im z < 0;
// see the limiting-absorption tests.

#include <complex>
#include <stdexcept>
#include <variant>
#include <vector>

#include "biscat/bessel.hpp"
#include "biscat/geometry.hpp"

namespace biscat {

using cplx = std::complex<double>;
inline constexpr cplx iu{0.0, 1.0};

enum class LimitSide { plus, minus };

struct ResolventPoint {
  cplx z;
};

struct LimitPoint {
  double lambda;  // < 0
  LimitSide side = LimitSide::plus;
};

struct SpectralPoint {
  std::variant<ResolventPoint, LimitPoint> p;

  static SpectralPoint resolvent(cplx z) {
    if (z.imag() == 0.0 && z.real() <= 0.0)
      throw std::domain_error("SpectralPoint: z on the cut (-inf,0]");
    return {ResolventPoint{z}};
  }
  static SpectralPoint limit(double lambda, LimitSide side = LimitSide::plus) {
    if (!(lambda < 0.0)) throw std::domain_error("SpectralPoint: limit regime needs lambda < 0");
    return {LimitPoint{lambda, side}};
  }

  bool is_limit() const { return std::holds_alternative<LimitPoint>(p); }
  cplx z() const { return std::get<ResolventPoint>(p).z; }
  double lambda() const { return std::get<LimitPoint>(p).lambda; }
  LimitSide side() const { return std::get<LimitPoint>(p).side; }
  double wavenumber() const { return std::sqrt(-lambda()); }

  // the Helmholtz parameter z in (-Delta + z); equals lambda on the cut
  cplx helmholtz_z() const { return is_limit() ? cplx(lambda(), 0.0) : z(); }

  SpectralPoint conjugated() const {
    if (is_limit())
      return {LimitPoint{lambda(), side() == LimitSide::plus ? LimitSide::minus : LimitSide::plus}};
    return {ResolventPoint{std::conj(z())}};
  }
};

inline cplx resolvent_kernel(const SpectralPoint& p, double r) {
  if (!(r > 0.0)) throw std::domain_error("resolvent_kernel: r > 0 required (diagonal handled by quadrature)");
  if (p.is_limit()) {
    double k = p.wavenumber();
    cplx v = 0.25 * iu * bessel::h1(0, k * r);
    return p.side() == LimitSide::plus ? v : std::conj(v);
  }
  cplx s = std::sqrt(p.z());
  return bessel::k01(0, s * r) / (2.0 * M_PI);
}

// d/dr of the kernel; used by double-layer evaluation off the curve.
inline cplx resolvent_kernel_dr(const SpectralPoint& p, double r) {
  if (!(r > 0.0)) throw std::domain_error("resolvent_kernel_dr: r > 0 required");
  if (p.is_limit()) {
    double k = p.wavenumber();
    cplx v = -0.25 * iu * k * bessel::h1(1, k * r);
    return p.side() == LimitSide::plus ? v : std::conj(v);
  }
  cplx s = std::sqrt(p.z());
  return -s * bessel::k01(1, s * r) / (2.0 * M_PI);
}

// Split kernel(r) = log_coeff(r) * ln(r) + smooth(r); both factors analytic
// in r^2, evaluated without subtracting the log (series from DLMF 10.8.1,
// 10.31.2).  Drives the Kress log-quadrature and the adaptive panel rule.
struct KernelSplit {
  SpectralPoint p;
  cplx sqrt_z;   // sqrt(z) resolvent, -ik not stored; limit handled via k
  double k = 0.0;
  bool limit = false;
  bool minus_side = false;

  explicit KernelSplit(const SpectralPoint& point) : p(point) {
    limit = point.is_limit();
    if (limit) {
      k = point.wavenumber();
      minus_side = point.side() == LimitSide::minus;
    } else {
      sqrt_z = std::sqrt(point.z());
    }
  }

  cplx log_coeff(double r) const {
    cplx v;
    if (limit)
      v = -bessel::j(0, k * r) / (2.0 * M_PI);
    else
      v = -bessel::i(0, sqrt_z * cplx(r)) / (2.0 * M_PI);
    return (limit && minus_side) ? std::conj(v) : v;
  }

  cplx smooth_part(double r) const {
    cplx v;
    if (limit) {
      double x = k * r;
      double j0 = bessel::j(0, x);
      v = 0.25 * iu * j0 -
          ((std::log(0.5 * k) + bessel::euler_gamma) * j0 + y_log_remainder(x)) / (2.0 * M_PI);
      if (minus_side) v = std::conj(v);
    } else {
      cplx w = sqrt_z * r;
      cplx i0 = bessel::i(0, w);
      v = (-(std::log(0.5 * sqrt_z) + bessel::euler_gamma) * i0 + k_log_remainder(w)) / (2.0 * M_PI);
    }
    return v;
  }

  // value of smooth_part at r = 0
  cplx smooth_at_zero() const {
    if (limit) {
      cplx v = 0.25 * iu - (std::log(0.5 * k) + bessel::euler_gamma) / (2.0 * M_PI);
      return minus_side ? std::conj(v) : v;
    }
    return -(std::log(0.5 * sqrt_z) + bessel::euler_gamma) / (2.0 * M_PI);
  }

  cplx log_coeff_at_zero() const { return {-1.0 / (2.0 * M_PI), 0.0}; }

 private:
  // sum_{m>=1} (-1)^{m+1} h_m (x/2)^{2m} / (m!)^2   (Y0 ascending tail)
  static double y_log_remainder(double x) {
    long double q = -0.25L * (long double)x * (long double)x;
    long double term = 1.0L, h = 0.0L, s = 0.0L;
    for (int m = 1; m < 80; ++m) {
      term *= q / (long double)(m * m);
      h += 1.0L / m;
      s += -h * term;  // (-1)^{m+1} (x/2)^{2m} = -(q)^m sign folded in
      if (std::abs(term) < 1e-21L * (std::abs(s) + 1.0L)) break;
    }
    return static_cast<double>(s);
  }
  // sum_{m>=1} h_m (w/2)^{2m} / (m!)^2   (K0 ascending tail); all terms
  // positive for real w, so the real branch runs in plain double
  static cplx k_log_remainder(cplx w) {
    if (w.imag() == 0.0) {
      double q = 0.25 * w.real() * w.real();
      double term = 1.0, s = 0.0, h = 0.0;
      for (int m = 1; m < 90; ++m) {
        term *= q / (m * m);
        h += 1.0 / m;
        s += h * term;
        if (term < 1e-18 * (s + 1.0)) break;
      }
      return {s, 0.0};
    }
    std::complex<long double> q{(long double)(w.real()), (long double)(w.imag())};
    q = q * q * 0.25L;
    std::complex<long double> term(1.0L), s(0.0L);
    long double h = 0.0L;
    for (int m = 1; m < 80; ++m) {
      term *= q / (long double)(m * m);
      h += 1.0L / m;
      s += h * term;
      if (std::abs(term) < 1e-21L * (std::abs(s) + 1.0L)) break;
    }
    return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
  }
};

enum class TraceKind { value, normal_derivative };

// Trace of the plane wave e^{i k xi.x} (or of its normal derivative) at the
// mesh nodes.
inline std::vector<cplx> plane_wave_trace(TraceKind kind, double k, Vec2 xi,
                                          const BoundaryMesh& mesh) {
  if (std::abs(xi.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("plane_wave_trace: direction must be a unit vector");
  if (!(k > 0.0)) throw std::invalid_argument("plane_wave_trace: k > 0 required");
  std::vector<cplx> out(mesh.size());
  for (int j = 0; j < mesh.size(); ++j) {
    cplx phase = std::exp(iu * (k * xi.dot(mesh.nodes[j])));
    out[j] = kind == TraceKind::value ? phase : iu * k * xi.dot(mesh.normals[j]) * phase;
  }
  return out;
}

}  // namespace biscat
