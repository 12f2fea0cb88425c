#pragma once

// Cylinder functions J, Y, I, K and Hankel H1/H2 for integer orders.
//
// Real arguments: Miller downward recurrence for J and I (normalized by the
// Neumann sums J0 + 2*sum J_{2k} = 1 and e^x = I0 + 2*sum I_k), the Neumann
// log series for Y0/Y1 followed by upward recurrence, and a three-regime
// scheme for K (ascending series / integral representation / asymptotic
// expansion).  Complex arguments are supported for J, I and for K of order
// 0 and 1, which is what the resolvent kernels need.
//
// Series and expansions follow DLMF 10.2, 10.8, 10.31, 10.40.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

namespace biscat::bessel {

using cplx = std::complex<double>;

inline constexpr double euler_gamma = 0.57721566490153286060651209;

enum class Family { J, Y, I, K, H1, H2 };

namespace detail {

inline int miller_start(int order, double x) {
  double base = std::max<double>(order, x);
  return static_cast<int>(base + 18 + 9.0 * std::cbrt(base + 1.0)) | 1;
}

// J_0..J_n by downward recurrence; relative accuracy ~1e-13 for x <= 1e3.
inline void j_array(double x, int n, std::vector<double>& out) {
  out.assign(n + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return;
  }
  const int M = miller_start(n, x);
  std::vector<double> tmp(M + 1, 0.0);
  double jp1 = 0.0, j = 1e-300;
  tmp[M] = j;
  for (int m = M; m >= 1; --m) {
    double jm1 = (2.0 * m / x) * j - jp1;
    jp1 = j;
    j = jm1;
    tmp[m - 1] = j;
    if (std::abs(j) > 1e250) {
      for (int q = m - 1; q <= M; ++q) tmp[q] *= 1e-250;
      j *= 1e-250;
      jp1 *= 1e-250;
    }
  }
  double norm = tmp[0];
  for (int m = 2; m <= M; m += 2) norm += 2.0 * tmp[m];
  for (int m = 0; m <= std::min(n, M); ++m) out[m] = tmp[m] / norm;
}

// Y0, Y1 from the Neumann series (DLMF 10.8.1 rearranged):
//   Y0 = (2/pi)[(ln(x/2)+g) J0 - 2 sum_{k>=1} (-1)^k J_{2k}/k],  Y1 = -Y0'.
inline void y01(double x, double& y0, double& y1) {
  const int n = miller_start(0, x) - 2;
  std::vector<double> J;
  j_array(x, n, J);
  const double lg = std::log(0.5 * x) + euler_gamma;
  long double s0 = 0.0L, s1 = 0.0L;
  double sgn = -1.0;
  for (int k = 1; 2 * k + 1 < n; ++k) {
    s0 += sgn * J[2 * k] / k;
    s1 += sgn * 0.5 * (J[2 * k - 1] - J[2 * k + 1]) / k;
    sgn = -sgn;
  }
  y0 = (2.0 / M_PI) * (lg * J[0] - 2.0 * static_cast<double>(s0));
  y1 = -(2.0 / M_PI) * (J[0] / x - lg * J[1] - 2.0 * static_cast<double>(s1));
}

// Ascending series for K0, K1 (DLMF 10.31.1-2).  Accumulation type F is
// double for small |z| and long double up to |z| ~ 7, after which the
// e^{2|z|} cancellation bites.
template <class F, class T>
inline void k01_series_acc(T z, T& k0, T& k1) {
  using C = std::complex<F>;
  C zz(static_cast<F>(std::real(z)), static_cast<F>(std::imag(z)));
  C q = zz * zz * F(0.25);
  C i0(F(1)), i1(F(1));
  C t0(F(1)), t1(F(1));
  C s0(F(0)), s1(F(0));
  F hk = 0;
  for (int k = 1; k < 80; ++k) {
    t0 *= q / static_cast<F>(k * k);
    t1 *= q / static_cast<F>(k * (k + 1));
    i0 += t0;
    i1 += t1;
    hk += F(1) / k;
    s0 += hk * t0;
    s1 += (hk + hk + F(1) / (k + 1)) * t1;
    if (std::abs(t0) < F(1e-20) * std::abs(i0)) break;
  }
  C lg = std::log(zz * F(0.5)) + F(euler_gamma);
  C K0 = -lg * i0 + s0;
  // K1 = 1/z + (ln(z/2)+g) I1 - (z/4)(1 + sum (2 h_k + 1/(k+1)) t1_k)
  C I1 = (zz * F(0.5)) * i1;
  C K1 = F(1) / zz + lg * I1 - (zz * F(0.25)) * (F(1) + s1);
  if constexpr (std::is_same_v<T, double>) {
    k0 = static_cast<double>(K0.real());
    k1 = static_cast<double>(K1.real());
  } else {
    k0 = T(static_cast<double>(K0.real()), static_cast<double>(K0.imag()));
    k1 = T(static_cast<double>(K1.real()), static_cast<double>(K1.imag()));
  }
}

template <class T>
inline void k01_series(T z, T& k0, T& k1) {
  if (std::abs(z) < 3.5)
    k01_series_acc<double>(z, k0, k1);
  else
    k01_series_acc<long double>(z, k0, k1);
}

// Adaptive Gauss-Legendre for the representation K_n(z) = int_0^inf
// e^{-z cosh t} cosh(n t) dt, Re z > 0.  Used in the mid-range where
// neither the series nor the asymptotic expansion reaches 1e-12.
template <class T>
inline T k_integral(int n, T z) {
  const double rez = [&] {
    if constexpr (std::is_same_v<T, double>) return z;
    else return z.real();
  }();
  const double tmax = std::acosh(745.0 / rez);
  static const double gx[12] = {
      -0.9815606342467192, -0.9041172563704748, -0.7699026741943047,
      -0.5873179542866175, -0.3678314989981802, -0.1252334085114689,
      0.1252334085114689,  0.3678314989981802,  0.5873179542866175,
      0.7699026741943047,  0.9041172563704748,  0.9815606342467192};
  static const double gw[12] = {
      0.0471753363865118, 0.1069393259953184, 0.1600783285433462,
      0.2031674267230659, 0.2334925365383548, 0.2491470458134028,
      0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
      0.1600783285433462, 0.1069393259953184, 0.0471753363865118};
  auto panel = [&](double a, double b) {
    T s{};
    const double mid = 0.5 * (a + b), hl = 0.5 * (b - a);
    for (int q = 0; q < 12; ++q) {
      double t = mid + hl * gx[q];
      s += gw[q] * std::exp(-z * std::cosh(t)) * std::cosh(n * t);
    }
    return s * hl;
  };
  struct Seg { double a, b; T val; int depth; };
  T whole = panel(0.0, tmax);
  const double floor_abs = 1e-16 * std::abs(whole) + 1e-300;
  std::vector<Seg> stack{{0.0, tmax, whole, 0}};
  T total{};
  while (!stack.empty()) {
    Seg s = stack.back();
    stack.pop_back();
    double m = 0.5 * (s.a + s.b);
    T left = panel(s.a, m), right = panel(m, s.b);
    if (s.depth > 26 ||
        std::abs(left + right - s.val) <=
            1e-15 * (std::abs(left) + std::abs(right)) + floor_abs) {
      total += left + right;
    } else {
      stack.push_back({s.a, m, left, s.depth + 1});
      stack.push_back({m, s.b, right, s.depth + 1});
    }
  }
  return total;
}

// Asymptotic expansion DLMF 10.40.2; optimal truncation error ~ e^{-2|z|},
// below 1e-15 for |z| >= 18.
template <class T>
inline T k_asymptotic(int nu, T z) {
  T sum(1.0), term(1.0);
  double prev = std::numeric_limits<double>::max();
  const double mu = 4.0 * nu * nu;
  for (int k = 1; k < 60; ++k) {
    term *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * z);
    if (std::abs(term) >= prev) break;
    sum += term;
    prev = std::abs(term);
    if (prev < 1e-17 * std::abs(sum)) break;
  }
  return std::sqrt(M_PI / (2.0 * z)) * std::exp(-z) * sum;
}

template <class T>
inline void k01_dispatch(T z, T& k0, T& k1) {
  const double az = std::abs(z);
  if (az <= 7.0) {
    k01_series(z, k0, k1);
  } else if (az < 18.0) {
    k0 = k_integral(0, z);
    k1 = k_integral(1, z);
  } else {
    k0 = k_asymptotic(0, z);
    k1 = k_asymptotic(1, z);
  }
}

// Ascending series for J0, Y0, J1, Y1 (DLMF 10.2.2, 10.8.1); usable up to
// x ~ 12 before cancellation grows.  This is the allocation-free path the
// kernel assembly loops hit, so the accumulation type widens only when the
// argument actually needs it.
template <class F>
inline void jy01_series_acc(double x, double& j0, double& y0, double& j1, double& y1) {
  const F q = F(-0.25) * F(x) * F(x);
  F t0 = 1, t1 = 1;
  F J0 = 1, J1h = 1;  // J1 = (x/2) * J1h
  F S0 = 0, S1 = 1;   // S1 k=0 term: (2 h_0 + 1/(0+1)) = 1
  F hk = 0;
  for (int k = 1; k < 64; ++k) {
    t0 *= q / F(k * k);
    t1 *= q / F(k * (k + 1));
    J0 += t0;
    J1h += t1;
    hk += F(1) / k;
    S0 += -hk * t0;                         // sum (-1)^{k+1} h_k (x/2)^{2k}/(k!)^2
    S1 += (hk + hk + F(1) / (k + 1)) * t1;  // sum (2 h_k + 1/(k+1)) * t1_k
    if (std::abs(t0) < F(1e-20) * std::abs(J0) && k > 3) break;
  }
  const F lg = std::log(F(0.5) * F(x)) + F(euler_gamma);
  j0 = static_cast<double>(J0);
  j1 = static_cast<double>(F(0.5) * F(x) * J1h);
  y0 = static_cast<double>((F(2) / F(M_PI)) * (lg * J0 + S0));
  y1 = static_cast<double>(F(-2) / (F(M_PI) * F(x)) + (F(2) / F(M_PI)) * lg * (F(0.5) * F(x) * J1h) -
                           (F(x) / (F(2) * F(M_PI))) * S1);
}

inline void jy01_series(double x, double& j0, double& y0, double& j1, double& y1) {
  if (x < 6.0)
    jy01_series_acc<double>(x, j0, y0, j1, y1);
  else
    jy01_series_acc<long double>(x, j0, y0, j1, y1);
}

// I0/I1 ascending series: all terms positive, no cancellation at any x.
inline void i01_series(double x, double& i0, double& i1) {
  const double q = 0.25 * x * x;
  double t0 = 1.0, t1 = 1.0, I0 = 1.0, I1h = 1.0;
  for (int k = 1; k < 90; ++k) {
    t0 *= q / (k * k);
    t1 *= q / (k * (k + 1));
    I0 += t0;
    I1h += t1;
    if (t0 < 1e-17 * I0 && k > 3) break;
  }
  i0 = I0;
  i1 = 0.5 * x * I1h;
}

inline bool jy01_fast_ok(double x) { return x > 0.0 && x < 12.0; }

// Power series for J_m and I_m, complex argument (DLMF 10.2.2, 10.25.2).
inline cplx ji_series(int m, cplx z, bool modified) {
  using LD = std::complex<long double>;
  LD zz(z.real(), z.imag());
  LD q = zz * zz * 0.25L;
  if (!modified) q = -q;
  LD term(1.0L), sum(1.0L);
  for (int j = 1; j < 120; ++j) {
    term *= q / static_cast<long double>(j * (m + j));
    sum += term;
    if (std::abs(term) < 1e-21L * std::abs(sum) && j > 4) break;
  }
  LD pref(1.0L);
  for (int j = 1; j <= m; ++j) pref *= zz * 0.5L / static_cast<long double>(j);
  LD r = pref * sum;
  return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
}

}  // namespace detail

inline double j(int order, double x) {
  if (order < 0 || x < 0.0) throw std::domain_error("bessel::j: order >= 0, x >= 0 required");
  if (order <= 1 && detail::jy01_fast_ok(x)) {
    double j0, y0, j1, y1;
    detail::jy01_series(x, j0, y0, j1, y1);
    return order == 0 ? j0 : j1;
  }
  std::vector<double> J;
  detail::j_array(x, order, J);
  return J[order];
}

inline void j_many(double x, int max_order, std::vector<double>& out) {
  detail::j_array(x, max_order, out);
}

inline double y(int order, double x) {
  if (order < 0 || x <= 0.0) throw std::domain_error("bessel::y: order >= 0, x > 0 required");
  double y0, y1;
  if (detail::jy01_fast_ok(x)) {
    double j0, j1;
    detail::jy01_series(x, j0, y0, j1, y1);
  } else {
    detail::y01(x, y0, y1);
  }
  if (order == 0) return y0;
  double ym1 = y0, yc = y1;
  for (int m = 1; m < order; ++m) {
    double yp1 = (2.0 * m / x) * yc - ym1;
    if (!std::isfinite(yp1)) throw std::domain_error("bessel::y: overflow");
    ym1 = yc;
    yc = yp1;
  }
  return yc;
}

inline double i(int order, double x) {
  if (order < 0 || x < 0.0) throw std::domain_error("bessel::i: order >= 0, x >= 0 required");
  if (x > 700.0) throw std::domain_error("bessel::i: argument overflows double range");
  if (x == 0.0) return order == 0 ? 1.0 : 0.0;
  if (order <= 1 && x < 30.0) {
    double i0, i1;
    detail::i01_series(x, i0, i1);
    return order == 0 ? i0 : i1;
  }
  const int M = detail::miller_start(order, x);
  std::vector<double> tmp(M + 1, 0.0);
  double ip1 = 0.0, iv = 1e-300;
  tmp[M] = iv;
  for (int m = M; m >= 1; --m) {
    double im1 = (2.0 * m / x) * iv + ip1;
    ip1 = iv;
    iv = im1;
    tmp[m - 1] = iv;
    if (std::abs(iv) > 1e250) {
      for (int q = m - 1; q <= M; ++q) tmp[q] *= 1e-250;
      iv *= 1e-250;
      ip1 *= 1e-250;
    }
  }
  long double norm = tmp[0];
  for (int m = 1; m <= M; ++m) norm += 2.0L * tmp[m];
  long double r = (long double)tmp[order] * (std::exp((long double)x) / norm);
  if (r > std::numeric_limits<double>::max())
    throw std::domain_error("bessel::i: overflow");
  return static_cast<double>(r);
}

inline double k(int order, double x) {
  if (order < 0 || x <= 0.0) throw std::domain_error("bessel::k: order >= 0, x > 0 required");
  double k0, k1;
  detail::k01_dispatch(x, k0, k1);
  if (order == 0) return k0;
  double km1 = k0, kc = k1;
  for (int m = 1; m < order; ++m) {
    double kp1 = km1 + (2.0 * m / x) * kc;
    if (!std::isfinite(kp1)) throw std::domain_error("bessel::k: overflow");
    km1 = kc;
    kc = kp1;
  }
  return kc;
}

inline cplx j(int order, cplx z) {
  if (order < 0) throw std::domain_error("bessel::j: order >= 0 required");
  if (z.imag() == 0.0 && z.real() >= 0.0) return {j(order, z.real()), 0.0};
  if (std::abs(z) > 40.0) throw std::domain_error("bessel::j: complex series limited to |z| <= 40");
  return detail::ji_series(order, z, false);
}

inline cplx i(int order, cplx z) {
  if (order < 0) throw std::domain_error("bessel::i: order >= 0 required");
  if (z.imag() == 0.0 && z.real() >= 0.0) return {i(order, z.real()), 0.0};
  if (std::abs(z) > 40.0) throw std::domain_error("bessel::i: complex series limited to |z| <= 40");
  return detail::ji_series(order, z, true);
}

// K_0/K_1 for complex argument, Re z > 0.
inline cplx k01(int order, cplx z) {
  if (order != 0 && order != 1) throw std::domain_error("bessel::k01: order 0 or 1");
  if (z.real() <= 0.0) throw std::domain_error("bessel::k01: Re z > 0 required");
  if (z.imag() == 0.0) return {k(order, z.real()), 0.0};
  cplx k0, k1;
  detail::k01_dispatch(z, k0, k1);
  return order == 0 ? k0 : k1;
}

inline cplx h1(int order, double x) { return {j(order, x), y(order, x)}; }
inline cplx h2(int order, double x) { return std::conj(h1(order, x)); }

// d/dx of J, Y via the two-sided recurrence; order 0 uses f0' = -f1.
inline double jp(int order, double x) {
  if (order == 0) return -j(1, x);
  return 0.5 * (j(order - 1, x) - j(order + 1, x));
}
inline double yp(int order, double x) {
  if (order == 0) return -y(1, x);
  return 0.5 * (y(order - 1, x) - y(order + 1, x));
}
inline cplx h1p(int order, double x) { return {jp(order, x), yp(order, x)}; }
inline cplx h2p(int order, double x) { return std::conj(h1p(order, x)); }
inline double ip(int order, double x) {
  if (order == 0) return i(1, x);
  return 0.5 * (i(order - 1, x) + i(order + 1, x));
}
inline double kp(int order, double x) {
  if (order == 0) return -k(1, x);
  return -0.5 * (k(order - 1, x) + k(order + 1, x));
}

// Uniform entry point matching the per-family domains above.
inline cplx eval(Family f, int order, cplx arg) {
  const bool real_arg = arg.imag() == 0.0;
  switch (f) {
    case Family::J: return j(order, arg);
    case Family::I: return i(order, arg);
    case Family::Y:
      if (!real_arg) throw std::domain_error("bessel: Y requires real positive argument");
      return {y(order, arg.real()), 0.0};
    case Family::K:
      if (real_arg) return {k(order, arg.real()), 0.0};
      return k01(order, arg);
    case Family::H1:
      if (!real_arg) throw std::domain_error("bessel: H1 requires real positive argument");
      return h1(order, arg.real());
    case Family::H2:
      if (!real_arg) throw std::domain_error("bessel: H2 requires real positive argument");
      return h2(order, arg.real());
  }
  throw std::logic_error("bessel::eval: bad family");
}

}  // namespace biscat::bessel
