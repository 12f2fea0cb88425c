#pragma once

// Separation-of-variables reference on the disk.  Per angular mode m the
// incident J_m(kr) wave scatters into b_m H1_m(kr) outside (and a_m J_m(kr)
// inside for the transmission models); the S-matrix eigenvalue is
// s_m = 1 + 2 b_m.  Two independent code paths: the closed forms below and a
// numeric solve of the 2x2 interface-matching system.  Composes Bessel
// evaluations only; no shared assembly code with layer_ops/scattering.
//
// Interface conditions (jumps are exterior minus interior):
//   Dirichlet   u = 0 on Gamma
//   Neumann     du/dnu = 0 one-sided
//   delta       [u] = 0,  alpha u = [du/dnu]
//   delta'      [du/dnu] = 0,  du/dnu = theta [u]

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "biscat/bessel.hpp"
#include "biscat/lambda_models.hpp"

namespace biscat {

struct PartialWaveTable {
  double radius = 1.0;
  double k = 1.0;
  ModelSpec::Variant model = ModelSpec::Variant::dirichlet;
  double strength = 0.0;
  std::vector<cplx> s;            // s_m for m = 0..max_mode (s_{-m} = s_m)
  std::vector<int> flagged;       // modes where the 2x2 system was singular
  double two_path_max_diff = 0.0; // closed form vs numeric 2x2

  int max_mode() const { return static_cast<int>(s.size()) - 1; }
  cplx value(int m) const { return s[std::abs(m)]; }
};

namespace detail {

inline cplx disk_mode_closed_form(ModelSpec::Variant model, double R, double k, double strength,
                                  int m) {
  const double x = k * R;
  const double J = bessel::j(m, x), Jp = bessel::jp(m, x);
  const cplx H = bessel::h1(m, x), Hp = bessel::h1p(m, x);
  switch (model) {
    case ModelSpec::Variant::dirichlet:
      return -bessel::h2(m, x) / H;
    case ModelSpec::Variant::neumann:
      return -bessel::h2p(m, x) / Hp;
    case ModelSpec::Variant::delta_alpha: {
      const double a = strength;
      return 1.0 - 2.0 * iu * M_PI * R * a * J * J / (2.0 + iu * M_PI * R * a * J * H);
    }
    case ModelSpec::Variant::delta_prime_theta: {
      const double t = strength;
      return 1.0 - 2.0 * M_PI * R * k * k * Jp * Jp /
                       (M_PI * R * k * k * Jp * Hp + 2.0 * iu * t);
    }
  }
  throw std::logic_error("disk_mode_closed_form: bad model");
}

// Numeric path: interior a J_m(kr), exterior J_m(kr) + b H1_m(kr); impose the
// model's interface conditions at r = R and solve for (a, b).
inline bool disk_mode_numeric(ModelSpec::Variant model, double R, double k, double strength,
                              int m, cplx& s_out) {
  const double x = k * R;
  const double J = bessel::j(m, x), Jp = bessel::jp(m, x);
  const cplx H = bessel::h1(m, x), Hp = bessel::h1p(m, x);
  cplx b;
  switch (model) {
    case ModelSpec::Variant::dirichlet:
      if (std::abs(H) < 1e-14) return false;
      b = -J / H;
      break;
    case ModelSpec::Variant::neumann:
      if (std::abs(Hp) < 1e-14) return false;
      b = -Jp / Hp;
      break;
    case ModelSpec::Variant::delta_alpha: {
      // a J - b H = J ;  a (alpha J + k J') - b k H' = k J'
      const double al = strength;
      cplx m00 = J, m01 = -H;
      cplx m10 = al * J + k * Jp, m11 = -k * Hp;
      cplx det = m00 * m11 - m01 * m10;
      if (std::abs(det) < 1e-13 * (std::abs(m00 * m11) + std::abs(m01 * m10) + 1e-30))
        return false;
      b = (m00 * (k * Jp) - m10 * J) / det;
      break;
    }
    case ModelSpec::Variant::delta_prime_theta: {
      // a J' - b H' = J' ;  a (k J' + th J) - b th H = th J
      const double th = strength;
      cplx m00 = Jp, m01 = -Hp;
      cplx m10 = k * Jp + th * J, m11 = -th * H;
      cplx det = m00 * m11 - m01 * m10;
      if (std::abs(det) < 1e-13 * (std::abs(m00 * m11) + std::abs(m01 * m10) + 1e-30))
        return false;
      b = (m00 * (th * J) - m10 * Jp) / det;
      break;
    }
    default:
      return false;
  }
  s_out = 1.0 + 2.0 * b;
  return true;
}

}  // namespace detail

inline PartialWaveTable disk_partial_wave(ModelSpec::Variant model, double R, double k,
                                          double strength, int max_mode = -1) {
  if (!(k > 0.0) || !(R > 0.0))
    throw std::invalid_argument("disk_partial_wave: k > 0 and R > 0 required");
  if (max_mode < 0) max_mode = static_cast<int>(std::ceil(k * R)) + 10;
  PartialWaveTable tab;
  tab.radius = R;
  tab.k = k;
  tab.model = model;
  tab.strength = strength;
  tab.s.resize(max_mode + 1);
  for (int m = 0; m <= max_mode; ++m) {
    tab.s[m] = detail::disk_mode_closed_form(model, R, k, strength, m);
    cplx s2;
    if (detail::disk_mode_numeric(model, R, k, strength, m, s2))
      tab.two_path_max_diff = std::max(tab.two_path_max_diff, std::abs(tab.s[m] - s2));
    else
      tab.flagged.push_back(m);
  }
  return tab;
}

// Mode-m bound state of the attractive delta interaction on the disk:
// root of  alpha R I_m(sqrt(l) R) K_m(sqrt(l) R) = -1  on (0, lambda_max].
inline std::optional<double> disk_bound_state_equation(double R, double alpha, int m,
                                                       double lambda_max = 50.0) {
  if (alpha >= 0.0) return std::nullopt;  // left side is negative only for alpha < 0
  auto f = [&](double lam) {
    double x = std::sqrt(lam) * R;
    return alpha * R * bessel::i(m, x) * bessel::k(m, x) + 1.0;
  };
  // f is increasing (I_m K_m decreases); f(0+) = -inf for m = 0,
  // alpha R/(2m) + 1 for m >= 1
  double lo = 1e-12, hi = lambda_max;
  double flo = m == 0 ? -1.0 : alpha * R / (2.0 * m) + 1.0;
  if (flo >= 0.0) return std::nullopt;
  if (f(hi) <= 0.0) return std::nullopt;  // root beyond the search window
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) <= 0.0) lo = mid; else hi = mid;
    if ((hi - lo) < 1e-12 * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace biscat
