#pragma once

// Dense assembly of the boundary operators gamma0 SL_z (weakly singular,
// Kress log-quadrature on smooth curves, adaptive panel quadrature on
// polygons) and gamma1 DL_z (hypersingular, assembled through the
// integration-by-parts weak form: only its inverse or weak pairings are ever
// used).  Also off-curve evaluation of layer potentials and the jump-relation
// diagnostic.
//
// Conventions: operators act on vectors of node values and include the
// arclength weights, (K phi)_i ~ int_Gamma kern(|y_i - y|) phi(y) dmu(y).
// Jumps are exterior minus interior traces throughout.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "biscat/geometry.hpp"
#include "biscat/kernels.hpp"

namespace biscat {

using Mat = Eigen::MatrixXcd;
using Vcx = Eigen::VectorXcd;
using Vre = Eigen::VectorXd;

enum class OperatorKind { single_layer_trace, hypersingular_trace, lambda, other };
enum class SpaceTag { density, trace };

struct BoundaryOperator {
  Mat m;
  SpectralPoint point;
  OperatorKind kind = OperatorKind::other;
  SpaceTag domain_space = SpaceTag::density;
  SpaceTag range_space = SpaceTag::trace;
  // de-weighted symmetry defect of the raw assembly, before the kernel
  // symmetry k(x,y) = k(y,x) is restored exactly (polygons only; the Kress
  // rule is symmetric by construction)
  double symmetry_defect = 0.0;
};

namespace detail {

// Kress weights R_d for the log factor ln(4 sin^2((t - tau)/2)); they depend
// only on the index difference d = (i - j) mod N.
inline std::vector<double> kress_weights(int N) {
  const int n = N / 2;
  std::vector<double> R(N, 0.0);
  for (int d = 0; d < N; ++d) {
    double td = 2.0 * M_PI * d / N;
    double s = 0.0;
    for (int m = 1; m < n; ++m) s -= (2.0 * M_PI / n) * std::cos(m * td) / m;
    s -= (M_PI / (n * n)) * std::cos(n * td);
    R[d] = s;
  }
  return R;
}

struct GaussRule {
  std::vector<double> x, w;
};

inline const GaussRule& gauss_rule(int p) {
  static std::vector<GaussRule> cache(64);
  if (p < 1 || p >= 64) throw std::invalid_argument("gauss_rule: order out of range");
  if (cache[p].x.empty()) detail::gauss_legendre(p, cache[p].x, cache[p].w);
  return cache[p];
}

// Adaptive composite Gauss-Legendre on [a,b]; subdivides until the change
// drops below tol relative to the local value, with an absolute floor to
// keep cancellation-dominated segments from recursing forever.  f may be
// log-singular at an endpoint.
template <class F>
cplx adaptive_gl_impl(const F& f, double a, double b, double tol, double floor_abs, int depth) {
  const GaussRule& g = gauss_rule(10);
  auto panel = [&](double lo, double hi) {
    cplx s{0.0, 0.0};
    double mid = 0.5 * (lo + hi), hl = 0.5 * (hi - lo);
    for (size_t q = 0; q < g.x.size(); ++q) s += g.w[q] * f(mid + hl * g.x[q]);
    return s * hl;
  };
  cplx whole = panel(a, b);
  double m = 0.5 * (a + b);
  cplx split = panel(a, m) + panel(m, b);
  if (depth >= 34 || std::abs(split - whole) <= tol * std::abs(split) + floor_abs)
    return split;
  return adaptive_gl_impl(f, a, m, tol, floor_abs, depth + 1) +
         adaptive_gl_impl(f, m, b, tol, floor_abs, depth + 1);
}

template <class F>
cplx adaptive_gl(const F& f, double a, double b, double tol) {
  const double floor_abs = 1e-14 * (b - a);
  return adaptive_gl_impl(f, a, b, tol, floor_abs, 0);
}

// Lagrange basis values at t for the panel's Gauss nodes ts.
inline double lagrange_basis(const std::vector<double>& ts, const std::vector<double>& bw,
                             int q, double t) {
  double L = bw[q];
  for (size_t r = 0; r < ts.size(); ++r)
    if (static_cast<int>(r) != q) L *= (t - ts[r]);
  return L;
}

inline std::vector<double> barycentric_weights(const std::vector<double>& ts) {
  std::vector<double> bw(ts.size(), 1.0);
  for (size_t q = 0; q < ts.size(); ++q)
    for (size_t r = 0; r < ts.size(); ++r)
      if (r != q) bw[q] /= (ts[q] - ts[r]);
  return bw;
}

// Single-layer node operator, optionally with the (nu_i . nu_j)-weighted
// kernel needed by the weak hypersingular form.
inline Mat assemble_single_layer(const BoundaryMesh& mesh, const SpectralPoint& p,
                                 bool nu_weighted) {
  const int N = mesh.size();
  Mat K(N, N);
  KernelSplit split(p);

  if (mesh.smooth) {
    const auto R = kress_weights(N);
    const double h = 2.0 * M_PI / N;
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        double nn = nu_weighted ? mesh.normals[i].dot(mesh.normals[j]) : 1.0;
        if (i == j) {
          cplx M1 = 0.5 * split.log_coeff_at_zero();
          cplx M2 = split.smooth_at_zero() + split.log_coeff_at_zero() * std::log(mesh.speeds[i]);
          K(i, i) = nn * (R[0] * M1 + h * M2) * mesh.speeds[i];
          continue;
        }
        double r = (mesh.nodes[i] - mesh.nodes[j]).norm();
        double dt = mesh.params[i] - mesh.params[j];
        double s2 = 2.0 * std::abs(std::sin(0.5 * dt));
        cplx a = split.log_coeff(r);
        cplx M1 = 0.5 * a;
        cplx M2 = split.smooth_part(r) + a * std::log(r / s2);
        K(i, j) = nn * (R[(i - j + N) % N] * M1 + h * M2) * mesh.speeds[j];
      }
    }
    return K;
  }

  // polygon: panel-by-panel, adaptive self/near interactions
  K.setZero();
  for (const Panel& panel : mesh.panels) {
    const int p0 = panel.first_node, np = panel.n_nodes;
    Vec2 dir = (panel.b - panel.a) * (1.0 / panel.length);
    std::vector<double> ts(np);
    for (int q = 0; q < np; ++q)
      ts[q] = dir.dot(mesh.nodes[p0 + q] - panel.a);
    auto bw = barycentric_weights(ts);
    for (int i = 0; i < N; ++i) {
      double nn = 1.0;
      if (nu_weighted) {
        nn = mesh.normals[i].dot(mesh.normals[p0]);
        if (nn == 0.0) continue;
      }
      double dist = 1e300;
      for (int q = 0; q < np; ++q)
        dist = std::min(dist, (mesh.nodes[i] - mesh.nodes[p0 + q]).norm());
      if (dist > 2.0 * panel.length) {
        for (int q = 0; q < np; ++q) {
          double r = (mesh.nodes[i] - mesh.nodes[p0 + q]).norm();
          K(i, p0 + q) += nn * mesh.weights[p0 + q] * resolvent_kernel(p, r);
        }
        continue;
      }
      double tproj = std::clamp(dir.dot(mesh.nodes[i] - panel.a), 0.0, panel.length);
      for (int q = 0; q < np; ++q) {
        auto f = [&](double t) -> cplx {
          Vec2 y = panel.a + dir * t;
          double r = (mesh.nodes[i] - y).norm();
          if (r < 1e-14) return {0.0, 0.0};
          return resolvent_kernel(p, r) * lagrange_basis(ts, bw, q, t);
        };
        cplx val{0.0, 0.0};
        if (tproj > 1e-14 * panel.length) val += adaptive_gl(f, 0.0, tproj, 1e-10);
        if (tproj < panel.length * (1.0 - 1e-14)) val += adaptive_gl(f, tproj, panel.length, 1e-10);
        K(i, p0 + q) += nn * val;
      }
    }
  }
  return K;
}

// Arclength differentiation matrix: global Fourier on smooth curves,
// per-panel Legendre on polygons.
inline Eigen::MatrixXd arclength_diff(const BoundaryMesh& mesh) {
  const int N = mesh.size();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
  if (mesh.smooth) {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        if (i != j) {
          double sgn = ((i - j) % 2 == 0) ? 1.0 : -1.0;
          D(i, j) = 0.5 * sgn / std::tan(0.5 * (mesh.params[i] - mesh.params[j])) / mesh.speeds[i];
        }
    return D;
  }
  for (const Panel& panel : mesh.panels) {
    const int p0 = panel.first_node, np = panel.n_nodes;
    Vec2 dir = (panel.b - panel.a) * (1.0 / panel.length);
    std::vector<double> ts(np);
    for (int q = 0; q < np; ++q) ts[q] = dir.dot(mesh.nodes[p0 + q] - panel.a);
    auto bw = barycentric_weights(ts);
    for (int i = 0; i < np; ++i) {
      double diag = 0.0;
      for (int j = 0; j < np; ++j)
        if (i != j) {
          double d = (bw[j] / bw[i]) / (ts[i] - ts[j]);
          D(p0 + i, p0 + j) = d;
          diag -= d;
        }
      D(p0 + i, p0 + i) = diag;
    }
  }
  return D;
}

}  // namespace detail

namespace detail {

// restore the exact kernel symmetry of the de-weighted matrix; records the
// raw defect
inline double symmetrize_deweighted(const BoundaryMesh& mesh, Mat& k) {
  if (mesh.smooth) return 0.0;
  const int n = mesh.size();
  Vre w = Eigen::Map<const Vre>(mesh.weights.data(), n);
  Mat g = k * w.cwiseInverse().asDiagonal();
  double defect = (g - g.transpose()).norm() / g.norm();
  g = 0.5 * (g + g.transpose()).eval();
  k = g * w.asDiagonal();
  return defect;
}

}  // namespace detail

inline BoundaryOperator assemble_single_layer_trace(const BoundaryMesh& mesh,
                                                    const SpectralPoint& p) {
  BoundaryOperator op{detail::assemble_single_layer(mesh, p, false), p,
                      OperatorKind::single_layer_trace, SpaceTag::density, SpaceTag::trace, 0.0};
  op.symmetry_defect = detail::symmetrize_deweighted(mesh, op.m);
  return op;
}

// gamma1 DL_z through the weak (Maue) identity
//   <psi, T phi> = -int int G(x,y) [ psi'(x) phi'(y) + z (nu_x.nu_y) psi(x) phi(y) ],
// collocated back to node values.  Verified against the separable disk values
// R z I'_m K'_m.
inline BoundaryOperator assemble_hypersingular_trace(const BoundaryMesh& mesh,
                                                     const SpectralPoint& p) {
  const int N = mesh.size();
  Mat K = detail::assemble_single_layer(mesh, p, false);
  double defect_k = detail::symmetrize_deweighted(mesh, K);
  Mat Knu = detail::assemble_single_layer(mesh, p, true);
  double defect_n = detail::symmetrize_deweighted(mesh, Knu);
  Eigen::MatrixXd Ds = detail::arclength_diff(mesh);
  Vre w = Eigen::Map<const Vre>(mesh.weights.data(), N);
  cplx z = p.helmholtz_z();
  Mat B = -(Ds.transpose() * w.asDiagonal() * K * Ds + z * (w.asDiagonal() * Knu));
  Mat T = w.cwiseInverse().asDiagonal() * B;
  return {std::move(T), p, OperatorKind::hypersingular_trace, SpaceTag::trace, SpaceTag::density,
          std::max(defect_k, defect_n)};
}

enum class PotentialKind { single, double_ };

struct FieldEval {
  std::vector<cplx> values;
  bool near_singular_warning = false;
};

namespace detail {

// Trigonometric upsampling of node data on the uniform smooth grid.
inline std::vector<cplx> trig_upsample(const std::vector<cplx>& f, int factor) {
  const int N = static_cast<int>(f.size());
  const int M = N * factor;
  std::vector<cplx> coeff(N);
  for (int m = 0; m < N; ++m) {
    cplx c{0.0, 0.0};
    for (int j = 0; j < N; ++j)
      c += f[j] * std::exp(cplx(0.0, -2.0 * M_PI * m * j / N));
    coeff[m] = c / static_cast<double>(N);
  }
  std::vector<cplx> out(M, cplx(0.0, 0.0));
  for (int j = 0; j < M; ++j) {
    double t = 2.0 * M_PI * j / M;
    cplx s = coeff[0];
    for (int m = 1; m < N / 2; ++m) {
      s += coeff[m] * std::exp(cplx(0.0, m * t));
      s += coeff[N - m] * std::exp(cplx(0.0, -m * t));
    }
    s += coeff[N / 2] * std::cos(N / 2 * t);  // Nyquist, real part by symmetry
    out[j] = s;
  }
  return out;
}

}  // namespace detail

// Off-curve potentials; upsample > 1 refines the quadrature grid on smooth
// curves (needed when evaluation points approach Gamma).
inline FieldEval eval_layer_potential(PotentialKind kind, const BoundaryMesh& mesh,
                                      const SpectralPoint& p, const std::vector<cplx>& density,
                                      const std::vector<Vec2>& points, int upsample = 1) {
  if (static_cast<int>(density.size()) != mesh.size())
    throw std::invalid_argument("eval_layer_potential: density size mismatch");

  const BoundaryMesh* m = &mesh;
  BoundaryMesh fine;
  std::vector<cplx> phi = density;
  if (upsample > 1 && mesh.smooth) {
    fine = build_mesh(mesh.curve, mesh.size() * upsample);
    phi = detail::trig_upsample(density, upsample);
    m = &fine;
  }

  double spacing = m->length() / m->size();
  FieldEval out;
  out.values.reserve(points.size());
  for (const Vec2& x : points) {
    cplx s{0.0, 0.0};
    double dmin = 1e300;
    for (int j = 0; j < m->size(); ++j) {
      Vec2 dxy = x - m->nodes[j];
      double r = dxy.norm();
      dmin = std::min(dmin, r);
      if (r < 1e-14) continue;
      if (kind == PotentialKind::single) {
        s += m->weights[j] * resolvent_kernel(p, r) * phi[j];
      } else {
        // d/d nu(y) kern(|x-y|) = kern'(r) * ((y-x).nu / r)
        double ddnu = (m->nodes[j] - x).dot(m->normals[j]) / r;
        s += m->weights[j] * resolvent_kernel_dr(p, r) * ddnu * phi[j];
      }
    }
    if (dmin < 2.0 * spacing) out.near_singular_warning = true;
    out.values.push_back(s);
  }
  return out;
}

struct JumpReport {
  double trace_jump_residual = 0.0;
  double normal_jump_residual = 0.0;
};

struct OneSidedTraces {
  Vcx val_ext, dnu_ext;   // exterior trace and outward normal derivative
  Vcx val_int, dnu_int;   // interior trace and outward normal derivative
};

namespace detail {

// Polynomial fit in the offset h; coefficient 0 is the boundary value,
// coefficient 1 the derivative along the offset direction.
inline void extrapolate_traces(const std::vector<std::vector<cplx>>& samples,
                               const std::vector<double>& hs, Vcx& value, Vcx& deriv) {
  const int n = static_cast<int>(hs.size());
  const int N = static_cast<int>(samples[0].size());
  const int deg = n;
  Eigen::MatrixXd V(n, deg);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < deg; ++c) V(i, c) = std::pow(hs[i], c);
  Eigen::MatrixXd pinv = (V.transpose() * V).ldlt().solve(V.transpose());
  value.resize(N);
  deriv.resize(N);
  for (int j = 0; j < N; ++j) {
    Eigen::VectorXcd y(n);
    for (int i = 0; i < n; ++i) y(i) = samples[i][j];
    Eigen::VectorXcd c = pinv * y;
    value(j) = c(0);
    deriv(j) = c(1);
  }
}

}  // namespace detail

// One-sided boundary traces of an arbitrary field by offset sampling along
// +-nu and polynomial extrapolation.  field(points) must return the field
// values at the given off-curve points.  Smooth curves only.
template <class FieldFn>
OneSidedTraces one_sided_traces(const BoundaryMesh& mesh, const FieldFn& field) {
  if (!mesh.smooth)
    throw std::invalid_argument("one_sided_traces: unsupported on corner meshes");
  const double h0 = 3.0 * mesh.length() / mesh.size();
  std::vector<double> hs(6);
  for (int i = 0; i < 6; ++i) hs[i] = h0 * std::pow(1.6, -i);
  std::vector<std::vector<cplx>> ext, inn;
  for (double h : hs) {
    ext.push_back(field(offset_points(mesh, Side::exterior, h).points));
    inn.push_back(field(offset_points(mesh, Side::interior, h).points));
  }
  OneSidedTraces tr;
  Vcx der_e, der_i;
  detail::extrapolate_traces(ext, hs, tr.val_ext, der_e);
  detail::extrapolate_traces(inn, hs, tr.val_int, der_i);
  tr.dnu_ext = der_e;    // offsets run along +nu outside ...
  tr.dnu_int = -der_i;   // ... and along -nu inside
  return tr;
}

inline double weighted_norm(const BoundaryMesh& mesh, const Vcx& v) {
  Vre w = Eigen::Map<const Vre>(mesh.weights.data(), mesh.size());
  return std::sqrt(v.cwiseAbs2().cwiseProduct(w).sum());
}

// Jump-relation diagnostic for the single (or double) layer potential on a
// smooth curve; residuals are relative to ||density||.
inline JumpReport jump_check(const BoundaryMesh& mesh, const SpectralPoint& p,
                             const std::vector<cplx>& density,
                             PotentialKind kind = PotentialKind::single) {
  if (!mesh.smooth)
    throw std::invalid_argument("jump_check: unsupported on corner meshes");
  const int N = mesh.size();
  const int upsample = 16;
  BoundaryMesh fine = build_mesh(mesh.curve, N * upsample);
  std::vector<cplx> phi_fine = detail::trig_upsample(density, upsample);
  auto field = [&](const std::vector<Vec2>& pts) {
    return eval_layer_potential(kind, fine, p, phi_fine, pts).values;
  };
  OneSidedTraces tr = one_sided_traces(mesh, field);

  Vcx phi(N);
  for (int j = 0; j < N; ++j) phi(j) = density[j];
  double nphi = weighted_norm(mesh, phi);

  JumpReport rep;
  if (kind == PotentialKind::single) {
    rep.trace_jump_residual = weighted_norm(mesh, tr.val_ext - tr.val_int) / nphi;
    rep.normal_jump_residual =
        weighted_norm(mesh, tr.dnu_ext - tr.dnu_int + phi) / nphi;  // [g1]SL = -phi
  } else {
    rep.trace_jump_residual =
        weighted_norm(mesh, tr.val_ext - tr.val_int - phi) / nphi;  // [g0]DL = +phi
    rep.normal_jump_residual = weighted_norm(mesh, tr.dnu_ext - tr.dnu_int) / nphi;
  }
  return rep;
}

}  // namespace biscat
