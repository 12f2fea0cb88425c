#pragma once

// Closed curves in the plane and their quadrature meshes.
//
// Smooth shapes (circle, kite) are discretized on a uniform periodic
// parameter grid, which makes the Nystrom machinery in layer_ops spectrally
// accurate.  Polygons get per-edge composite Gauss-Legendre panels, dyadically
// graded toward the corners.  All boundary operators downstream act on
// vectors of node values; the arclength measure enters only through the
// weights stored here.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace biscat {

struct Vec2 {
  double x = 0.0, y = 0.0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};
inline Vec2 operator*(double s, Vec2 v) { return v * s; }

struct Circle {
  double radius = 1.0;
  Vec2 center{0.0, 0.0};
};

// Colton-Kress kite: x(t) = (cos t + a cos 2t - a, b sin t), scaled/shifted.
struct Kite {
  double a = 0.65;
  double b = 1.5;
  double scale = 1.0;
  Vec2 center{0.0, 0.0};
};

struct Polygon {
  std::vector<Vec2> vertices;  // counterclockwise
};

struct BoundaryCurve {
  std::variant<Circle, Kite, Polygon> shape;

  bool is_polygon() const { return std::holds_alternative<Polygon>(shape); }
};

struct Panel {
  int first_node = 0;   // index of the panel's first node
  int n_nodes = 0;
  double length = 0.0;
  int edge = -1;        // polygon edge index, -1 on smooth curves
  Vec2 a{}, b{};        // straight-panel endpoints (polygons)
};

struct BoundaryMesh {
  std::vector<Vec2> nodes;
  std::vector<double> weights;   // arclength quadrature weights
  std::vector<Vec2> normals;     // unit outward
  std::vector<Vec2> tangents;    // unit, CCW orientation
  std::vector<Panel> panels;
  std::vector<bool> corner_flag;  // true when the node's panel abuts a corner

  // smooth-curve data (empty for polygons)
  std::vector<double> params;    // uniform t_j in [0, 2pi)
  std::vector<double> speeds;    // |x'(t_j)|
  bool smooth = false;

  BoundaryCurve curve;

  int size() const { return static_cast<int>(nodes.size()); }
  double length() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
  Vec2 centroid() const {
    Vec2 c{0.0, 0.0};
    double L = 0.0;
    for (int i = 0; i < size(); ++i) {
      c = c + weights[i] * nodes[i];
      L += weights[i];
    }
    return c * (1.0 / L);
  }
};

namespace detail {

inline void smooth_point(const BoundaryCurve& curve, double t, Vec2& x, Vec2& dx) {
  if (const Circle* c = std::get_if<Circle>(&curve.shape)) {
    x = {c->center.x + c->radius * std::cos(t), c->center.y + c->radius * std::sin(t)};
    dx = {-c->radius * std::sin(t), c->radius * std::cos(t)};
  } else if (const Kite* k = std::get_if<Kite>(&curve.shape)) {
    x = {k->center.x + k->scale * (std::cos(t) + k->a * std::cos(2 * t) - k->a),
         k->center.y + k->scale * k->b * std::sin(t)};
    dx = {k->scale * (-std::sin(t) - 2 * k->a * std::sin(2 * t)),
          k->scale * k->b * std::cos(t)};
  } else {
    throw std::logic_error("smooth_point on polygon");
  }
}

inline void gauss_legendre(int p, std::vector<double>& x, std::vector<double>& w) {
  // Newton iteration on Legendre polynomials, symmetric fill.
  x.assign(p, 0.0);
  w.assign(p, 0.0);
  auto legendre = [p](double xi, double& val, double& der) {
    double p0 = 1.0, p1 = xi;
    for (int n = 2; n <= p; ++n) {
      double p2 = ((2 * n - 1) * xi * p1 - (n - 1) * p0) / n;
      p0 = p1;
      p1 = p2;
    }
    val = p1;
    der = p * (xi * p1 - p0) / (xi * xi - 1.0);
  };
  for (int i = 0; i < (p + 1) / 2; ++i) {
    double xi = std::cos(M_PI * (i + 0.75) / (p + 0.5));
    double val = 0.0, der = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(xi, val, der);
      double dx = -val / der;
      xi += dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre(xi, val, der);
    x[p - 1 - i] = xi;   // i = 0 is the largest root
    x[i] = -xi;
    w[i] = w[p - 1 - i] = 2.0 / ((1.0 - xi * xi) * der * der);
  }
}

inline double polygon_signed_area(const std::vector<Vec2>& v) {
  double a = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    a += p.x * q.y - p.y * q.x;
  }
  return 0.5 * a;
}

}  // namespace detail

// Dyadic breakpoints on [0, 1/2] accumulating at 0, mirrored by the caller.
inline std::vector<double> dyadic_breaks(int depth) {
  std::vector<double> b{0.0};
  for (int i = 0; i <= depth; ++i) b.push_back(0.5 * std::ldexp(1.0, i - depth));
  return b;
}

inline BoundaryMesh build_mesh(const BoundaryCurve& curve, int n_nodes, int grading_depth = 0) {
  if (n_nodes < 16) throw std::invalid_argument("build_mesh: n_nodes >= 16 required");
  BoundaryMesh mesh;
  mesh.curve = curve;

  if (!curve.is_polygon()) {
    int N = n_nodes + (n_nodes % 2);  // Fourier differentiation wants even N
    mesh.smooth = true;
    mesh.nodes.resize(N);
    mesh.weights.resize(N);
    mesh.normals.resize(N);
    mesh.tangents.resize(N);
    mesh.params.resize(N);
    mesh.speeds.resize(N);
    mesh.corner_flag.assign(N, false);
    for (int j = 0; j < N; ++j) {
      double t = 2.0 * M_PI * j / N;
      Vec2 x, dx;
      detail::smooth_point(curve, t, x, dx);
      double sp = dx.norm();
      mesh.params[j] = t;
      mesh.speeds[j] = sp;
      mesh.nodes[j] = x;
      mesh.weights[j] = sp * 2.0 * M_PI / N;
      mesh.tangents[j] = dx * (1.0 / sp);
      mesh.normals[j] = {dx.y / sp, -dx.x / sp};
    }
    mesh.panels.push_back({0, N, mesh.length(), -1, {}, {}});
    return mesh;
  }

  const Polygon& poly = std::get<Polygon>(curve.shape);
  const auto& V = poly.vertices;
  if (V.size() < 3) throw std::invalid_argument("build_mesh: degenerate geometry (fewer than 3 vertices)");
  for (size_t e = 0; e < V.size(); ++e) {
    if ((V[(e + 1) % V.size()] - V[e]).norm() < 1e-14)
      throw std::invalid_argument("build_mesh: degenerate geometry (repeated vertex / zero-length edge)");
  }
  if (detail::polygon_signed_area(V) <= 0.0)
    throw std::invalid_argument("build_mesh: polygon must be counterclockwise");
  if (grading_depth < 3) throw std::invalid_argument("build_mesh: grading_depth >= 3 required for polygons");

  const int n_edges = static_cast<int>(V.size());
  const int panels_per_edge = 2 * (grading_depth + 1);
  int p = std::max(3, (n_nodes + n_edges * panels_per_edge / 2) / (n_edges * panels_per_edge));
  std::vector<double> gx, gw;
  detail::gauss_legendre(p, gx, gw);
  auto breaks = dyadic_breaks(grading_depth);

  for (int e = 0; e < n_edges; ++e) {
    Vec2 v0 = V[e], v1 = V[(e + 1) % n_edges];
    double L = (v1 - v0).norm();
    Vec2 d = (v1 - v0) * (1.0 / L);
    Vec2 nu{d.y, -d.x};
    std::vector<std::pair<double, double>> segs;
    for (size_t i = 0; i + 1 < breaks.size(); ++i) segs.push_back({breaks[i] * L, breaks[i + 1] * L});
    for (size_t i = breaks.size() - 1; i-- > 0;) segs.push_back({(1.0 - breaks[i + 1]) * L, (1.0 - breaks[i]) * L});
    for (size_t s = 0; s < segs.size(); ++s) {
      auto [a, b] = segs[s];
      Panel panel;
      panel.first_node = mesh.size();
      panel.n_nodes = p;
      panel.length = b - a;
      panel.edge = e;
      panel.a = v0 + d * a;
      panel.b = v0 + d * b;
      double mid = 0.5 * (a + b), hl = 0.5 * (b - a);
      bool at_corner = (s == 0) || (s + 1 == segs.size());
      for (int q = 0; q < p; ++q) {
        double t = mid + hl * gx[q];
        mesh.nodes.push_back(v0 + d * t);
        mesh.weights.push_back(gw[q] * hl);
        mesh.normals.push_back(nu);
        mesh.tangents.push_back(d);
        mesh.corner_flag.push_back(at_corner);
      }
      mesh.panels.push_back(panel);
    }
  }
  mesh.smooth = false;
  return mesh;
}

struct OffsetPoints {
  std::vector<Vec2> points;
  bool crossing_warning = false;  // offset too large near corners
};

enum class Side { interior, exterior };

// Winding-number test against the mesh polyline; accurate enough away from
// a small neighborhood of the curve.
inline bool point_inside(const BoundaryMesh& mesh, Vec2 p) {
  double angle = 0.0;
  int N = mesh.size();
  for (int i = 0; i < N; ++i) {
    Vec2 a = mesh.nodes[i] - p, b = mesh.nodes[(i + 1) % N] - p;
    angle += std::atan2(a.x * b.y - a.y * b.x, a.dot(b));
  }
  return std::abs(angle) > M_PI;
}

inline OffsetPoints offset_points(const BoundaryMesh& mesh, Side side, double distance) {
  if (distance <= 0.0) throw std::invalid_argument("offset_points: distance > 0 required");
  OffsetPoints out;
  double sgn = side == Side::exterior ? 1.0 : -1.0;
  out.points.reserve(mesh.size());
  double spacing = mesh.length() / mesh.size();
  for (int i = 0; i < mesh.size(); ++i) {
    Vec2 p = mesh.nodes[i] + sgn * distance * mesh.normals[i];
    bool inside = point_inside(mesh, p);
    if (inside != (side == Side::interior)) out.crossing_warning = true;
    // the normal segment ran into another part of Gamma (too large near corners)
    double dmin = 1e300;
    for (int j = 0; j < mesh.size(); ++j)
      dmin = std::min(dmin, (p - mesh.nodes[j]).norm());
    if (dmin < 0.98 * distance - spacing) out.crossing_warning = true;
    out.points.push_back(p);
  }
  return out;
}

}  // namespace biscat
