#include "doctest.h"

#include <cmath>

#include "biscat/geometry.hpp"

using namespace biscat;

namespace {
BoundaryCurve unit_circle() { return {Circle{1.0, {0.0, 0.0}}}; }
BoundaryCurve square2() {
  // side 2, CCW
  return {Polygon{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}}};
}
}  // namespace

TEST_CASE("circle mesh length and normals") {
  auto mesh = build_mesh(unit_circle(), 128);
  CHECK(mesh.length() == doctest::Approx(2.0 * M_PI).epsilon(1e-12));
  for (int j = 0; j < mesh.size(); ++j) {
    CHECK(mesh.normals[j].norm() == doctest::Approx(1.0));
    CHECK(std::abs(mesh.normals[j].dot(mesh.tangents[j])) < 1e-14);
    // outward on the unit circle: nu == node
    CHECK((mesh.normals[j] - mesh.nodes[j]).norm() < 1e-13);
  }
}

TEST_CASE("square mesh perimeter is exact") {
  auto mesh = build_mesh(square2(), 256, 6);
  CHECK(mesh.length() == doctest::Approx(8.0).epsilon(1e-10));
  // panel sizes decrease geometrically toward each corner
  const auto& panels = mesh.panels;
  CHECK(panels[1].length == doctest::Approx(panels[0].length).epsilon(1e-12));
  CHECK(panels[2].length == doctest::Approx(2.0 * panels[1].length).epsilon(1e-12));
}

TEST_CASE("kite mesh closes and refines consistently") {
  BoundaryCurve kite{Kite{}};
  auto m1 = build_mesh(kite, 128);
  auto m2 = build_mesh(kite, 256);
  // trapezoid on a periodic smooth integrand: doubling changes the length
  // only at machine scale
  CHECK(std::abs(m1.length() - m2.length()) < 1e-11 * m2.length());
}

TEST_CASE("normal orientation for convex shapes") {
  auto mesh = build_mesh(unit_circle(), 64);
  Vec2 c = mesh.centroid();
  for (int j = 0; j < mesh.size(); ++j)
    CHECK(mesh.normals[j].dot(mesh.nodes[j] - c) > 0.0);
  auto sq = build_mesh(square2(), 128, 4);
  Vec2 cs = sq.centroid();
  for (int j = 0; j < sq.size(); ++j)
    CHECK(sq.normals[j].dot(sq.nodes[j] - cs) > 0.0);
}

TEST_CASE("degenerate polygons are rejected") {
  BoundaryCurve bad{Polygon{{{0, 0}, {1, 0}, {1, 0}, {0, 1}}}};
  CHECK_THROWS_WITH_AS(static_cast<void>(build_mesh(bad, 64, 4)),
                       doctest::Contains("degenerate geometry"), std::invalid_argument);
  BoundaryCurve cw{Polygon{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}}};
  CHECK_THROWS_AS(static_cast<void>(build_mesh(cw, 64, 4)), std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(build_mesh(unit_circle(), 8)), std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(build_mesh(square2(), 64, 2)), std::invalid_argument);
}

TEST_CASE("offset points on the circle") {
  auto mesh = build_mesh(unit_circle(), 64);
  auto ext = offset_points(mesh, Side::exterior, 0.1);
  auto inn = offset_points(mesh, Side::interior, 0.1);
  CHECK_FALSE(ext.crossing_warning);
  CHECK_FALSE(inn.crossing_warning);
  for (auto& p : ext.points) CHECK(p.norm() == doctest::Approx(1.1).epsilon(1e-12));
  for (auto& p : inn.points) CHECK(p.norm() == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("interior offset beyond the inradius warns") {
  auto mesh = build_mesh(square2(), 128, 4);
  auto inn = offset_points(mesh, Side::interior, 1.2);  // inradius is 1
  CHECK(inn.crossing_warning);
}
