#include "doctest.h"

#include <Eigen/Dense>
#include <random>

#include "biscat/lambda_models.hpp"
#include "biscat/oracle.hpp"

using namespace biscat;

namespace {

BoundaryMesh disk_mesh(int n) { return build_mesh({Circle{1.0, {0.0, 0.0}}}, n); }

Vcx fourier_mode(const BoundaryMesh& mesh, int m) {
  Vcx v(mesh.size());
  for (int j = 0; j < mesh.size(); ++j)
    v(j) = std::exp(cplx(0.0, m * std::atan2(mesh.nodes[j].y, mesh.nodes[j].x)));
  return v;
}

std::vector<ModelSpec> all_models() {
  return {ModelSpec::dirichlet(), ModelSpec::neumann(), ModelSpec::delta_alpha(1.5),
          ModelSpec::delta_prime_theta(0.8)};
}

// C_{w,z} = (K_w - K_z)/(z - w), with T replacing K for the trace_kind =
// normal_derivative models
Mat transfer_c(const ModelSpec& model, const BoundaryMesh& mesh, cplx z, cplx w) {
  bool hyp = model.trace_kind() == TraceKind::normal_derivative;
  auto mk = [&](cplx zz) {
    auto p = SpectralPoint::resolvent(zz);
    return hyp ? assemble_hypersingular_trace(mesh, p).m : assemble_single_layer_trace(mesh, p).m;
  };
  return (mk(w) - mk(z)) / (z - w);
}

}  // namespace

TEST_CASE("lambda collapses for zero strength") {
  auto mesh = disk_mesh(64);
  SUBCASE("delta with alpha == 0 gives the zero matrix") {
    auto lam = lambda(ModelSpec::delta_alpha(0.0), mesh, SpectralPoint::resolvent({1.0, 0.5}));
    CHECK(lam.op.m.norm() == 0.0);
  }
  SUBCASE("delta' with theta == 0 equals the Neumann lambda") {
    auto p = SpectralPoint::resolvent({2.0, 0.0});
    auto lt = lambda(ModelSpec::delta_prime_theta(0.0), mesh, p);
    auto ln = lambda(ModelSpec::neumann(), mesh, p);
    CHECK((lt.op.m - ln.op.m).norm() == 0.0);
  }
}

TEST_CASE("Dirichlet lambda on the disk: reciprocal single-layer eigenvalues") {
  auto mesh = disk_mesh(256);
  SUBCASE("limit side, m = 0: -1/((i pi/2) J0 H1_0)") {
    auto lam = lambda(ModelSpec::dirichlet(), mesh, SpectralPoint::limit(-1.0));
    Vcx one = Vcx::Ones(mesh.size());
    cplx ev = (lam.op.m * one)(0);
    cplx ref = -1.0 / (0.5 * iu * M_PI * bessel::j(0, 1.0) * bessel::h1(0, 1.0));
    CHECK(std::abs(ev - ref) / std::abs(ref) < 1e-4);
    CHECK(ev.real() == doctest::Approx(0.1237567).epsilon(1e-5));
    CHECK(ev.imag() == doctest::Approx(1.0729846).epsilon(1e-5));
  }
  SUBCASE("lambda_limit diagonalizes on Fourier modes") {
    auto lam = lambda_limit(ModelSpec::dirichlet(), mesh, -1.0);
    for (int m : {0, 1, 3}) {
      Vcx vm = fourier_mode(mesh, m);
      cplx ev = (lam.op.m * vm)(0) / vm(0);
      cplx ref = -1.0 / (0.5 * iu * M_PI * bessel::j(m, 1.0) * bessel::h1(m, 1.0));
      CHECK(std::abs(ev - ref) / std::abs(ref) < 1e-6);
    }
  }
}

TEST_CASE("delta lambda_limit eigenvalues: -alpha/(1 + alpha (i pi R/2) J_m H1_m)") {
  auto mesh = disk_mesh(128);
  const double alpha = -2.0, k = 1.0;
  auto lam = lambda_limit(ModelSpec::delta_alpha(alpha), mesh, -k * k);
  for (int m : {0, 2}) {
    Vcx vm = fourier_mode(mesh, m);
    cplx ev = (lam.op.m * vm)(0) / vm(0);
    cplx kev = 0.5 * iu * M_PI * bessel::j(m, k) * bessel::h1(m, k);
    cplx ref = -alpha / (1.0 + alpha * kev);
    CHECK(std::abs(ev - ref) / std::abs(ref) < 1e-6);
  }
}

TEST_CASE("limiting absorption: lambda(z) approaches lambda_limit monotonically") {
  // under the outgoing "+" labeling the resolvent side that converges to
  // Lambda^+ is Im z < 0
  auto mesh = disk_mesh(96);
  for (const auto& model : all_models()) {
    CAPTURE(model.name());
    auto lim = lambda_limit(model, mesh, -1.0);
    double prev = 1e300;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      auto lam = lambda(model, mesh, SpectralPoint::resolvent({-1.0, -eps}));
      double d = (lam.op.m - lim.op.m).norm() / lim.op.m.norm();
      CHECK(d < prev);
      prev = d;
    }
    CHECK(prev < 1e-3);
  }
}

TEST_CASE("Lambda identities") {
  auto mesh = disk_mesh(96);
  std::mt19937 rng(41u);
  std::uniform_real_distribution<double> ur(0.5, 4.0), ui(-2.0, 2.0);
  for (const auto& model : all_models()) {
    CAPTURE(model.name());
    for (int rep = 0; rep < 3; ++rep) {
      cplx z{ur(rng), ui(rng)}, w{ur(rng), ui(rng)};
      auto lz = lambda(model, mesh, SpectralPoint::resolvent(z));
      auto lzb = lambda(model, mesh, SpectralPoint::resolvent(std::conj(z)));
      // conjugation: Lambda_{zbar} = Lambda_z^dagger
      CHECK((lzb.op.m - lz.op.m.adjoint()).norm() < 1e-10 * lz.op.m.norm());
      // transfer: Lambda_w - Lambda_z = (z-w) Lambda_w C Lambda_z
      auto lw = lambda(model, mesh, SpectralPoint::resolvent(w));
      Mat C = transfer_c(model, mesh, z, w);
      Mat lhs = lw.op.m - lz.op.m;
      Mat rhs = (z - w) * lw.op.m * C * lz.op.m;
      CHECK((lhs - rhs).norm() < 1e-8 * lz.op.m.norm() * lw.op.m.norm());
    }
    // hermitian at real z
    auto lr = lambda(model, mesh, SpectralPoint::resolvent({3.0, 0.0}));
    CHECK((lr.op.m - lr.op.m.adjoint()).norm() < 1e-10 * lr.op.m.norm());
  }
}

TEST_CASE("reciprocity shadow: W Lambda^+ is complex-symmetric") {
  auto mesh = disk_mesh(96);
  Vre w = Eigen::Map<const Vre>(mesh.weights.data(), mesh.size());
  for (const auto& model : all_models()) {
    CAPTURE(model.name());
    Mat wl = w.asDiagonal().toDenseMatrix().cast<cplx>() *
             lambda_limit(model, mesh, -1.0).op.m;
    CHECK((wl - wl.transpose()).norm() < 1e-8 * wl.norm());
  }
}

TEST_CASE("krein resolvent fields satisfy the boundary conditions") {
  auto mesh = disk_mesh(256);
  auto p = SpectralPoint::resolvent({1.0, 0.0});
  std::vector<PointSource> sources{{{1.9, 0.3}, {1.0, 0.0}}, {{-0.2, 0.1}, {0.5, 0.0}}};

  auto traces = [&](const KreinField& u) {
    return one_sided_traces(mesh, [&](const std::vector<Vec2>& pts) { return u(pts, 16); });
  };
  auto wnorm = [&](const Vcx& v) { return weighted_norm(mesh, v); };

  SUBCASE("Dirichlet: boundary trace vanishes") {
    auto u = krein_resolvent_apply(ModelSpec::dirichlet(), mesh, p, sources);
    auto tr = traces(u);
    // scale against the free field sampled near the curve
    auto onb = u.free_field(offset_points(mesh, Side::exterior, 0.3).points);
    Vcx uref(mesh.size());
    for (int j = 0; j < mesh.size(); ++j) uref(j) = onb[j];
    double scale = wnorm(uref);
    CHECK(wnorm(tr.val_ext) / scale < 1e-6);
    CHECK(wnorm(tr.val_int) / scale < 1e-6);
  }
  SUBCASE("delta: alpha g0 u = [g1] u") {
    const double alpha = 1.5;
    auto u = krein_resolvent_apply(ModelSpec::delta_alpha(alpha), mesh, p, sources);
    auto tr = traces(u);
    Vcx jump = tr.dnu_ext - tr.dnu_int;
    Vcx trace = 0.5 * (tr.val_ext + tr.val_int);
    CHECK(wnorm(alpha * trace - jump) / wnorm(trace) < 1e-4);
    CHECK(wnorm(tr.val_ext - tr.val_int) / wnorm(trace) < 1e-5);
  }
  SUBCASE("delta': [g1] u = 0 and g1 u = theta [g0] u") {
    const double theta = 0.8;
    auto u = krein_resolvent_apply(ModelSpec::delta_prime_theta(theta), mesh, p, sources);
    auto tr = traces(u);
    Vcx dnu = 0.5 * (tr.dnu_ext + tr.dnu_int);
    Vcx jump0 = tr.val_ext - tr.val_int;
    double scale = wnorm(dnu);
    CHECK(wnorm(tr.dnu_ext - tr.dnu_int) / scale < 1e-3);
    CHECK(wnorm(dnu - theta * jump0) / scale < 1e-3);
  }
  SUBCASE("alpha == 0 reproduces the free field exactly") {
    auto u = krein_resolvent_apply(ModelSpec::delta_alpha(0.0), mesh, p, sources);
    std::vector<Vec2> pts{{0.4, 0.1}, {2.5, -1.0}};
    auto uv = u(pts);
    auto fv = u.free_field(pts);
    CHECK(std::abs(uv[0] - fv[0]) == 0.0);
    CHECK(std::abs(uv[1] - fv[1]) == 0.0);
  }
}

TEST_CASE("krein resolvent is a pseudo-resolvent (weak first resolvent identity)") {
  // <g_b, (R_z - R_w) g_a> = (w - z) <R_{zbar} g_b, R_w g_a> with point
  // sources; the volume pairing is evaluated by adaptive polar quadrature
  // centred at b with a radial split at |a - b|.
  auto mesh = disk_mesh(128);
  const cplx z{1.0, 0.0}, w{2.5, 0.0};
  const Vec2 a{1.7, 0.2}, b{-0.3, 0.05};
  ModelSpec model = ModelSpec::delta_alpha(1.0);

  auto uz = krein_resolvent_apply(model, mesh, SpectralPoint::resolvent(z), {{a, {1.0, 0.0}}});
  auto uw = krein_resolvent_apply(model, mesh, SpectralPoint::resolvent(w), {{a, {1.0, 0.0}}});
  auto vz = krein_resolvent_apply(model, mesh, SpectralPoint::resolvent(std::conj(z)),
                                  {{b, {1.0, 0.0}}});

  cplx lhs = uz({{b}})[0] - uw({{b}})[0];

  double rho_star = (a - b).norm();
  double th_star = std::atan2(a.y - b.y, a.x - b.x);
  auto integrand = [&](double rho, double th) -> cplx {
    Vec2 x{b.x + rho * std::cos(th), b.y + rho * std::sin(th)};
    if ((x - a).norm() < 1e-9 || rho < 1e-12) return {0.0, 0.0};
    return std::conj(vz({{x}})[0]) * uw({{x}})[0];
  };
  auto radial = [&](double rho) -> cplx {
    auto g = [&](double th) { return integrand(rho, th); };
    return rho * (detail::adaptive_gl(g, th_star - M_PI, th_star, 1e-6) +
                  detail::adaptive_gl(g, th_star, th_star + M_PI, 1e-6));
  };
  cplx pairing = detail::adaptive_gl(radial, 0.0, rho_star, 1e-5) +
                 detail::adaptive_gl(radial, rho_star, 14.0, 1e-5);
  cplx rhs = (w - z) * pairing;
  CHECK(std::abs(lhs - rhs) < 1e-6 * std::abs(lhs));
}

TEST_CASE("eigenvalue scan") {
  auto mesh = disk_mesh(128);
  SUBCASE("alpha = -2 on the unit disk: one bound state, matching the oracle") {
    auto hits = find_discrete_eigenvalues(ModelSpec::delta_alpha(-2.0), mesh, 10.0);
    REQUIRE(hits.size() == 1);
    auto ref = disk_bound_state_equation(1.0, -2.0, 0);
    REQUIRE(ref.has_value());
    CHECK(std::abs(hits[0].lambda - *ref) / *ref < 1e-3);
    CHECK(hits[0].refined);
    // no other oracle roots exist for m <= 3 (alpha R = -2 reaches only m=0)
    for (int m = 1; m <= 3; ++m) CHECK_FALSE(disk_bound_state_equation(1.0, -2.0, m).has_value());
  }
  SUBCASE("repulsive alpha = +1: empty") {
    CHECK(find_discrete_eigenvalues(ModelSpec::delta_alpha(1.0), mesh, 10.0).empty());
  }
  SUBCASE("alpha == 0: empty") {
    CHECK(find_discrete_eigenvalues(ModelSpec::delta_alpha(0.0), mesh, 10.0).empty());
  }
}

TEST_CASE("singular spectral points raise the typed error") {
  // delta with alpha = -2 evaluated exactly at the bound state makes
  // 1 + alpha K_z singular
  auto mesh = disk_mesh(96);
  auto root = disk_bound_state_equation(1.0, -2.0, 0);
  REQUIRE(root.has_value());
  bool threw = false;
  try {
    lambda(ModelSpec::delta_alpha(-2.0), mesh, SpectralPoint::resolvent({*root, 0.0}));
  } catch (const spectral_point_singular& e) {
    threw = true;
    CHECK(e.smallest_singular_value < 1e-6);
  }
  CHECK(threw);
}

TEST_CASE("per-node strengths validate length") {
  auto mesh = disk_mesh(64);
  std::vector<double> wrong(10, 1.0);
  CHECK_THROWS_AS(lambda(ModelSpec::delta_alpha(wrong), mesh, SpectralPoint::resolvent({1.0, 0.0})),
                  std::invalid_argument);
}
