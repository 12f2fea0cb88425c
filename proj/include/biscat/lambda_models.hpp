#pragma once

// The four boundary models and their Lambda_z operator families:
//
//   Dirichlet          Lambda = -K^{-1},        K = gamma0 SL_z
//   Neumann            Lambda = -T^{-1},        T = gamma1 DL_z
//   delta(alpha)       Lambda = -(1 + D_a K)^{-1} D_a
//   delta'(theta)      Lambda = B (1 + D_t B)^{-1},  B = -T^{-1}
//
// plus the Krein resolvent field  u = R0 f + G Lambda G* f  for point
// sources, and the scan for discrete eigenvalues of the delta models on the
// positive real axis (where the kernel is the real K0).

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "biscat/layer_ops.hpp"

namespace biscat {

struct ModelSpec {
  enum class Variant { dirichlet, neumann, delta_alpha, delta_prime_theta };
  Variant variant = Variant::dirichlet;
  std::variant<double, std::vector<double>> strength = 0.0;  // real-valued

  static ModelSpec dirichlet() { return {Variant::dirichlet, 0.0}; }
  static ModelSpec neumann() { return {Variant::neumann, 0.0}; }
  static ModelSpec delta_alpha(double a) { return {Variant::delta_alpha, a}; }
  static ModelSpec delta_alpha(std::vector<double> a) { return {Variant::delta_alpha, std::move(a)}; }
  static ModelSpec delta_prime_theta(double t) { return {Variant::delta_prime_theta, t}; }
  static ModelSpec delta_prime_theta(std::vector<double> t) {
    return {Variant::delta_prime_theta, std::move(t)};
  }

  bool is_delta() const {
    return variant == Variant::delta_alpha || variant == Variant::delta_prime_theta;
  }

  Vre strength_vector(int n) const {
    if (const double* c = std::get_if<double>(&strength)) return Vre::Constant(n, *c);
    const auto& v = std::get<std::vector<double>>(strength);
    if (static_cast<int>(v.size()) != n)
      throw std::invalid_argument("ModelSpec: per-node strength length does not match mesh");
    return Eigen::Map<const Vre>(v.data(), n);
  }

  TraceKind trace_kind() const {
    return (variant == Variant::neumann || variant == Variant::delta_prime_theta)
               ? TraceKind::normal_derivative
               : TraceKind::value;
  }

  const char* name() const {
    switch (variant) {
      case Variant::dirichlet: return "dirichlet";
      case Variant::neumann: return "neumann";
      case Variant::delta_alpha: return "delta";
      case Variant::delta_prime_theta: return "delta_prime";
    }
    return "?";
  }
};

// Raised when the factorization behind Lambda is singular to working
// precision: z sits in the model's excluded set (Sigma_alpha / Sigma_theta or
// a discrete eigenvalue of the decoupled Dirichlet/Neumann Laplacians).
struct spectral_point_singular : std::runtime_error {
  double smallest_singular_value;
  explicit spectral_point_singular(double sv)
      : std::runtime_error("spectral-point singular (condition > 1e12)"),
        smallest_singular_value(sv) {}
};

struct LambdaOperator {
  BoundaryOperator op;               // kind == lambda, node-value operator
  ModelSpec::Variant model = ModelSpec::Variant::dirichlet;
  double condition_estimate = 0.0;   // 1-norm condition of the inverted matrix
};

namespace detail {

// Hager/Higham style 1-norm estimate of ||A^{-1}||; a handful of solves with
// A and A^H.
inline double inv_norm1_estimate(const Eigen::PartialPivLU<Mat>& lu,
                                 const Eigen::PartialPivLU<Mat>& lu_adj, int n) {
  Vcx x = Vcx::Constant(n, cplx(1.0 / n, 0.0));
  double est = 0.0;
  for (int it = 0; it < 5; ++it) {
    Vcx y = lu.solve(x);
    double n1 = y.cwiseAbs().sum();
    if (n1 <= est && it > 0) break;
    est = n1;
    Vcx xi(n);
    for (int i = 0; i < n; ++i) {
      double a = std::abs(y(i));
      xi(i) = a == 0.0 ? cplx(1.0, 0.0) : y(i) / a;
    }
    Vcx z = lu_adj.solve(xi);
    int jmax = 0;
    z.cwiseAbs().maxCoeff(&jmax);
    x.setZero();
    x(jmax) = 1.0;
  }
  return est;
}

inline double smallest_singular_value(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues().minCoeff();
}

// LU with the condition gate shared by all models.
inline Eigen::PartialPivLU<Mat> checked_lu(const Mat& a, double& cond_out) {
  Eigen::PartialPivLU<Mat> lu(a);
  Eigen::PartialPivLU<Mat> lu_adj(a.adjoint().eval());
  double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  cond_out = norm1 * inv_norm1_estimate(lu, lu_adj, static_cast<int>(a.rows()));
  if (!(cond_out < 1e12)) throw spectral_point_singular(smallest_singular_value(a));
  return lu;
}

inline Mat lambda_matrix(const ModelSpec& model, const BoundaryMesh& mesh,
                         const SpectralPoint& p, double& cond_out) {
  const int n = mesh.size();
  switch (model.variant) {
    case ModelSpec::Variant::dirichlet: {
      Mat K = assemble_single_layer_trace(mesh, p).m;
      auto lu = checked_lu(K, cond_out);
      return -lu.solve(Mat::Identity(n, n));
    }
    case ModelSpec::Variant::neumann: {
      Mat T = assemble_hypersingular_trace(mesh, p).m;
      auto lu = checked_lu(T, cond_out);
      return -lu.solve(Mat::Identity(n, n));
    }
    case ModelSpec::Variant::delta_alpha: {
      Vre a = model.strength_vector(n);
      if (a.cwiseAbs().maxCoeff() == 0.0) {
        cond_out = 1.0;
        return Mat::Zero(n, n);  // formula collapses at alpha == 0
      }
      Mat K = assemble_single_layer_trace(mesh, p).m;
      Mat A = Mat::Identity(n, n) + a.asDiagonal().toDenseMatrix().cast<cplx>() * K;
      auto lu = checked_lu(A, cond_out);
      Mat Da = Mat::Zero(n, n);
      Da.diagonal() = a.cast<cplx>();
      return -lu.solve(Da);
    }
    case ModelSpec::Variant::delta_prime_theta: {
      Vre t = model.strength_vector(n);
      Mat T = assemble_hypersingular_trace(mesh, p).m;
      double cond_T = 0.0;
      auto luT = checked_lu(T, cond_T);
      Mat B = -luT.solve(Mat::Identity(n, n));
      if (t.cwiseAbs().maxCoeff() == 0.0) {
        cond_out = cond_T;
        return B;  // (1 + 0)^{-1} = 1: Lambda == Lambda^N exactly
      }
      Mat A = Mat::Identity(n, n) + t.asDiagonal().toDenseMatrix().cast<cplx>() * B;
      auto lu = checked_lu(A, cond_out);
      cond_out = std::max(cond_out, cond_T);
      // Lambda = B (1 + D_t B)^{-1}: right-side solve via the transposed system
      Eigen::PartialPivLU<Mat> lu_trans(A.transpose().eval());
      return lu_trans.solve(B.transpose()).transpose();
    }
  }
  throw std::logic_error("lambda_matrix: bad variant");
}

}  // namespace detail

inline LambdaOperator lambda(const ModelSpec& model, const BoundaryMesh& mesh,
                             const SpectralPoint& p) {
  LambdaOperator out;
  out.model = model.variant;
  out.op.m = detail::lambda_matrix(model, mesh, p, out.condition_estimate);
  out.op.point = p;
  out.op.kind = OperatorKind::lambda;
  out.op.domain_space = SpaceTag::trace;
  out.op.range_space = SpaceTag::density;
  return out;
}

// The boundary limit Lambda^+_lambda consumed by the scattering matrix:
// the same algebra on the "+"-side kernels.
inline LambdaOperator lambda_limit(const ModelSpec& model, const BoundaryMesh& mesh,
                                   double lambda_energy) {
  return lambda(model, mesh, SpectralPoint::limit(lambda_energy, LimitSide::plus));
}

struct PointSource {
  Vec2 location;
  cplx charge{1.0, 0.0};
};

// Field of the perturbed resolvent applied to a combination of point
// sources:  u = sum_s q_s G_z(.-x_s) + G_z Lambda_z g, where g is the
// tau-trace of the free field (value trace for Dirichlet/delta, normal
// derivative for Neumann/delta').
class KreinField {
 public:
  KreinField(const ModelSpec& model, const BoundaryMesh& mesh, const SpectralPoint& p,
             std::vector<PointSource> sources)
      : model_(model), mesh_(&mesh), p_(p), sources_(std::move(sources)) {
    const int n = mesh.size();
    std::vector<cplx> g(n);
    const bool deriv = model.trace_kind() == TraceKind::normal_derivative;
    for (int j = 0; j < n; ++j) {
      cplx acc{0.0, 0.0};
      for (const auto& s : sources_) {
        Vec2 d = mesh.nodes[j] - s.location;
        double r = d.norm();
        if (r < 1e-13) throw std::invalid_argument("krein_resolvent_apply: source on Gamma");
        if (deriv)
          acc += s.charge * resolvent_kernel_dr(p, r) * (d.dot(mesh.normals[j]) / r);
        else
          acc += s.charge * resolvent_kernel(p, r);
      }
      g[j] = acc;
    }
    LambdaOperator lam = lambda(model, mesh, p);
    condition_ = lam.condition_estimate;
    Vcx gv = Eigen::Map<const Vcx>(g.data(), n);
    Vcx psi = lam.op.m * gv;
    density_.assign(psi.data(), psi.data() + n);
  }

  // evaluate u at points off Gamma (and away from the sources)
  std::vector<cplx> operator()(const std::vector<Vec2>& points, int upsample = 1) const {
    PotentialKind kind = model_.trace_kind() == TraceKind::normal_derivative
                             ? PotentialKind::double_
                             : PotentialKind::single;
    std::vector<cplx> u = eval_layer_potential(kind, *mesh_, p_, density_, points, upsample).values;
    for (size_t i = 0; i < points.size(); ++i) {
      for (const auto& s : sources_) {
        double r = (points[i] - s.location).norm();
        u[i] += s.charge * resolvent_kernel(p_, r);
      }
    }
    return u;
  }

  // free field alone (for comparisons)
  std::vector<cplx> free_field(const std::vector<Vec2>& points) const {
    std::vector<cplx> u(points.size(), cplx(0.0, 0.0));
    for (size_t i = 0; i < points.size(); ++i)
      for (const auto& s : sources_)
        u[i] += s.charge * resolvent_kernel(p_, (points[i] - s.location).norm());
    return u;
  }

  const std::vector<cplx>& boundary_density() const { return density_; }
  double condition_estimate() const { return condition_; }

 private:
  ModelSpec model_;
  const BoundaryMesh* mesh_;
  SpectralPoint p_;
  std::vector<PointSource> sources_;
  std::vector<cplx> density_;
  double condition_ = 0.0;
};

inline KreinField krein_resolvent_apply(const ModelSpec& model, const BoundaryMesh& mesh,
                                        const SpectralPoint& p,
                                        std::vector<PointSource> sources) {
  if (!model.is_delta() && model.variant != ModelSpec::Variant::dirichlet &&
      model.variant != ModelSpec::Variant::neumann)
    throw std::invalid_argument("krein_resolvent_apply: unknown model");
  if (p.is_limit())
    throw std::invalid_argument("krein_resolvent_apply: resolvent-regime z required");
  return KreinField(model, mesh, p, std::move(sources));
}

struct EigenvalueHit {
  double lambda = 0.0;            // z = lambda > 0, paper sign convention
  double residual = 0.0;          // smallest singular value at the root
  bool refined = false;
};

namespace detail {

inline Eigen::MatrixXd delta_pencil(const ModelSpec& model, const BoundaryMesh& mesh,
                                    double lam) {
  const int n = mesh.size();
  SpectralPoint p = SpectralPoint::resolvent({lam, 0.0});
  Vre s = model.strength_vector(n);
  if (model.variant == ModelSpec::Variant::delta_alpha) {
    Mat K = assemble_single_layer_trace(mesh, p).m;
    return Eigen::MatrixXd::Identity(n, n) + s.asDiagonal().toDenseMatrix() * K.real();
  }
  Mat T = assemble_hypersingular_trace(mesh, p).m;
  Eigen::MatrixXd B = -Eigen::PartialPivLU<Eigen::MatrixXd>(T.real())
                           .solve(Eigen::MatrixXd::Identity(n, n));
  return Eigen::MatrixXd::Identity(n, n) + s.asDiagonal().toDenseMatrix() * B;
}

inline double sigma_min(const Eigen::MatrixXd& a) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues().minCoeff();
}

}  // namespace detail

// Scan (0, lambda_max] for the discrete spectrum of the delta models: local
// minima of the smallest singular value of the real pencil, refined by
// golden-section search.  An empty result is a valid outcome.
inline std::vector<EigenvalueHit> find_discrete_eigenvalues(const ModelSpec& model,
                                                            const BoundaryMesh& mesh,
                                                            double lambda_max,
                                                            int n_grid = 160) {
  if (!model.is_delta())
    throw std::invalid_argument("find_discrete_eigenvalues: delta models only");
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max))
    throw std::invalid_argument("find_discrete_eigenvalues: finite lambda_max > 0 required");
  if (model.strength_vector(mesh.size()).cwiseAbs().maxCoeff() == 0.0) return {};

  std::vector<double> grid(n_grid), sig(n_grid);
  for (int i = 0; i < n_grid; ++i) {
    grid[i] = lambda_max * (i + 1.0) / n_grid;
    sig[i] = detail::sigma_min(detail::delta_pencil(model, mesh, grid[i]));
  }
  double scale = *std::max_element(sig.begin(), sig.end());

  std::vector<EigenvalueHit> hits;
  auto f = [&](double lam) { return detail::sigma_min(detail::delta_pencil(model, mesh, lam)); };
  for (int i = 1; i + 1 < n_grid; ++i) {
    if (!(sig[i] <= sig[i - 1] && sig[i] <= sig[i + 1])) continue;
    if (sig[i] > 0.2 * scale) continue;  // shallow wiggle, not a candidate
    // golden-section refinement of the dip
    double a = grid[i - 1], b = grid[i + 1];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while ((b - a) > 1e-10 * b) {
      if (fc < fd) {
        b = d; d = c; fd = fc;
        c = b - gr * (b - a);
        fc = f(c);
      } else {
        a = c; c = d; fc = fd;
        d = a + gr * (b - a);
        fd = f(d);
      }
    }
    double lam_star = 0.5 * (a + b);
    double res = f(lam_star);
    if (res < 1e-6 * scale) hits.push_back({lam_star, res, true});
  }
  return hits;
}

}  // namespace biscat
