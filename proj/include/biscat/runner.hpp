#pragma once

// Configuration-driven runner behind the command-line tool: parse a JSON run
// specification, execute the requested tasks (smatrix / farfield / eigenscan
// / diagnostics / oracle_compare), emit CSV/JSON outputs and an aggregate
// report.json.  Identical configs produce bitwise-identical CSV output on
// the same platform: the numeric path has no randomness and formatting is
// locale-independent.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "biscat/oracle.hpp"
#include "biscat/scattering.hpp"

namespace biscat {

using nlohmann::json;

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  BoundaryCurve curve;
  bool is_circle = false;
  double circle_radius = 1.0;
  int n_nodes = 256;
  int grading_depth = 6;

  ModelSpec model;
  double oracle_strength = 0.0;  // constant strength for oracle_compare

  std::vector<double> k_list;
  int n_directions = 64;

  std::vector<std::string> tasks;
  double lambda_max = 10.0;   // eigenscan window
  int eigenscan_grid = 160;
  double oracle_tolerance = 1e-3;

  std::string output_dir = "out";

  bool has_task(const std::string& t) const {
    for (const auto& s : tasks)
      if (s == t) return true;
    return false;
  }
};

namespace detail {

inline std::vector<double> load_strength_csv(const std::string& path, int expected) {
  std::ifstream in(path);
  if (!in) throw config_error("model.strength.file: cannot open '" + path + "'");
  std::vector<double> v(expected, 0.0);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) continue;
    int idx = std::stoi(a);
    if (idx < 0 || idx >= expected)
      throw config_error("model.strength.file: node_index out of range");
    v[idx] = std::stod(b);
  }
  return v;
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
  RunConfig cfg;

  if (!j.contains("geometry")) throw config_error("geometry: missing");
  const json& g = j.at("geometry");
  std::string shape = g.value("shape", "");
  cfg.n_nodes = g.value("n_nodes", 256);
  cfg.grading_depth = g.value("grading_depth", 6);
  if (shape == "circle") {
    Circle c;
    c.radius = g.value("radius", 1.0);
    if (g.contains("center")) c.center = {g["center"][0], g["center"][1]};
    if (!(c.radius > 0.0)) throw config_error("geometry.radius: must be positive");
    cfg.curve = {c};
    cfg.is_circle = true;
    cfg.circle_radius = c.radius;
  } else if (shape == "kite") {
    Kite k;
    k.a = g.value("a", 0.65);
    k.b = g.value("b", 1.5);
    k.scale = g.value("scale", 1.0);
    cfg.curve = {k};
  } else if (shape == "square") {
    double h = 0.5 * g.value("side", 2.0);
    cfg.curve = {Polygon{{{-h, -h}, {h, -h}, {h, h}, {-h, h}}}};
  } else if (shape == "polygon") {
    if (!g.contains("vertices")) throw config_error("geometry.vertices: missing for polygon");
    Polygon p;
    for (const auto& v : g["vertices"]) p.vertices.push_back({v[0], v[1]});
    cfg.curve = {p};
  } else {
    throw config_error("geometry.shape: unknown shape '" + shape + "'");
  }

  if (!j.contains("model")) throw config_error("model: missing");
  const json& m = j.at("model");
  std::string variant = m.value("variant", "");
  double strength_c = 0.0;
  std::vector<double> strength_v;
  if (m.contains("strength")) {
    if (m["strength"].is_number()) {
      strength_c = m["strength"];
    } else if (m["strength"].is_object() && m["strength"].contains("file")) {
      // sidecar CSV (node_index, value); length checked after meshing
      auto mesh_n = build_mesh(cfg.curve, cfg.n_nodes,
                               cfg.curve.is_polygon() ? cfg.grading_depth : 0)
                        .size();
      strength_v = detail::load_strength_csv(m["strength"]["file"], mesh_n);
    } else {
      throw config_error("model.strength: number or {file: path} expected");
    }
  }
  cfg.oracle_strength = strength_c;
  if (variant == "dirichlet") cfg.model = ModelSpec::dirichlet();
  else if (variant == "neumann") cfg.model = ModelSpec::neumann();
  else if (variant == "delta")
    cfg.model = strength_v.empty() ? ModelSpec::delta_alpha(strength_c)
                                   : ModelSpec::delta_alpha(strength_v);
  else if (variant == "delta_prime")
    cfg.model = strength_v.empty() ? ModelSpec::delta_prime_theta(strength_c)
                                   : ModelSpec::delta_prime_theta(strength_v);
  else throw config_error("model.variant: unknown model '" + variant + "'");

  if (j.contains("spectral")) {
    const json& s = j.at("spectral");
    if (s.contains("k_list"))
      for (double k : s["k_list"]) cfg.k_list.push_back(k);
    if (s.contains("lambda_list"))
      for (double lam : s["lambda_list"]) {
        if (!(lam < 0.0)) throw config_error("spectral.lambda_list: entries must be negative");
        cfg.k_list.push_back(std::sqrt(-lam));
      }
    cfg.n_directions = s.value("n_directions", 64);
  }

  if (!j.contains("tasks") || j["tasks"].empty()) throw config_error("tasks: missing or empty");
  for (const auto& t : j["tasks"]) {
    std::string name = t;
    if (name != "smatrix" && name != "farfield" && name != "eigenscan" &&
        name != "diagnostics" && name != "oracle_compare")
      throw config_error("tasks: unknown task '" + name + "'");
    cfg.tasks.push_back(name);
  }

  if ((cfg.has_task("smatrix") || cfg.has_task("farfield") || cfg.has_task("diagnostics") ||
       cfg.has_task("oracle_compare")) &&
      cfg.k_list.empty())
    throw config_error("spectral.k_list: must be nonempty when smatrix/farfield is requested");
  if (cfg.has_task("oracle_compare") && !cfg.is_circle)
    throw config_error("tasks.oracle_compare: allowed only for shape=circle");

  if (j.contains("eigenscan")) {
    cfg.lambda_max = j["eigenscan"].value("lambda_max", 10.0);
    cfg.eigenscan_grid = j["eigenscan"].value("n_grid", 160);
  }
  if (j.contains("tolerances")) cfg.oracle_tolerance = j["tolerances"].value("oracle_match", 1e-3);
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"];
  return cfg;
}

struct RunOutcome {
  int exit_code = 0;
  json report;
};

namespace detail {

struct PerK {
  double k;
  json diagnostics;
  double oracle_deviation = -1.0;
  bool failed = false;
  std::string error;
};

inline void write_smatrix_csv(const std::string& path, const SMatrixResult& res) {
  std::ofstream out(path);
  out << "i,l,re,im\n";
  for (int i = 0; i < res.n_dir; ++i)
    for (int l = 0; l < res.n_dir; ++l)
      out << i << ',' << l << ',' << fmt(res.s(i, l).real()) << ',' << fmt(res.s(i, l).imag())
          << '\n';
}

inline void write_farfield_csv(const std::string& path, const SMatrixResult& res) {
  std::ofstream out(path);
  out << "incident_angle,outgoing_angle,re,im,abs\n";
  DirectionGrid grid(res.n_dir);
  for (int inc = 0; inc < res.n_dir; ++inc) {
    Vcx amp = scattering_amplitude(res, inc);
    for (int o = 0; o < res.n_dir; ++o)
      out << fmt(grid.angle(inc)) << ',' << fmt(grid.angle(o)) << ',' << fmt(amp(o).real())
          << ',' << fmt(amp(o).imag()) << ',' << fmt(std::abs(amp(o))) << '\n';
  }
}

inline void write_operator_csv(const std::string& path, const Mat& m) {
  std::ofstream out(path);
  out << "row,col,re,im\n";
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      out << i << ',' << j << ',' << fmt(m(i, j).real()) << ',' << fmt(m(i, j).imag()) << '\n';
}

}  // namespace detail

inline RunOutcome run(const RunConfig& cfg, int threads = 1, bool dump_operators = false) {
  namespace fs = std::filesystem;
  RunOutcome out;
  fs::create_directories(cfg.output_dir);
  auto t_start = std::chrono::steady_clock::now();

  BoundaryMesh mesh = build_mesh(cfg.curve, cfg.n_nodes,
                                 cfg.curve.is_polygon() ? cfg.grading_depth : 0);
  DirectionGrid grid(cfg.n_directions);

  const bool want_smatrix = cfg.has_task("smatrix") || cfg.has_task("farfield") ||
                            cfg.has_task("diagnostics") || cfg.has_task("oracle_compare");

  std::vector<detail::PerK> per_k(cfg.k_list.size());
  std::mutex mtx;

  auto worker = [&](size_t idx) {
    detail::PerK& slot = per_k[idx];
    slot.k = cfg.k_list[idx];
    try {
      if (!want_smatrix) return;
      auto res = s_matrix(cfg.model, mesh, grid, -slot.k * slot.k);
      std::string tag = std::string(cfg.model.name()) + "_" + detail::fmt(slot.k);
      if (cfg.has_task("smatrix"))
        detail::write_smatrix_csv(cfg.output_dir + "/smatrix_" + tag + ".csv", res);
      if (cfg.has_task("farfield"))
        detail::write_farfield_csv(cfg.output_dir + "/farfield_" + tag + ".csv", res);
      if (dump_operators) {
        auto lam = lambda_limit(cfg.model, mesh, -slot.k * slot.k);
        detail::write_operator_csv(cfg.output_dir + "/operator_lambda_" + tag + ".csv", lam.op.m);
      }
      json d;
      d["k"] = slot.k;
      d["unitarity_residual"] = res.diagnostics.unitarity_residual;
      d["reciprocity_residual"] = res.diagnostics.reciprocity_residual;
      d["condition_of_lambda_solve"] = res.diagnostics.condition_of_lambda_solve;
      Vcx ev = res.eigenvalues();
      std::vector<double> phases(ev.size());
      for (int i = 0; i < ev.size(); ++i) phases[i] = std::arg(ev(i));
      std::sort(phases.begin(), phases.end());
      d["eigenphases"] = phases;
      slot.diagnostics = std::move(d);

      if (cfg.has_task("oracle_compare")) {
        auto tab = disk_partial_wave(cfg.model.variant, cfg.circle_radius, slot.k,
                                     cfg.oracle_strength);
        int mmax = static_cast<int>(std::ceil(slot.k * cfg.circle_radius)) + 5;
        mmax = std::min(mmax, tab.max_mode());
        Vcx ev2 = res.eigenvalues();
        double worst = 0.0;
        for (int m = 0; m <= mmax; ++m) {
          double best = 1e300;
          for (int i = 0; i < ev2.size(); ++i)
            best = std::min(best, std::abs(ev2(i) - tab.s[m]));
          worst = std::max(worst, best);
        }
        slot.oracle_deviation = worst;
      }
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(mtx);
      slot.failed = true;
      slot.error = e.what();
    }
  };

  if (threads > 1 && cfg.k_list.size() > 1) {
    std::vector<std::future<void>> futs;
    std::atomic<size_t> next{0};
    int nt = std::min<int>(threads, static_cast<int>(cfg.k_list.size()));
    for (int t = 0; t < nt; ++t)
      futs.push_back(std::async(std::launch::async, [&] {
        for (size_t i = next.fetch_add(1); i < cfg.k_list.size(); i = next.fetch_add(1))
          worker(i);
      }));
    for (auto& f : futs) f.get();
  } else {
    for (size_t i = 0; i < cfg.k_list.size(); ++i) worker(i);
  }

  json tasks_report = json::array();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  bool any_failed = false;
  json diag_file;
  diag_file["entries"] = json::array();
  double worst_oracle = -1.0;
  for (const auto& slot : per_k) {
    if (slot.failed) {
      any_failed = true;
      continue;
    }
    if (!slot.diagnostics.is_null()) diag_file["entries"].push_back(slot.diagnostics);
    if (slot.oracle_deviation >= 0.0) worst_oracle = std::max(worst_oracle, slot.oracle_deviation);
  }

  for (const auto& t : cfg.tasks) {
    json tr;
    tr["name"] = t;
    if (t == "eigenscan") {
      auto tic = std::chrono::steady_clock::now();
      try {
        auto hits = find_discrete_eigenvalues(cfg.model, mesh, cfg.lambda_max, cfg.eigenscan_grid);
        std::ofstream csv(cfg.output_dir + "/eigenscan.csv");
        csv << "lambda,smallest_singular_value,refined\n";
        for (const auto& h : hits)
          csv << detail::fmt(h.lambda) << ',' << detail::fmt(h.residual) << ','
              << (h.refined ? 1 : 0) << '\n';
        tr["status"] = "ok";
        tr["n_found"] = hits.size();
        json lam = json::array();
        for (const auto& h : hits) lam.push_back(h.lambda);
        tr["eigenvalues"] = lam;
      } catch (const std::exception& e) {
        tr["status"] = "failed";
        tr["error"] = e.what();
        any_failed = true;
      }
      tr["seconds"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
    } else {
      bool ok = true;
      for (const auto& slot : per_k)
        if (slot.failed) ok = false;
      tr["status"] = ok ? "ok" : "failed";
      for (const auto& slot : per_k)
        if (slot.failed) tr["error"] = slot.error;
      tr["seconds"] = elapsed();
      if (t == "oracle_compare" && worst_oracle >= 0.0) {
        tr["max_eigenvalue_deviation"] = worst_oracle;
        tr["within_tolerance"] = worst_oracle <= cfg.oracle_tolerance;
      }
    }
    tasks_report.push_back(tr);
  }

  if (cfg.has_task("diagnostics")) {
    std::ofstream f(cfg.output_dir + "/diagnostics.json");
    f << diag_file.dump(2) << '\n';
  }

  out.report["model"] = cfg.model.name();
  out.report["n_nodes"] = mesh.size();
  out.report["tasks"] = tasks_report;
  out.report["diagnostics"] = diag_file["entries"];
  if (worst_oracle >= 0.0) out.report["max_oracle_deviation"] = worst_oracle;
  out.report["seconds_total"] = elapsed();
  {
    std::ofstream f(cfg.output_dir + "/report.json");
    f << out.report.dump(2) << '\n';
  }
  out.exit_code = any_failed ? 3 : 0;
  return out;
}

}  // namespace biscat
