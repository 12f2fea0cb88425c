#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "biscat/runner.hpp"

using namespace biscat;
namespace fs = std::filesystem;

namespace {

json base_config() {
  json j;
  j["geometry"] = {{"shape", "circle"}, {"radius", 1.0}, {"n_nodes", 128}};
  j["model"] = {{"variant", "dirichlet"}};
  j["spectral"] = {{"k_list", {1.0}}, {"n_directions", 32}};
  j["tasks"] = {"smatrix", "oracle_compare"};
  return j;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TmpDir {
  fs::path path;
  TmpDir(const char* name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TmpDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("oracle_compare on the circle lands under tolerance") {
  TmpDir tmp("biscat_run1");
  auto j = base_config();
  j["output_dir"] = tmp.path.string();
  auto cfg = parse_config(j);
  auto outcome = run(cfg);
  CHECK(outcome.exit_code == 0);
  CHECK(outcome.report["max_oracle_deviation"].get<double>() <= 1e-3);
  CHECK(fs::exists(tmp.path / "report.json"));
  CHECK(fs::exists(tmp.path / ("smatrix_dirichlet_" + std::string("1") + ".csv")));
}

TEST_CASE("validation errors name the violated field") {
  auto j = base_config();
  j["spectral"].erase("k_list");
  CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("spectral.k_list"), config_error);

  auto j2 = base_config();
  j2["geometry"]["shape"] = "kite";
  CHECK_THROWS_WITH_AS(parse_config(j2), doctest::Contains("oracle_compare"), config_error);

  auto j3 = base_config();
  j3["model"]["variant"] = "robin";
  CHECK_THROWS_WITH_AS(parse_config(j3), doctest::Contains("model.variant"), config_error);

  auto j4 = base_config();
  j4["tasks"] = {"plot"};
  CHECK_THROWS_WITH_AS(parse_config(j4), doctest::Contains("tasks"), config_error);
}

TEST_CASE("eigenscan run writes the CSV with the oracle root") {
  TmpDir tmp("biscat_run2");
  json j;
  j["geometry"] = {{"shape", "circle"}, {"radius", 1.0}, {"n_nodes", 96}};
  j["model"] = {{"variant", "delta"}, {"strength", -2.0}};
  j["tasks"] = {"eigenscan"};
  j["eigenscan"] = {{"lambda_max", 5.0}, {"n_grid", 80}};
  j["output_dir"] = tmp.path.string();
  auto outcome = run(parse_config(j));
  CHECK(outcome.exit_code == 0);
  std::string csv = slurp((tmp.path / "eigenscan.csv").string());
  CHECK(csv.find("lambda,smallest_singular_value,refined") != std::string::npos);
  auto ref = disk_bound_state_equation(1.0, -2.0, 0);
  REQUIRE(ref.has_value());
  double found = outcome.report["tasks"][0]["eigenvalues"][0].get<double>();
  CHECK(std::abs(found - *ref) / *ref < 1e-3);
}

TEST_CASE("determinism: identical configs give bitwise-identical CSVs") {
  TmpDir t1("biscat_run3a"), t2("biscat_run3b");
  auto j = base_config();
  j["tasks"] = {"smatrix", "diagnostics"};
  j["output_dir"] = t1.path.string();
  run(parse_config(j));
  j["output_dir"] = t2.path.string();
  run(parse_config(j));
  CHECK(slurp((t1.path / "smatrix_dirichlet_1.csv").string()) ==
        slurp((t2.path / "smatrix_dirichlet_1.csv").string()));
  CHECK(slurp((t1.path / "diagnostics.json").string()) ==
        slurp((t2.path / "diagnostics.json").string()));
}

TEST_CASE("report lists every requested task with status and timing") {
  TmpDir tmp("biscat_run4");
  auto j = base_config();
  j["tasks"] = {"smatrix", "farfield", "diagnostics"};
  j["output_dir"] = tmp.path.string();
  auto outcome = run(parse_config(j), 2);
  REQUIRE(outcome.report["tasks"].size() == 3);
  for (const auto& t : outcome.report["tasks"]) {
    CHECK(t.contains("name"));
    CHECK(t["status"] == "ok");
    CHECK(t.contains("seconds"));
  }
  CHECK(fs::exists(tmp.path / "farfield_dirichlet_1.csv"));
  CHECK(fs::exists(tmp.path / "diagnostics.json"));
}

TEST_CASE("per-node strength sidecar") {
  TmpDir tmp("biscat_run5");
  // constant alpha written per node must reproduce the constant-strength run
  auto mesh = build_mesh({Circle{1.0, {0.0, 0.0}}}, 96);
  fs::path side = tmp.path / "alpha.csv";
  {
    std::ofstream f(side);
    for (int i = 0; i < mesh.size(); ++i) f << i << "," << 1.5 << "\n";
  }
  json j;
  j["geometry"] = {{"shape", "circle"}, {"radius", 1.0}, {"n_nodes", 96}};
  j["model"] = {{"variant", "delta"}, {"strength", {{"file", side.string()}}}};
  j["spectral"] = {{"k_list", {1.0}}, {"n_directions", 32}};
  j["tasks"] = {"smatrix"};
  j["output_dir"] = (tmp.path / "a").string();
  auto o1 = run(parse_config(j));
  json j2 = j;
  j2["model"] = {{"variant", "delta"}, {"strength", 1.5}};
  j2["output_dir"] = (tmp.path / "b").string();
  auto o2 = run(parse_config(j2));
  CHECK(o1.exit_code == 0);
  CHECK(slurp((tmp.path / "a/smatrix_delta_1.csv").string()) ==
        slurp((tmp.path / "b/smatrix_delta_1.csv").string()));
}
