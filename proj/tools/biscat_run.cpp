// Command-line runner: executes a JSON run configuration and writes CSV/JSON
// results.  Exit codes: 0 success, 2 configuration error, 3 numerical
// failure.  Set BISCAT_LOG=debug for chatter.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "biscat/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"boundary-integral scattering runner"};
  app.require_subcommand(1);

  CLI::App* run_cmd = app.add_subcommand("run", "execute a run configuration");
  std::string config_path, out_dir;
  int threads = 1;
  bool dump_operators = false;
  run_cmd->add_option("--config", config_path, "JSON run configuration")->required();
  run_cmd->add_option("--out", out_dir, "output directory (overrides config)");
  run_cmd->add_option("--threads", threads, "parallel sweep width");
  run_cmd->add_flag("--dump-operators", dump_operators, "dump assembled operator matrices");

  CLI11_PARSE(app, argc, argv);

  const char* log_env = std::getenv("BISCAT_LOG");
  const bool verbose = log_env && std::string(log_env) != "quiet" && std::string(log_env) != "";

  biscat::RunConfig cfg;
  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot read config '" << config_path << "'\n";
      return 2;
    }
    biscat::json j = biscat::json::parse(in);
    cfg = biscat::parse_config(j);
  } catch (const biscat::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;

  if (verbose)
    std::cerr << "running " << cfg.tasks.size() << " task(s), " << cfg.k_list.size()
              << " spectral point(s), output to " << cfg.output_dir << '\n';

  try {
    auto outcome = biscat::run(cfg, threads, dump_operators);
    if (verbose) std::cerr << outcome.report.dump(2) << '\n';
    if (outcome.exit_code != 0) std::cerr << "numerical failure; see report.json\n";
    return outcome.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}
