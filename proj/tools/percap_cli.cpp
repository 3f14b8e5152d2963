// percap command-line front end. Talks to the engine exclusively through the
// C API in percap.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "percap.h"

namespace {

int exit_code_for(percap_status s) {
  switch (s) {
    case PERCAP_OK: return 0;
    case PERCAP_ERR_CONFIG: return 2;
    case PERCAP_ERR_UNDERPOWERED: return 3;
    default: return 1;
  }
}

int execute(const std::string& config_path, const std::vector<std::string>& grids,
            const std::string& out_dir, int workers, bool seed_set, uint64_t seed,
            bool print_csv) {
  percap_run* run = nullptr;
  percap_status st = percap_run_create_from_file(config_path.c_str(), &run);
  if (st != PERCAP_OK) {
    std::cerr << "error: " << (run ? percap_run_error(run) : "cannot create run") << "\n";
    percap_run_destroy(run);
    return exit_code_for(st);
  }
  if (!out_dir.empty()) percap_run_override_output_dir(run, out_dir.c_str());
  if (workers > 0) percap_run_override_workers(run, workers);
  if (seed_set) percap_run_override_seed(run, seed);
  for (const std::string& g : grids) {
    st = percap_run_add_grid(run, g.c_str());
    if (st != PERCAP_OK) {
      std::cerr << "error: " << percap_run_error(run) << "\n";
      percap_run_destroy(run);
      return exit_code_for(st);
    }
  }

  st = percap_run_execute(run);
  if (st != PERCAP_OK) {
    std::cerr << "error: " << percap_run_error(run) << "\n";
    percap_run_destroy(run);
    return exit_code_for(st);
  }

  if (print_csv) std::cout << percap_run_result_csv(run);
  const std::string csv_path = percap_run_csv_path(run);
  const std::string json_path = percap_run_json_path(run);
  if (!csv_path.empty()) std::cerr << "wrote " << csv_path << "\n";
  if (!json_path.empty()) std::cerr << "wrote " << json_path << "\n";
  percap_run_destroy(run);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"percap: critical percolation capacity laboratory"};
  app.set_version_flag("--version", percap_version());
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int workers = 0;
  uint64_t seed = 0;
  bool no_csv = false;
  std::vector<std::string> grids;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "experiment config (JSON)")->required();
    cmd->add_option("--out", out_dir, "output directory for results files");
    cmd->add_option("--workers", workers, "worker threads (overrides config)");
    cmd->add_option("--seed", seed, "master seed (overrides config)");
    cmd->add_flag("--no-csv", no_csv, "suppress CSV on stdout");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
  add_common(run_cmd);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--grid", grids, "param=v1,v2,... (repeat for a second axis)")
      ->required();

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "exact small-graph reference values");
  CLI::App* enum_cmd = oracle_cmd->add_subcommand("enumerate", "exhaustive 2^E enumeration");
  std::string oracle_path;
  enum_cmd->add_option("request", oracle_path, "oracle request (JSON)")->required();
  oracle_cmd->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  const bool seed_set = run_cmd->count("--seed") > 0 || sweep_cmd->count("--seed") > 0;

  if (run_cmd->parsed())
    return execute(config_path, {}, out_dir, workers, seed_set, seed, !no_csv);
  if (sweep_cmd->parsed())
    return execute(config_path, grids, out_dir, workers, seed_set, seed, !no_csv);

  // oracle enumerate
  std::ifstream in(oracle_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open " << oracle_path << "\n";
    return 2;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  char* result = nullptr;
  const percap_status st = percap_oracle_enumerate(ss.str().c_str(), &result);
  if (st != PERCAP_OK) {
    std::cerr << "error: oracle enumeration failed\n";
    return exit_code_for(st);
  }
  std::cout << result;
  percap_free(result);
  return 0;
}
