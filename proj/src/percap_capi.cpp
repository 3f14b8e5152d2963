#include "percap.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "percap/errors.hpp"
#include "percap/runner.hpp"

struct percap_run {
  std::string config_json;
  percap::runner::RunOverrides overrides;
  std::vector<std::string> grids;
  percap::runner::RunResult result;
  std::string error;
  bool executed = false;
};

namespace {

percap_status capture(percap_run* run, const std::exception& e, percap_status code) {
  if (run) run->error = e.what();
  return code;
}

}  // namespace

extern "C" {

const char* percap_version(void) { return percap::runner::kVersion; }

percap_status percap_run_create(const char* config_json, percap_run** out) {
  if (!config_json || !out) return PERCAP_ERR_INVALID;
  *out = new percap_run;
  (*out)->config_json = config_json;
  return PERCAP_OK;
}

percap_status percap_run_create_from_file(const char* path, percap_run** out) {
  if (!path || !out) return PERCAP_ERR_INVALID;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    *out = new percap_run;
    (*out)->error = std::string("cannot open config file: ") + path;
    return PERCAP_ERR_IO;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  *out = new percap_run;
  (*out)->config_json = ss.str();
  return PERCAP_OK;
}

void percap_run_destroy(percap_run* run) { delete run; }

percap_status percap_run_override_seed(percap_run* run, uint64_t seed) {
  if (!run) return PERCAP_ERR_INVALID;
  run->overrides.seed = seed;
  run->overrides.seed_set = true;
  return PERCAP_OK;
}

percap_status percap_run_override_workers(percap_run* run, int32_t workers) {
  if (!run || workers < 0) return PERCAP_ERR_INVALID;
  run->overrides.workers = workers;
  return PERCAP_OK;
}

percap_status percap_run_override_output_dir(percap_run* run, const char* dir) {
  if (!run || !dir) return PERCAP_ERR_INVALID;
  run->overrides.output_dir = dir;
  return PERCAP_OK;
}

percap_status percap_run_add_grid(percap_run* run, const char* grid_spec) {
  if (!run || !grid_spec) return PERCAP_ERR_INVALID;
  if (run->grids.size() >= 2) {
    run->error = "at most two sweep grids are supported";
    return PERCAP_ERR_CONFIG;
  }
  run->grids.emplace_back(grid_spec);
  return PERCAP_OK;
}

percap_status percap_run_execute(percap_run* run) {
  if (!run) return PERCAP_ERR_INVALID;
  run->error.clear();
  try {
    run->result = run->grids.empty()
                      ? percap::runner::run(run->config_json, run->overrides)
                      : percap::runner::sweep(run->config_json, run->grids, run->overrides);
    run->executed = true;
    return PERCAP_OK;
  } catch (const percap::ConfigError& e) {
    return capture(run, e, PERCAP_ERR_CONFIG);
  } catch (const percap::UnderpoweredError& e) {
    return capture(run, e, PERCAP_ERR_UNDERPOWERED);
  } catch (const std::invalid_argument& e) {
    return capture(run, e, PERCAP_ERR_CONFIG);
  } catch (const std::exception& e) {
    return capture(run, e, PERCAP_ERR_INTERNAL);
  }
}

const char* percap_run_result_csv(const percap_run* run) {
  return run && run->executed ? run->result.csv.c_str() : "";
}

const char* percap_run_result_json(const percap_run* run) {
  return run && run->executed ? run->result.json.c_str() : "";
}

const char* percap_run_csv_path(const percap_run* run) {
  return run && run->executed ? run->result.csv_path.c_str() : "";
}

const char* percap_run_json_path(const percap_run* run) {
  return run && run->executed ? run->result.json_path.c_str() : "";
}

const char* percap_run_error(const percap_run* run) { return run ? run->error.c_str() : ""; }

percap_status percap_oracle_enumerate(const char* request_json, char** result_json) {
  if (!request_json || !result_json) return PERCAP_ERR_INVALID;
  try {
    const std::string out = percap::runner::oracle_enumerate(request_json);
    *result_json = static_cast<char*>(std::malloc(out.size() + 1));
    if (!*result_json) return PERCAP_ERR_INTERNAL;
    std::memcpy(*result_json, out.c_str(), out.size() + 1);
    return PERCAP_OK;
  } catch (const percap::ConfigError&) {
    return PERCAP_ERR_CONFIG;
  } catch (const std::invalid_argument&) {
    return PERCAP_ERR_CONFIG;
  } catch (const std::exception&) {
    return PERCAP_ERR_INTERNAL;
  }
}

void percap_free(char* s) { std::free(s); }

}  // extern "C"
