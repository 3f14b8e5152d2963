#pragma once

// Experiment configuration, dispatch, and result persistence. Configs are
// strict JSON documents (unknown fields rejected); results are written as a
// CSV table plus a JSON record, atomically (write-then-rename).

#include <cstdint>
#include <string>
#include <vector>

namespace percap::runner {

inline constexpr const char* kVersion = "percap 0.1.0";

struct RunOverrides {
  std::string output_dir;  // empty: no files written
  int workers = 0;         // 0: take from config
  uint64_t seed = 0;
  bool seed_set = false;
};

struct RunResult {
  std::string csv;   // experiment,params,n,hits,truncated,value,se,wilson_lo,wilson_hi,seed
  std::string json;  // full record: config echo + structured results
  std::string csv_path;   // set when files were written
  std::string json_path;
};

// Runs one experiment from its JSON document. Throws ConfigError on invalid
// configuration, UnderpoweredError/BracketError for underpowered runs.
RunResult run(const std::string& config_json, const RunOverrides& overrides = {});

// Cartesian sweep over one or two parameter grids ("param=v1,v2,..."); each
// combination runs with a distinct derived seed; results concatenate into
// one CSV / one JSON array.
RunResult sweep(const std::string& config_json, const std::vector<std::string>& grids,
                const RunOverrides& overrides = {});

// Exhaustive small-graph oracle (2^E enumeration, E <= 24) as a JSON call.
std::string oracle_enumerate(const std::string& request_json);

}  // namespace percap::runner
