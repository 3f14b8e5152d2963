#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "percap.h"

namespace fs = std::filesystem;

namespace {

const char* kTauConfig =
    R"({"kind":"tau","dimension":2,"p":0.45,"z":[2,0],"n":20000,"master_seed":5,"workers":1})";

}  // namespace

TEST_CASE("version string") {
  CHECK(std::string(percap_version()).find("percap") != std::string::npos);
}

TEST_CASE("run lifecycle over the C surface") {
  percap_run* run = nullptr;
  REQUIRE(percap_run_create(kTauConfig, &run) == PERCAP_OK);
  CHECK(percap_run_execute(run) == PERCAP_OK);
  const std::string csv = percap_run_result_csv(run);
  const std::string json = percap_run_result_json(run);
  CHECK(csv.find("experiment,params,n,hits,truncated,value,se,wilson_lo,wilson_hi,seed") == 0);
  CHECK(json.find("\"results\"") != std::string::npos);
  CHECK(std::string(percap_run_error(run)).empty());
  percap_run_destroy(run);
}

TEST_CASE("null and invalid arguments") {
  CHECK(percap_run_create(nullptr, nullptr) == PERCAP_ERR_INVALID);
  CHECK(percap_run_execute(nullptr) == PERCAP_ERR_INVALID);
  CHECK(percap_run_override_workers(nullptr, 1) == PERCAP_ERR_INVALID);
  CHECK(std::string(percap_run_result_csv(nullptr)).empty());
}

TEST_CASE("config errors carry a message and the config status") {
  percap_run* run = nullptr;
  REQUIRE(percap_run_create(R"({"kind":"tau","dimension":2})", &run) == PERCAP_OK);
  CHECK(percap_run_execute(run) == PERCAP_ERR_CONFIG);
  CHECK(std::string(percap_run_error(run)).find("requires field") != std::string::npos);
  percap_run_destroy(run);
}

TEST_CASE("underpowered runs report the dedicated status") {
  percap_run* run = nullptr;
  REQUIRE(percap_run_create(
              R"({"kind":"pcap","dimension":2,"p":0.1,"A":[[0,0]],"z":[30,0],"n":50})",
              &run) == PERCAP_OK);
  CHECK(percap_run_execute(run) == PERCAP_ERR_UNDERPOWERED);
  percap_run_destroy(run);
}

TEST_CASE("overrides: seed and workers keep results byte-identical") {
  auto run_with = [&](int workers) {
    percap_run* run = nullptr;
    REQUIRE(percap_run_create(kTauConfig, &run) == PERCAP_OK);
    percap_run_override_seed(run, 99);
    percap_run_override_workers(run, workers);
    REQUIRE(percap_run_execute(run) == PERCAP_OK);
    std::string out = percap_run_result_csv(run);
    percap_run_destroy(run);
    return out;
  };
  const std::string a = run_with(1);
  const std::string b = run_with(4);
  CHECK(a == b);
  CHECK(a.find(",99\n") != std::string::npos);  // overridden seed lands in the CSV
}

TEST_CASE("file creation and config loading from disk") {
  const fs::path dir = fs::temp_directory_path() / "percap_capi_out";
  fs::remove_all(dir);
  const fs::path cfg_path = dir / "cfg.json";
  fs::create_directories(dir);
  {
    std::ofstream out(cfg_path);
    out << kTauConfig;
  }
  percap_run* run = nullptr;
  REQUIRE(percap_run_create_from_file(cfg_path.string().c_str(), &run) == PERCAP_OK);
  percap_run_override_output_dir(run, dir.string().c_str());
  REQUIRE(percap_run_execute(run) == PERCAP_OK);
  CHECK(fs::exists(percap_run_csv_path(run)));
  CHECK(fs::exists(percap_run_json_path(run)));
  percap_run_destroy(run);

  percap_run* missing = nullptr;
  CHECK(percap_run_create_from_file((dir / "nope.json").string().c_str(), &missing) ==
        PERCAP_ERR_IO);
  percap_run_destroy(missing);
  fs::remove_all(dir);
}

TEST_CASE("sweep grids over the C surface") {
  percap_run* run = nullptr;
  REQUIRE(percap_run_create(
              R"({"kind":"one_arm","dimension":2,"p":0.5,"r":2,"n":1000,"master_seed":3})",
              &run) == PERCAP_OK);
  REQUIRE(percap_run_add_grid(run, "r=2,3") == PERCAP_OK);
  REQUIRE(percap_run_execute(run) == PERCAP_OK);
  const std::string csv = percap_run_result_csv(run);
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 3);  // header + two rows
  percap_run_destroy(run);
}

TEST_CASE("oracle enumeration allocates a JSON answer") {
  char* result = nullptr;
  const char* req = R"({
    "dimension": 2, "p": 0.5,
    "region": {"kind":"box","center":[0,0],"radius":1},
    "source": [0,0], "targets": [[1,0]]
  })";
  REQUIRE(percap_oracle_enumerate(req, &result) == PERCAP_OK);
  CHECK(std::string(result).find("p_connect") != std::string::npos);
  percap_free(result);
  CHECK(percap_oracle_enumerate("{bad", &result) == PERCAP_ERR_CONFIG);
}
