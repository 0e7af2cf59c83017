// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "roqsim/roqsim.h"

namespace fs = std::filesystem;

namespace {

constexpr const char* kQuick = R"({
  "duration_s": 30, "warmup_s": 5, "seed": 3,
  "legit": {"count": 2},
  "attack": {"count": 2, "start_s": 5}
})";

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / ("roqsim_capi_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(ROQSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("config round trip and setters") {
  roqsim_config* cfg = nullptr;
  REQUIRE(roqsim_config_from_json(kQuick, &cfg) == ROQSIM_OK);
  CHECK(roqsim_config_set_seed(cfg, 9) == ROQSIM_OK);
  CHECK(roqsim_config_set_defense(cfg, ROQSIM_DEFENSE_SHREW) == ROQSIM_OK);
  char* json = nullptr;
  REQUIRE(roqsim_config_to_json(cfg, &json) == ROQSIM_OK);
  const std::string text = json;
  roqsim_string_free(json);
  CHECK(text.find("\"seed\": 9") != std::string::npos);
  CHECK(text.find("\"shrew\"") != std::string::npos);

  roqsim_config* again = nullptr;
  CHECK(roqsim_config_from_json(text.c_str(), &again) == ROQSIM_OK);
  roqsim_config_free(again);

  roqsim_thresholds bad{0, 1, 1};
  CHECK(roqsim_config_set_thresholds(cfg, &bad) == ROQSIM_ERR_CONFIG);
  CHECK(std::string(roqsim_last_error()).find("positive") != std::string::npos);
  CHECK(roqsim_config_set_defense(cfg, static_cast<roqsim_defense>(17)) == ROQSIM_ERR_INVALID_ARGUMENT);
  roqsim_config_free(cfg);
}

TEST_CASE("malformed configs are config errors") {
  roqsim_config* cfg = nullptr;
  CHECK(roqsim_config_from_json("{not json", &cfg) == ROQSIM_ERR_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(roqsim_config_from_json(R"({"duration": 5})", &cfg) == ROQSIM_ERR_CONFIG);
  CHECK(std::string(roqsim_last_error()).find("duration") != std::string::npos);
  CHECK(roqsim_config_from_json(R"({"attack": {"count": 1, "period_s": 1, "burst_s": 2}})", &cfg) == ROQSIM_ERR_CONFIG);
  CHECK(roqsim_config_from_file("/nonexistent/roqsim.json", &cfg) == ROQSIM_ERR_CONFIG);
  CHECK(roqsim_config_from_json(nullptr, &cfg) == ROQSIM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("run with outputs") {
  const fs::path dir = scratch();
  roqsim_config* cfg = nullptr;
  REQUIRE(roqsim_config_from_json(kQuick, &cfg) == ROQSIM_OK);
  roqsim_config_set_defense(cfg, ROQSIM_DEFENSE_MLDA);
  const std::string trace = (dir / "trace.tsv").string();
  const std::string log = (dir / "detections.csv").string();
  roqsim_run_options opts{trace.c_str(), nullptr, log.c_str()};
  roqsim_result* res = nullptr;
  REQUIRE(roqsim_run(cfg, &opts, &res) == ROQSIM_OK);
  roqsim_metrics m{};
  REQUIRE(roqsim_result_metrics(res, &m) == ROQSIM_OK);
  CHECK(m.conserved == 1);
  CHECK(m.legit_bw_bps > 0);
  CHECK(m.events > 0);
  CHECK(m.blocked_nodes == 2);
  CHECK(m.false_blocks == 0);
  roqsim_result_free(res);

  CHECK(slurp(trace).find("\tframe\tRTS src=") != std::string::npos);
  CHECK(slurp(log).rfind("interval,node,cb,status,action\n", 0) == 0);
  CHECK(slurp(log).find(",block\n") != std::string::npos);

  const std::string unwritable = "/nonexistent/dir/trace.tsv";
  roqsim_run_options bad{unwritable.c_str(), nullptr, nullptr};
  CHECK(roqsim_run(cfg, &bad, &res) == ROQSIM_ERR_IO);
  roqsim_config_free(cfg);
  fs::remove_all(dir);
}

TEST_CASE("calibration through the C API") {
  roqsim_config* cfg = nullptr;
  REQUIRE(roqsim_config_from_json(kQuick, &cfg) == ROQSIM_OK);
  roqsim_thresholds th{};
  CHECK(roqsim_calibrate(cfg, &th) == ROQSIM_ERR_CONFIG);
  roqsim_config_free(cfg);

  REQUIRE(roqsim_config_from_json(R"({"duration_s": 30, "warmup_s": 5})", &cfg) == ROQSIM_OK);
  CHECK(roqsim_calibrate(cfg, &th) == ROQSIM_OK);
  CHECK(th.rc_th > 1);
  CHECK(th.re_th >= 3);
  roqsim_config_free(cfg);
}

TEST_CASE("sweep through the C API") {
  const fs::path dir = scratch();
  roqsim_config* cfg = nullptr;
  REQUIRE(roqsim_config_from_json(R"({"duration_s": 20, "warmup_s": 5, "attack": {"count": 2, "start_s": 5},
      "sweep": {"seeds": [1], "attackers": [1, 2]}})", &cfg) == ROQSIM_OK);
  const std::string out = (dir / "rows.csv").string();
  const std::string summary = (dir / "summary.csv").string();
  REQUIRE(roqsim_sweep(cfg, ROQSIM_AXIS_ATTACKERS, out.c_str(), summary.c_str()) == ROQSIM_OK);
  const std::string rows = slurp(out);
  CHECK(rows.rfind("axis,value,defense,seed,legit_bw_bps,", 0) == 0);
  CHECK(rows.find("attackers,2,shrew,1,") != std::string::npos);
  CHECK(slurp(summary).find("attackers,1,mlda,1,") != std::string::npos);
  CHECK(roqsim_sweep(cfg, static_cast<roqsim_axis>(5), out.c_str(), nullptr) == ROQSIM_ERR_INVALID_ARGUMENT);
  roqsim_config_free(cfg);
  fs::remove_all(dir);
}

TEST_CASE("null arguments") {
  roqsim_result* res = nullptr;
  CHECK(roqsim_run(nullptr, nullptr, &res) == ROQSIM_ERR_INVALID_ARGUMENT);
  CHECK(roqsim_result_metrics(nullptr, nullptr) == ROQSIM_ERR_INVALID_ARGUMENT);
  roqsim_config_free(nullptr);
  roqsim_result_free(nullptr);
  CHECK(std::string(roqsim_version()) == "1.0.0");
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch();
  const fs::path good = dir / "good.json";
  std::ofstream(good) << kQuick;
  const fs::path attack_free = dir / "clean.json";
  std::ofstream(attack_free) << R"({"duration_s": 20, "warmup_s": 5})";
  const fs::path broken = dir / "broken.json";
  std::ofstream(broken) << R"({"legit": {"count": "four"}})";

  CHECK(cli("run --config " + good.string()) == 0);
  CHECK(cli("run --config " + good.string() + " --trace " + (dir / "t.tsv").string() + " --dump-spectra " +
            (dir / "s.csv").string()) == 0);
  CHECK(fs::exists(dir / "t.tsv"));
  CHECK(slurp(dir / "s.csv").rfind("flow,bin,freq_hz,energy\n", 0) == 0);
  CHECK(cli("run --config " + broken.string()) == 1);
  CHECK(cli("run --config " + (dir / "missing.json").string()) == 1);
  CHECK(cli("run") == 1);
  CHECK(cli("calibrate --config " + attack_free.string()) == 0);
  CHECK(cli("calibrate --config " + good.string()) == 1);
  CHECK(cli("sweep sideways --config " + good.string() + " --out x.csv") == 1);
  CHECK(cli("run --config " + good.string() + " --trace /nonexistent/dir/t.tsv") == 2);
  fs::remove_all(dir);
}
