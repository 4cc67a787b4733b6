// Copyright 2026 The pqsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "pqsim/commands.h"
#include "pqsim/io.h"

namespace pqsim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string config_error(const json& j) {
  try {
    experiment_config_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    out[e.path().filename().string()] = read_file(e.path());
  }
  return out;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pqsim_io_test_" + name);
  fs::remove_all(p);
  return p;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

ExperimentConfig small_config(const fs::path& dir) {
  ExperimentConfig cfg = default_experiment_config();
  cfg.output_dir = dir.string();
  cfg.sweep.velocities = {1.0, 10.0, 30.0};
  cfg.sweep.families = {{100.0, 20.0}, {50.0, 30.0}};
  cfg.decode.n_max = 8;
  cfg.decode.mc_sizes = {4, 5};
  cfg.decode.mc_trials = 20000;
  cfg.decode.x_max_epsilons = {0.0, 0.1, 0.5};
  return cfg;
}

TEST(Config, StrictParsingNamesTheField) {
  EXPECT_NE(config_error({{"run", {{"gate", {{"p_dd", 0.1}}}}}}).find("run.gate.p_dd"),
            std::string::npos);
  EXPECT_NE(config_error({{"run", {{"gate", {{"p_d", "high"}}}}}}).find("run.gate.p_d"),
            std::string::npos);
  EXPECT_NE(config_error({{"workers", 0}}).find("workers"), std::string::npos);
  EXPECT_NE(config_error({{"run", {{"coherence", {{"law", "cubic"}}}}}}).find("law"),
            std::string::npos);
  EXPECT_EQ(config_error(json::object()), "");
}

TEST(Config, DefaultsRoundTripAndHash) {
  const ExperimentConfig d = default_experiment_config();
  EXPECT_EQ(d.sweep.families.size(), 6u);
  EXPECT_EQ(d.verify.omegas.size(), 5u);
  EXPECT_EQ(d.decode.x_max_epsilons.size(), 10u);
  const ExperimentConfig back = experiment_config_from_json(to_json(d));
  EXPECT_EQ(to_json(back), to_json(d));
  EXPECT_EQ(config_hash(back), config_hash(d));
  EXPECT_EQ(config_hash(d).size(), 64u);

  ExperimentConfig moved = d;
  moved.output_dir = "elsewhere";
  EXPECT_EQ(config_hash(moved), config_hash(d));
  ExperimentConfig changed = d;
  changed.run.noise.gate.p_d = 2e-3;
  EXPECT_NE(config_hash(changed), config_hash(d));
}

TEST(Config, ArchitectureDefaultsFollowKind) {
  const ExperimentConfig c =
      experiment_config_from_json({{"run", {{"architecture", {{"kind", "modular"}}}}}});
  EXPECT_EQ(c.run.arch.kind, ArchitectureKind::kModular);
  EXPECT_EQ(c.run.arch.readout_path_nm, 0);
}

TEST(Sha256, KnownDigest) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Csv, Quoting) {
  CsvWriter w({"a", "b"});
  w.add_row({"1,5", "say \"hi\""});
  w.add_row({"plain", "2"});
  EXPECT_EQ(w.str(), "a,b\n\"1,5\",\"say \"\"hi\"\"\"\nplain,2\n");
  EXPECT_THROW(w.add_row({"only one"}), std::logic_error);
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(Commands, OutputsAreByteIdentical) {
  std::ostringstream log;
  const fs::path dir = fresh_dir("det");
  std::map<std::string, std::string> runs[2];
  for (int i = 0; i < 2; ++i) {
    fs::remove_all(dir);
    const ExperimentConfig cfg = small_config(dir);
    ASSERT_EQ(cmd_sweep(cfg, {}, log), kExitOk);
    ASSERT_EQ(cmd_decode_stats(cfg, {}, log), kExitOk);
    ASSERT_EQ(cmd_schedule_dump(cfg, {}, log), kExitOk);
    runs[i] = read_dir(dir);
  }
  EXPECT_GE(runs[0].size(), 9u);
  EXPECT_EQ(runs[0], runs[1]);
  const std::string hash = config_hash(small_config(dir));
  for (const auto& [name, body] : runs[0]) {
    EXPECT_NE(body.find(hash), std::string::npos) << name;
  }
  // Two families, one of them infeasible, three velocities.
  EXPECT_EQ(count_lines(runs[0]["sweep.csv"]), 4);
  const json j = json::parse(runs[0]["sweep.json"]);
  EXPECT_EQ(j["skipped_families"].size(), 1u);
  EXPECT_FALSE(j.contains("generated_at"));
}

TEST(Commands, WorkerCountOnlyChangesTheHash) {
  std::ostringstream log;
  std::string csv[2], hash[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path dir = fresh_dir("workers" + std::to_string(i));
    ExperimentConfig cfg = small_config(dir);
    cfg.workers = i + 1;
    ASSERT_EQ(cmd_sweep(cfg, {}, log), kExitOk);
    csv[i] = read_file(dir / "sweep.csv");
    hash[i] = config_hash(cfg);
    const auto at = csv[i].find(hash[i]);
    ASSERT_NE(at, std::string::npos);
    // Blank out every occurrence of the hash before comparing.
    for (auto p = at; p != std::string::npos; p = csv[i].find(hash[i], p)) {
      csv[i].replace(p, hash[i].size(), "H");
    }
  }
  EXPECT_NE(hash[0], hash[1]);
  EXPECT_EQ(csv[0], csv[1]);
}

TEST(Commands, SinglePointSweep) {
  const fs::path dir = fresh_dir("single");
  ExperimentConfig cfg = small_config(dir);
  cfg.sweep.velocities = {10.0};
  cfg.sweep.families = {{100.0, 20.0}};
  std::ostringstream log;
  ASSERT_EQ(cmd_sweep(cfg, {true}, log), kExitOk);
  EXPECT_EQ(count_lines(read_file(dir / "sweep.csv")), 2);
  const json j = json::parse(read_file(dir / "sweep.json"));
  EXPECT_TRUE(j.contains("generated_at"));
}

TEST(Commands, ModularDumpHasSwapVersusHopDiff) {
  const fs::path dir = fresh_dir("modular");
  ExperimentConfig cfg = small_config(dir);
  cfg.run.arch = ArchitectureSpec::defaults(ArchitectureKind::kModular);
  std::ostringstream log;
  ASSERT_EQ(cmd_schedule_dump(cfg, {}, log), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "schedule_modular.json"));
  EXPECT_TRUE(fs::exists(dir / "swap_vs_hop.diff"));
  EXPECT_FALSE(fs::exists(dir / "schedule_spin_bus.json"));
}

TEST(Commands, VerifyNegativeControlFails) {
  const fs::path dir = fresh_dir("verify");
  ExperimentConfig cfg = small_config(dir);
  cfg.verify.quadrature_tuples = 1;
  cfg.verify.quadrature_samples = 100000;
  cfg.verify.flip_zz_sign = true;
  std::ostringstream log;
  EXPECT_EQ(cmd_verify(cfg, {}, log), kExitVerification);
  const json j = json::parse(read_file(dir / "verify.json"));
  EXPECT_TRUE(j.contains("checks"));
}

TEST(Commands, ExitCodeMapping) {
  std::ostringstream err;
  EXPECT_EQ(run_guarded([] { return 0; }, err), kExitOk);
  EXPECT_EQ(run_guarded([]() -> int { throw ConfigError("bad key"); }, err), kExitConfig);
  EXPECT_EQ(run_guarded([]() -> int { throw std::invalid_argument("bad"); }, err), kExitConfig);
  EXPECT_EQ(run_guarded([]() -> int { throw NumericalError("nan"); }, err), kExitNumerical);
  EXPECT_EQ(run_guarded([] { return 3; }, err), kExitVerification);
  EXPECT_NE(err.str().find("bad key"), std::string::npos);
}

TEST(Commands, MissingConfigFileIsAConfigError) {
  std::ostringstream err;
  EXPECT_EQ(run_guarded([] {
              load_experiment_config("/nonexistent/pqsim.json");
              return 0;
            }, err),
            kExitConfig);
}

}  // namespace
}  // namespace pqsim
