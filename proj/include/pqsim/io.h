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

#ifndef PQSIM_IO_H_
#define PQSIM_IO_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pqsim/architectures.h"
#include "pqsim/decoding.h"
#include "pqsim/simulation.h"

namespace pqsim {

inline constexpr int kSchemaVersion = 1;

// Bad config file, unknown key or out-of-range value. The message names the
// offending field path (e.g. "run.noise.gate.p_d").
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepSettings {
  double v_min_m_s = 0.1;
  double v_max_m_s = 100.0;
  int points_per_decade = 31;
  std::vector<double> velocities;  // explicit list; overrides the log grid
  std::vector<Family> families;
  std::vector<DephasingLaw> laws;

  SweepGrid grid() const;
};

struct DecodeSettings {
  int n_min = 4;
  int n_max = 20;
  double x = 0.9;
  // One p_fail curve per entry, for each tree-count rule.
  std::vector<double> curve_epsilons{0.0, 0.01, 0.03, 0.05};
  std::vector<TreeCountRule> rules{TreeCountRule::kN, TreeCountRule::k2N};
  std::vector<double> x_max_epsilons;  // default: 10 points over [0, 0.5]
  std::vector<int> mc_sizes{4, 5, 6, 8};
  int mc_max_m = 5;
  std::int64_t mc_trials = 200000;
};

struct VerifySettings {
  std::vector<double> omegas;  // default {0, 0.3, 1.1, pi/2, 2.7}
  int quadrature_tuples = 10;
  std::int64_t quadrature_samples = 10000000;
  // Negative control: flips the ZZ angle sign in the constraint circuit.
  bool flip_zz_sign = false;
};

struct ExperimentConfig {
  std::string output_dir = "pqsim-out";
  std::uint64_t seed = 20260101;
  int workers = 1;
  RunConfig run;
  SweepSettings sweep;
  DecodeSettings decode;
  VerifySettings verify;
};

ExperimentConfig default_experiment_config();
// Strict: unknown keys and wrong types raise ConfigError.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);
// SHA-256 of the canonical JSON form, hex encoded.
std::string config_hash(const ExperimentConfig& cfg);
std::string sha256_hex(const std::string& data);

nlohmann::json to_json(const ArchitectureSpec& spec);
nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json to_json(const ParityLayout& layout);
nlohmann::json to_json(const AbstractCircuit& circ);
nlohmann::json to_json(const TimeExpr& t);
nlohmann::json to_json(const Schedule& s);
nlohmann::json to_json(const ScheduleTotals& t);

// Shortest round-trip decimal form ("%.17g").
std::string format_double(double v);

// Minimal CSV writer: comma separated, '\n' line ends, fields quoted only
// when they contain a comma or a quote.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(std::vector<std::string> row);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Writes `content` to dir/name, creating dir. Throws std::runtime_error on
// I/O failure.
void write_text_file(const std::string& dir, const std::string& name, const std::string& content);

}  // namespace pqsim

#endif  // PQSIM_IO_H_
