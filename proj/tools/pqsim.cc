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

// pqsim command-line driver: sweep | decode-stats | verify | schedule-dump.

#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "pqsim/commands.h"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> output_dir;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> architecture;
  std::vector<std::string> laws;
  bool flip_zz_sign = false;
  bool timestamp = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("-c,--config", f.config, "JSON config file (defaults when omitted)");
  sub->add_option("-o,--output-dir", f.output_dir, "output directory (beats PQSIM_OUTPUT_DIR)");
  sub->add_option("-j,--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_flag("--timestamp", f.timestamp, "record generation time in JSON metadata");
}

// File, then environment, then flags.
pqsim::ExperimentConfig resolve(const Flags& f) {
  pqsim::ExperimentConfig cfg =
      f.config.empty() ? pqsim::default_experiment_config() : pqsim::load_experiment_config(f.config);
  if (const char* env = std::getenv("PQSIM_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
  if (f.output_dir) cfg.output_dir = *f.output_dir;
  if (f.workers) cfg.workers = *f.workers;
  if (f.seed) cfg.seed = *f.seed;
  if (f.architecture) {
    try {
      const pqsim::ArchitectureKind kind = pqsim::architecture_from_name(*f.architecture);
      if (kind != cfg.run.arch.kind) {
        // Device timings carry over; the readout path is per-kind.
        cfg.run.arch.kind = kind;
        cfg.run.arch.readout_path_nm = pqsim::ArchitectureSpec::defaults(kind).readout_path_nm;
      }
    } catch (const std::invalid_argument& e) {
      throw pqsim::ConfigError(std::string("--architecture: ") + e.what());
    }
  }
  if (!f.laws.empty()) {
    cfg.sweep.laws.clear();
    for (const std::string& l : f.laws) {
      try {
        cfg.sweep.laws.push_back(pqsim::dephasing_law_from_name(l));
      } catch (const std::invalid_argument& e) {
        throw pqsim::ConfigError(std::string("--law: ") + e.what());
      }
    }
  }
  if (f.flip_zz_sign) cfg.verify.flip_zz_sign = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy parity-QAOA simulation on shuttling-based spin-qubit devices"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* sweep = app.add_subcommand("sweep", "epsilon versus shuttle velocity");
  add_common(sweep, f);
  sweep->add_option("-a,--architecture", f.architecture, "spin_bus | modular | modular_hop");
  sweep->add_option("--law", f.laws, "dephasing law(s): linear | gaussian");

  CLI::App* decode = app.add_subcommand("decode-stats", "spanning-tree decoding statistics");
  add_common(decode, f);

  CLI::App* verify = app.add_subcommand("verify", "run the oracle suites");
  add_common(verify, f);
  verify->add_flag("--flip-zz-sign", f.flip_zz_sign, "debug: flip the ZZ angle convention");

  CLI::App* dump = app.add_subcommand("schedule-dump", "timed schedule and per-qubit totals");
  add_common(dump, f);
  dump->add_option("-a,--architecture", f.architecture, "spin_bus | modular | modular_hop");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return pqsim::kExitConfig;
  }

  return pqsim::run_guarded(
      [&] {
        const pqsim::ExperimentConfig cfg = resolve(f);
        const pqsim::CommandOptions opts{f.timestamp};
        if (sweep->parsed()) return pqsim::cmd_sweep(cfg, opts, std::cout);
        if (decode->parsed()) return pqsim::cmd_decode_stats(cfg, opts, std::cout);
        if (verify->parsed()) return pqsim::cmd_verify(cfg, opts, std::cout);
        return pqsim::cmd_schedule_dump(cfg, opts, std::cout);
      },
      std::cerr);
}
