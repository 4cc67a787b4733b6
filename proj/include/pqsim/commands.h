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

#ifndef PQSIM_COMMANDS_H_
#define PQSIM_COMMANDS_H_

#include <functional>
#include <ostream>

#include "pqsim/io.h"

namespace pqsim {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNumerical = 2,
  kExitVerification = 3,
};

struct CommandOptions {
  // Adds a generated_at field to JSON metadata; off keeps output
  // byte-identical across runs.
  bool timestamp = false;
};

// Each command writes its files into cfg.output_dir and returns an exit code.
// Exceptions propagate; wrap calls in run_guarded for exit-code mapping.
int cmd_sweep(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& log);
int cmd_decode_stats(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& log);
int cmd_verify(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& log);
int cmd_schedule_dump(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& log);

// ConfigError and std::invalid_argument map to 1, NumericalError to 2; other
// exceptions also map to 2. The message goes to `err`.
int run_guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace pqsim

#endif  // PQSIM_COMMANDS_H_
