/*
 * Copyright 2026 The epibias Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end. The commands are exposed as a library so the test
// suite can drive them in-process.

#ifndef EPIBIAS_TOOLS_CLI_H_
#define EPIBIAS_TOOLS_CLI_H_

#include <exception>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "epibias/fairness.h"

namespace epibias::cli {

// Stable process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitTraining = 4;
inline constexpr int kExitSchema = 5;

// Maps a library exception onto the exit-code contract.
int ExitCodeFor(const std::exception& e);

// `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// Prediction logs: header `true_class,predicted_class,attribute,subgroup`;
// an empty subgroup field means "none".
std::string PredictionLogCsv(const std::vector<EvalRecord>& records);
std::vector<EvalRecord> ParsePredictionLog(std::string_view text);

}  // namespace epibias::cli

#endif  // EPIBIAS_TOOLS_CLI_H_
