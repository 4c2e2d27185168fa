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

// Flat `key = value` configuration files. Blank lines and lines starting with
// '#' are ignored. Every key must be known; typos are errors that name the
// line.

#ifndef EPIBIAS_CONFIG_H_
#define EPIBIAS_CONFIG_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "epibias/biased_data.h"
#include "epibias/trainer.h"

namespace epibias {

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

// Throws ConfigError("<source>:<line>: ...") on malformed lines or repeated
// keys.
std::vector<KeyValue> ParseKeyValueText(std::string_view text,
                                        std::string_view source = "config");

// Relative dataset paths are resolved against `base_dir`.
RunConfig ParseRunConfig(std::string_view text,
                         const std::filesystem::path& base_dir = {},
                         std::string_view source = "config");
RunConfig LoadRunConfig(const std::filesystem::path& path);
// Inverse of ParseRunConfig (paths written as stored).
std::string RunConfigText(const RunConfig& config);
// Resolved configuration as a JSON object, for manifests.
std::string RunConfigJson(const RunConfig& config);

SyntheticSpec ParseSyntheticSpec(std::string_view text,
                                 std::string_view source = "spec");
SyntheticSpec LoadSyntheticSpec(const std::filesystem::path& path);
std::string SyntheticSpecText(const SyntheticSpec& spec);

// "5:1" style ratio.
SplitRatio ParseSplitRatio(std::string_view text);

// Comma-separated list of reals, e.g. "0,0.5,1".
std::vector<double> ParseRealList(std::string_view text);

}  // namespace epibias

#endif  // EPIBIAS_CONFIG_H_
