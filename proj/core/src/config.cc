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

#include "epibias/config.h"

#include <charconv>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "epibias/dataset_io.h"
#include "epibias/errors.h"
#include "json.hpp"

namespace epibias {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T ParseValue(std::string_view text) {
  T value{};
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("invalid number '" + std::string(text) + "'");
  }
  return value;
}

std::vector<int> ParseIntList(std::string_view text) {
  std::vector<int> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(ParseValue<int>(Trim(text.substr(start, comma - start))));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string JoinInts(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

template <typename Target>
using Setter = std::function<void(Target&, std::string_view)>;

template <typename Target>
void Apply(const std::vector<KeyValue>& entries,
           const std::map<std::string, Setter<Target>, std::less<>>& setters,
           Target& target, std::string_view source) {
  for (const KeyValue& kv : entries) {
    auto it = setters.find(kv.key);
    if (it == setters.end()) {
      throw ConfigError(std::string(source) + ":" + std::to_string(kv.line) +
                        ": unknown key '" + kv.key + "'");
    }
    try {
      it->second(target, kv.value);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(source) + ":" + std::to_string(kv.line) +
                        ": " + kv.key + ": " + e.what());
    } catch (const UsageError& e) {
      throw ConfigError(std::string(source) + ":" + std::to_string(kv.line) +
                        ": " + kv.key + ": " + e.what());
    }
  }
}

const char* const kDatasetKeys[] = {"train", "val", "test_colour", "test_gray"};

}  // namespace

std::vector<KeyValue> ParseKeyValueText(std::string_view text,
                                        std::string_view source) {
  std::vector<KeyValue> out;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = Trim(text.substr(start, nl - start));
    start = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    const std::string where =
        std::string(source) + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) {
      throw ConfigError(where + "expected 'key = value'");
    }
    KeyValue kv{std::string(Trim(line.substr(0, eq))),
                std::string(Trim(line.substr(eq + 1))), line_no};
    if (kv.key.empty()) throw ConfigError(where + "empty key");
    if (!seen.insert(kv.key).second) {
      throw ConfigError(where + "duplicate key '" + kv.key + "'");
    }
    out.push_back(std::move(kv));
  }
  return out;
}

RunConfig ParseRunConfig(std::string_view text,
                         const std::filesystem::path& base_dir,
                         std::string_view source) {
  const auto entries = ParseKeyValueText(text, source);
  auto resolve = [&](std::string_view v) {
    std::filesystem::path p(v);
    return (p.is_relative() && !base_dir.empty() ? base_dir / p : p).string();
  };

  std::map<std::string, Setter<RunConfig>, std::less<>> setters = {
      {"mode", [](RunConfig& c, std::string_view v) { c.mode = ParseTrainMode(v); }},
      {"layer_sizes",
       [](RunConfig& c, std::string_view v) { c.model.layer_sizes = ParseIntList(v); }},
      {"activation",
       [](RunConfig& c, std::string_view v) { c.model.activation = ParseActivation(v); }},
      {"alpha0", [](RunConfig& c, std::string_view v) { c.alpha0 = ParseValue<double>(v); }},
      {"cycles", [](RunConfig& c, std::string_view v) { c.cycles = ParseValue<int>(v); }},
      {"epochs_per_cycle",
       [](RunConfig& c, std::string_view v) { c.epochs_per_cycle = ParseValue<int>(v); }},
      {"sampling_len",
       [](RunConfig& c, std::string_view v) { c.sampling_len = ParseValue<int>(v); }},
      {"temperature",
       [](RunConfig& c, std::string_view v) { c.noise.temperature = ParseValue<double>(v); }},
      {"momentum",
       [](RunConfig& c, std::string_view v) { c.noise.momentum = ParseValue<double>(v); }},
      {"prior_precision",
       [](RunConfig& c, std::string_view v) { c.prior_precision = ParseValue<double>(v); }},
      {"kappa", [](RunConfig& c, std::string_view v) { c.kappa = ParseValue<double>(v); }},
      {"batch_size",
       [](RunConfig& c, std::string_view v) { c.batch_size = ParseValue<int>(v); }},
      {"seed",
       [](RunConfig& c, std::string_view v) { c.seed = ParseValue<std::uint64_t>(v); }},
      {"train", [&](RunConfig& c, std::string_view v) { c.train_path = resolve(v); }},
      {"val", [&](RunConfig& c, std::string_view v) { c.val_path = resolve(v); }},
      {"test_colour",
       [&](RunConfig& c, std::string_view v) { c.test_colour_path = resolve(v); }},
      {"test_gray",
       [&](RunConfig& c, std::string_view v) { c.test_gray_path = resolve(v); }},
  };
  for (const char* name : kDatasetKeys) {
    setters[std::string("sha256.") + name] = [name](RunConfig& c,
                                                    std::string_view v) {
      if (v.size() != 64 ||
          v.find_first_not_of("0123456789abcdef") != std::string_view::npos) {
        throw ConfigError("expected 64 lowercase hex digits");
      }
      c.pinned_sha256[name] = std::string(v);
    };
  }

  RunConfig config;
  Apply(entries, setters, config, source);
  if (config.model.layer_sizes.empty()) {
    throw ConfigError(std::string(source) + ": missing required key 'layer_sizes'");
  }
  try {
    config.Validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  return config;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  return ParseRunConfig(ReadFileBytes(path), path.parent_path(), path.string());
}

std::string RunConfigText(const RunConfig& c) {
  std::ostringstream out;
  out << "mode = " << TrainModeName(c.mode) << '\n'
      << "layer_sizes = " << JoinInts(c.model.layer_sizes) << '\n'
      << "activation = " << ActivationName(c.model.activation) << '\n'
      << "alpha0 = " << FormatDouble(c.alpha0) << '\n'
      << "cycles = " << c.cycles << '\n'
      << "epochs_per_cycle = " << c.epochs_per_cycle << '\n'
      << "sampling_len = " << c.sampling_len << '\n'
      << "temperature = " << FormatDouble(c.noise.temperature) << '\n'
      << "momentum = " << FormatDouble(c.noise.momentum) << '\n'
      << "prior_precision = " << FormatDouble(c.prior_precision) << '\n'
      << "kappa = " << FormatDouble(c.kappa) << '\n'
      << "batch_size = " << c.batch_size << '\n'
      << "seed = " << c.seed << '\n';
  const std::pair<const char*, const std::string*> paths[] = {
      {"train", &c.train_path},
      {"val", &c.val_path},
      {"test_colour", &c.test_colour_path},
      {"test_gray", &c.test_gray_path}};
  for (const auto& [key, value] : paths) {
    if (!value->empty()) out << key << " = " << *value << '\n';
  }
  for (const auto& [key, digest] : c.pinned_sha256) {
    out << "sha256." << key << " = " << digest << '\n';
  }
  return out.str();
}

std::string RunConfigJson(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["mode"] = TrainModeName(c.mode);
  j["layer_sizes"] = c.model.layer_sizes;
  j["activation"] = ActivationName(c.model.activation);
  j["alpha0"] = c.alpha0;
  j["cycles"] = c.cycles;
  j["epochs_per_cycle"] = c.epochs_per_cycle;
  j["sampling_len"] = c.sampling_len;
  j["temperature"] = c.noise.temperature;
  j["momentum"] = c.noise.momentum;
  j["prior_precision"] = c.prior_precision;
  j["kappa"] = c.kappa;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["train"] = c.train_path;
  j["val"] = c.val_path;
  j["test_colour"] = c.test_colour_path;
  j["test_gray"] = c.test_gray_path;
  return j.dump();
}

SyntheticSpec ParseSyntheticSpec(std::string_view text,
                                 std::string_view source) {
  const auto entries = ParseKeyValueText(text, source);
  const std::map<std::string, Setter<SyntheticSpec>, std::less<>> setters = {
      {"n_classes",
       [](SyntheticSpec& s, std::string_view v) { s.n_classes = ParseValue<int>(v); }},
      {"samples_per_class",
       [](SyntheticSpec& s, std::string_view v) { s.samples_per_class = ParseValue<int>(v); }},
      {"test_per_class",
       [](SyntheticSpec& s, std::string_view v) { s.test_per_class = ParseValue<int>(v); }},
      {"channels",
       [](SyntheticSpec& s, std::string_view v) { s.channels = ParseValue<int>(v); }},
      {"positions_per_channel",
       [](SyntheticSpec& s, std::string_view v) {
         s.positions_per_channel = ParseValue<int>(v);
       }},
      {"center_scale",
       [](SyntheticSpec& s, std::string_view v) { s.center_scale = ParseValue<double>(v); }},
      {"noise_std",
       [](SyntheticSpec& s, std::string_view v) { s.noise_std = ParseValue<double>(v); }},
      {"seed",
       [](SyntheticSpec& s, std::string_view v) { s.seed = ParseValue<std::uint64_t>(v); }},
  };
  SyntheticSpec spec;
  Apply(entries, setters, spec, source);
  try {
    spec.Validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  return spec;
}

SyntheticSpec LoadSyntheticSpec(const std::filesystem::path& path) {
  return ParseSyntheticSpec(ReadFileBytes(path), path.string());
}

std::string SyntheticSpecText(const SyntheticSpec& s) {
  std::ostringstream out;
  out << "n_classes = " << s.n_classes << '\n'
      << "samples_per_class = " << s.samples_per_class << '\n'
      << "test_per_class = " << s.test_per_class << '\n'
      << "channels = " << s.channels << '\n'
      << "positions_per_channel = " << s.positions_per_channel << '\n'
      << "center_scale = " << FormatDouble(s.center_scale) << '\n'
      << "noise_std = " << FormatDouble(s.noise_std) << '\n'
      << "seed = " << s.seed << '\n';
  return out.str();
}

SplitRatio ParseSplitRatio(std::string_view text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("split ratio must look like 5:1");
  }
  SplitRatio r{ParseValue<int>(Trim(text.substr(0, colon))),
               ParseValue<int>(Trim(text.substr(colon + 1)))};
  if (r.train < 0 || r.validation < 0 || r.train + r.validation == 0) {
    throw ConfigError("split ratio parts must be >= 0 with a positive sum");
  }
  return r;
}

std::vector<double> ParseRealList(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(ParseValue<double>(Trim(text.substr(start, comma - start))));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace epibias
