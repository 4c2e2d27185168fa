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

#include "epibias/dataset_io.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "epibias/errors.h"

namespace epibias {
namespace {

[[noreturn]] void Fail(std::size_t line, const std::string& what) {
  throw SchemaError("dataset line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename T>
T ParseNumber(std::string_view field, std::size_t line) {
  T value{};
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    Fail(line, "cannot parse '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string DatasetCsv(const Dataset& data) {
  std::string out;
  out += std::to_string(data.samples.size()) + ',' +
         std::to_string(data.num_features()) + ',' +
         std::to_string(data.num_classes) + ',' +
         std::to_string(data.channels) + '\n';
  for (const Sample& s : data.samples) {
    out += std::to_string(s.id) + ',' + std::to_string(s.label) + ',' +
           std::to_string(s.attribute) + ',' + std::to_string(s.subgroup);
    for (double f : s.features) {
      out += ',';
      out += FormatDouble(f);
    }
    out += '\n';
  }
  return out;
}

Dataset ParseDatasetCsv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  if (lines.empty()) Fail(1, "missing header");

  const auto header = SplitCommas(lines[0]);
  if (header.size() != 4) {
    Fail(1, "header needs n_samples,n_features,n_classes,channels");
  }
  const auto n_samples = ParseNumber<std::size_t>(header[0], 1);
  const auto n_features = ParseNumber<int>(header[1], 1);
  Dataset data;
  data.num_classes = ParseNumber<int>(header[2], 1);
  data.channels = ParseNumber<int>(header[3], 1);
  if (data.num_classes < 1 || data.channels < 1 || n_features < 0) {
    Fail(1, "class and channel counts must be positive");
  }
  if (lines.size() - 1 != n_samples) {
    Fail(lines.size(), "header declares " + std::to_string(n_samples) +
                           " samples, file has " +
                           std::to_string(lines.size() - 1));
  }

  data.samples.reserve(n_samples);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto fields = SplitCommas(lines[i]);
    if (fields.size() != static_cast<std::size_t>(n_features) + 4) {
      Fail(line_no, "expected " + std::to_string(n_features + 4) +
                        " fields, got " + std::to_string(fields.size()));
    }
    Sample s;
    s.id = ParseNumber<std::int64_t>(fields[0], line_no);
    s.label = ParseNumber<int>(fields[1], line_no);
    s.attribute = ParseNumber<int>(fields[2], line_no);
    s.subgroup = ParseNumber<int>(fields[3], line_no);
    if (s.label < 0 || s.label >= data.num_classes) {
      Fail(line_no, "label out of range");
    }
    if (s.attribute != 0 && s.attribute != 1) {
      Fail(line_no, "attribute must be 0 or 1");
    }
    s.features.reserve(n_features);
    for (int f = 0; f < n_features; ++f) {
      s.features.push_back(ParseNumber<double>(fields[4 + f], line_no));
    }
    data.samples.push_back(std::move(s));
  }
  return data;
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename into " + path.string() + ": " + ec.message());
}

void WriteDataset(const std::filesystem::path& path, const Dataset& data) {
  WriteFileAtomic(path, DatasetCsv(data));
}

Dataset ReadDataset(const std::filesystem::path& path) {
  return ParseDatasetCsv(ReadFileBytes(path));
}

}  // namespace epibias
