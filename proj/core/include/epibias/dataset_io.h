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

// Dataset CSV files.
//
//   n_samples,n_features,n_classes,channels          (values, first line)
//   sample_id,label,attribute,subgroup,f_0,...,f_{d-1}  (one row per sample)
//
// Features use the shortest decimal form that round-trips, so a write/read
// cycle is lossless and output bytes are a pure function of the data.

#ifndef EPIBIAS_DATASET_IO_H_
#define EPIBIAS_DATASET_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "epibias/biased_data.h"

namespace epibias {

std::string DatasetCsv(const Dataset& data);
// Throws SchemaError with the offending line number.
Dataset ParseDatasetCsv(std::string_view text);

void WriteDataset(const std::filesystem::path& path, const Dataset& data);
Dataset ReadDataset(const std::filesystem::path& path);

// Shortest round-trip decimal form of `v`.
std::string FormatDouble(double v);

std::string ReadFileBytes(const std::filesystem::path& path);
// Writes to a sibling temporary and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace epibias

#endif  // EPIBIAS_DATASET_IO_H_
