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

// Model archive: a self-describing container holding the model spec, every
// retained posterior draw, and the final uncertainty table.
//
//   bytes 0..7    magic "EPBARCH1"
//   bytes 8..15   header length H (uint64, little endian)
//   next H bytes  JSON header (spec, draw and table metadata, history)
//   remainder     float64 payload (little endian) referenced by offsets
//                 from the header

#ifndef EPIBIAS_ARCHIVE_H_
#define EPIBIAS_ARCHIVE_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "epibias/trainer.h"

namespace epibias {

std::string ArchiveBytes(const TrainedEnsemble& ensemble);
// Throws SchemaError on a malformed container.
TrainedEnsemble ParseArchive(std::string_view bytes);

void WriteArchive(const std::filesystem::path& path,
                  const TrainedEnsemble& ensemble);
TrainedEnsemble ReadArchive(const std::filesystem::path& path);

}  // namespace epibias

#endif  // EPIBIAS_ARCHIVE_H_
