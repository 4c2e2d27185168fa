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

#ifndef EPIBIAS_RNG_H_
#define EPIBIAS_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace epibias {

using Rng = std::mt19937_64;

// Named stream identifiers. Every consumer of randomness draws from its own
// stream so that changing one consumer never perturbs another.
namespace streams {
inline constexpr std::string_view kInit = "init";
inline constexpr std::string_view kShuffle = "batch-shuffle";
inline constexpr std::string_view kNoise = "langevin-noise";
inline constexpr std::string_view kData = "data-generation";
}  // namespace streams

// Mixes a master seed and a stream name into an independent 64-bit seed.
std::uint64_t DeriveSeed(std::uint64_t master, std::string_view stream);

inline Rng MakeStream(std::uint64_t master, std::string_view stream) {
  return Rng(DeriveSeed(master, stream));
}

}  // namespace epibias

#endif  // EPIBIAS_RNG_H_
