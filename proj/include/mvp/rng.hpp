// Copyright 2026 The MVP Grounding Authors. All Rights Reserved.
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

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>

namespace mvp {

std::uint64_t splitmix64(std::uint64_t& state);

/// Folds a key tuple into one 64-bit seed with SplitMix64 rounds.
std::uint64_t mix_key(std::initializer_list<std::uint64_t> parts);

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

/// Deterministic stream: mt19937_64 seeded from a mixed key. Uniform mapping
/// is done here rather than through <random> distributions, whose output is
/// implementation-defined.
class KeyedRng {
 public:
  explicit KeyedRng(std::initializer_list<std::uint64_t> key) : engine_(mix_key(key)) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform in [0, n), unbiased (rejection sampling).
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace mvp
