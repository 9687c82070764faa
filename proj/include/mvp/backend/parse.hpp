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

#include <optional>
#include <string_view>

#include <Eigen/Core>

namespace mvp {

/// Extracts the first coordinate pair from model output text. Families are
/// tried in priority order and the earliest match of the first family that
/// matches wins:
///   1. "(x, y)" / "(x,y)"
///   2. "x=NUM, y=NUM"
///   3. a JSON object with numeric "x" and "y"
///   4. "<point>x y</point>"
/// Returns nullopt when nothing matches.
std::optional<Eigen::Vector2d> parse_coordinates(std::string_view text);

}  // namespace mvp
