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

#include <span>
#include <vector>

#include "mvp/attention.hpp"
#include "mvp/config.hpp"
#include "mvp/geometry.hpp"

namespace mvp {

/// Attention-guided view proposal. Seeds a view_w x view_h window at each
/// top-k patch centre, drops identical windows, ranks windows by how many
/// top-k centres they contain and returns at most m of them with ids 1..m.
///
/// Ordering is by rank (desc), then seed score (desc), then seed token (asc).
std::vector<View> propose_views(const AttentionScores& scores, ImageDims dims,
                                const MvpConfig& cfg);

/// The four one-sided border-padding views used for low-resolution
/// screenshots, in order left, right, top, bottom (ids 1..4).
std::vector<View> border_pad_views(ImageDims dims, const MvpConfig& cfg);

/// Per-sample containing indicator: 1 if any view fully contains gt.
double containing_ratio(std::span<const View> views, const Rect& gt);

}  // namespace mvp
