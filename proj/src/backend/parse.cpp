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

#include "mvp/backend/parse.hpp"

#include <cmath>
#include <cstdlib>
#include <regex>
#include <string>

#include "json.hpp"

namespace mvp {
namespace {

#define MVP_NUM R"((-?(?:\d+(?:\.\d*)?|\.\d+)))"

const std::regex& paren_pair() {
  static const std::regex re(R"(\(\s*)" MVP_NUM R"(\s*,\s*)" MVP_NUM R"(\s*\))");
  return re;
}

const std::regex& key_value_pair() {
  static const std::regex re(R"(\b[xX]\s*=\s*)" MVP_NUM R"(\s*,?\s*[yY]\s*=\s*)" MVP_NUM);
  return re;
}

const std::regex& json_object() {
  static const std::regex re(R"(\{[^{}]*\})");
  return re;
}

const std::regex& point_tag() {
  static const std::regex re(R"(<point>\s*)" MVP_NUM R"((?:\s*,\s*|\s+))" MVP_NUM R"(\s*</point>)");
  return re;
}

#undef MVP_NUM

std::optional<Eigen::Vector2d> from_groups(const std::smatch& m) {
  const double x = std::strtod(m[1].str().c_str(), nullptr);
  const double y = std::strtod(m[2].str().c_str(), nullptr);
  if (!std::isfinite(x) || !std::isfinite(y)) return std::nullopt;
  return Eigen::Vector2d(x, y);
}

std::optional<Eigen::Vector2d> first_pair(const std::string& s, const std::regex& re) {
  std::smatch m;
  if (!std::regex_search(s, m, re)) return std::nullopt;
  return from_groups(m);
}

std::optional<Eigen::Vector2d> first_json(const std::string& s) {
  for (auto it = std::sregex_iterator(s.begin(), s.end(), json_object()); it != std::sregex_iterator();
       ++it) {
    const auto j = nlohmann::json::parse(it->str(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    const auto x = j.find("x");
    const auto y = j.find("y");
    if (x == j.end() || y == j.end() || !x->is_number() || !y->is_number()) continue;
    const double xv = x->get<double>();
    const double yv = y->get<double>();
    if (std::isfinite(xv) && std::isfinite(yv)) return Eigen::Vector2d(xv, yv);
  }
  return std::nullopt;
}

}  // namespace

std::optional<Eigen::Vector2d> parse_coordinates(std::string_view text) {
  const std::string s(text);
  if (auto p = first_pair(s, paren_pair())) return p;
  if (auto p = first_pair(s, key_value_pair())) return p;
  if (auto p = first_json(s)) return p;
  return first_pair(s, point_tag());
}

}  // namespace mvp
