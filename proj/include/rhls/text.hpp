// Copyright (c) 2026 The RHLS Authors. All Rights Reserved.
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
#include <string>
#include <string_view>
#include <vector>

namespace rhls {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

/// Fixed-point formatting with `digits` decimals.
std::string format_fixed(double v, int digits);

/// Whole-string parse; nullopt on trailing garbage or empty input.
std::optional<double> parse_double(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

std::string_view trim(std::string_view s);

}  // namespace rhls
