// Copyright 2026 The Storyline Authors
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

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace storyline {

// A calendar date at day resolution.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}

  // Parses strict "YYYY-MM-DD". Throws ParseError on anything else.
  static Date parse(std::string_view text);
  static Date from_day_number(long long days_since_epoch);

  long long day_number() const noexcept {
    return days_.time_since_epoch().count();
  }
  std::chrono::sys_days sys_days() const noexcept { return days_; }
  std::string to_string() const;

  Date plus_days(long long n) const {
    return Date(days_ + std::chrono::days(n));
  }

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

}  // namespace storyline
