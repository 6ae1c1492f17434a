// Copyright 2026 The evaudit Authors
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

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace evaudit {

/// Exact non-overflowing fraction over 64-bit integers, always stored in lowest
/// terms with a positive denominator. Comparison cross-multiplies in 128 bits,
/// so ordering never depends on rounding.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);

  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept;

  /// "13/82"; integers render as "n/1" so the form is uniform in output files.
  std::string to_string() const;

  /// Accepts "p/q", an integer, or a plain decimal such as "0.25" or "1.0".
  static Rational parse(std::string_view text);

  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Percentage with one decimal place, rounding half away from zero: 13/82 ->
/// "15.9%".
std::string percent_display(const Rational& value);

}  // namespace evaudit
