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

// Field accessors that turn schema problems into field-named errors.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "evaudit/error.hpp"
#include "evaudit/model.hpp"

namespace evaudit::detail {

class FieldReader {
 public:
  FieldReader(const Json& object, ErrorCode code, std::string prefix = {})
      : object_(object), code_(code), prefix_(std::move(prefix)) {
    if (!object_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(std::string_view field, const std::string& message) const {
    std::string name = prefix_.empty() ? std::string(field)
                                       : (field.empty() ? prefix_ : prefix_ + "." + std::string(field));
    throw Error(code_, name, (name.empty() ? std::string("document") : name) + ": " + message);
  }

  bool has(std::string_view field) const { return object_.contains(field) && !object_.at(std::string(field)).is_null(); }

  const Json& at(std::string_view field) const {
    auto it = object_.find(field);
    if (it == object_.end()) fail(field, "missing field");
    return *it;
  }

  std::string string(std::string_view field) const {
    const Json& v = at(field);
    if (!v.is_string()) fail(field, "expected a string");
    return v.get<std::string>();
  }

  std::string string_or(std::string_view field, std::string fallback) const {
    return has(field) ? string(field) : std::move(fallback);
  }

  std::int64_t integer(std::string_view field) const {
    const Json& v = at(field);
    if (!v.is_number_integer()) fail(field, "expected an integer");
    return v.get<std::int64_t>();
  }

  bool boolean(std::string_view field) const {
    const Json& v = at(field);
    if (!v.is_boolean()) fail(field, "expected a boolean");
    return v.get<bool>();
  }

  const Json& array(std::string_view field) const {
    const Json& v = at(field);
    if (!v.is_array()) fail(field, "expected an array");
    return v;
  }

  const Json& object(std::string_view field) const {
    const Json& v = at(field);
    if (!v.is_object()) fail(field, "expected an object");
    return v;
  }

  template <typename E>
  E token(std::string_view field) const {
    std::string text = string(field);
    if (auto v = parse_token<E>(text)) return *v;
    fail(field, "unknown " + std::string(EnumTokens<E>::name) + " token '" + text + "'");
  }

  FieldReader nested(std::string_view field) const {
    return FieldReader(object(field), code_, prefix_.empty() ? std::string(field) : prefix_ + "." + std::string(field));
  }

  FieldReader element(const Json& value, std::string_view field, std::size_t index) const {
    std::string name = (prefix_.empty() ? std::string(field) : prefix_ + "." + std::string(field)) + "[" +
                       std::to_string(index) + "]";
    if (!value.is_object()) throw Error(code_, name, name + ": expected an object");
    return FieldReader(value, code_, name);
  }

  const Json& json() const noexcept { return object_; }

 private:
  const Json& object_;
  ErrorCode code_;
  std::string prefix_;
};

}  // namespace evaudit::detail
