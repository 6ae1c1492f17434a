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

#include <filesystem>
#include <string>
#include <string_view>

#include "evaudit/model.hpp"

namespace evaudit {

/// Lower-case hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// Canonical bytes of a JSON value: sorted keys, no insignificant whitespace,
/// UTF-8.
std::string canonical_json(const Json& value);

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames, so readers never see a
/// half-written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// UTC, second precision: 2026-10-18T09:30:00Z.
std::string utc_timestamp_now();

}  // namespace evaudit
