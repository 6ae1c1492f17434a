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

#include <stdexcept>
#include <string>
#include <string_view>

namespace evaudit {

enum class ErrorCode {
  InvalidRecord,
  ParseError,
  DuplicateId,
  DanglingBundle,
  BenchmarkMismatch,
  InvalidManifest,
  SyntaxError,
  UndeclaredRole,
  HierarchyViolation,
  InvalidChecklist,
  InsufficientReviewers,
  LockConflict,
  LockInvalid,
  ChecklistInconsistent,
  MalformedArtifact,
  MissingLabel,
  NoDecidableRecords,
  EmptyCell,
  InvalidEntry,
  UnknownRecord,
  ConflictingEntries,
  LedgerChainBroken,
  InvalidConfig,
  Io,
};

std::string_view error_code_name(ErrorCode code) noexcept;

// All library failures surface as this exception. `subject` names the record,
// case, field or line the failure is about, so callers can report it without
// parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string subject, const std::string& message)
      : std::runtime_error(message), code_(code), subject_(std::move(subject)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

// Parse failures carry a position: a 1-based line for line-delimited files, a
// 0-based byte offset for predicate text.
class PositionedError : public Error {
 public:
  PositionedError(ErrorCode code, std::size_t position, std::string subject,
                  const std::string& message)
      : Error(code, std::move(subject), message), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace evaudit
