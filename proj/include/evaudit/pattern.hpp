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

#include <bitset>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evaudit {

class PatternError : public std::invalid_argument {
 public:
  PatternError(std::size_t offset, const std::string& message)
      : std::invalid_argument(message), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Byte-oriented regular expressions over a small portable dialect:
/// literals, `.`, bracket classes with ranges and negation, the escapes
/// \d \D \w \W \s \S \n \r \t, anchors ^ and $, groups `( )` and `(?: )`,
/// alternation, and the quantifiers * + ? {m} {m,} {m,n} (lazy suffix `?`
/// accepted, meaningless for a yes/no search). Backreferences and lookaround
/// are rejected. Matching is a Thompson-NFA simulation, linear in the text.
class Pattern {
 public:
  static Pattern compile(std::string_view source);

  /// True iff the pattern matches some substring of `text`.
  bool search(std::string_view text) const;

  const std::string& source() const noexcept { return source_; }

 private:
  enum class Op { Byte, Split, Jump, AssertBegin, AssertEnd, Match };
  struct Inst {
    Op op;
    std::bitset<256> bytes;
    int x = 0;
    int y = 0;
  };

  friend class PatternCompiler;

  std::string source_;
  std::vector<Inst> program_;
};

}  // namespace evaudit
