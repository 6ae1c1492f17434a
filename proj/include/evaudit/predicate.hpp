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

// The checklist predicate language.
//
//   expr    := or_expr
//   or_expr := and_expr {"or" and_expr}
//   and_expr:= unary {"and" unary}
//   unary   := "not" unary | "(" expr ")" | atom
//   atom    := name "(" arg {"," arg} ")"
//   arg     := string | integer | decimal | name
//
// Atoms: exists(role), value_eq(role, pointer, literal), value_has(role,
// pointer), text_matches(role, pattern), tool_called(role, tool) or
// tool_called(role, tool, pointer, literal), count_ge(role, pointer, n).
// Roles are names or strings; pointers are JSON pointers given as strings;
// literals are strings, integers, decimals, true, false or null.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace evaudit {

struct NullLiteral {
  friend bool operator==(NullLiteral, NullLiteral) = default;
};

/// Decimal literal kept as its source token; equality is token equality.
struct DecimalToken {
  std::string text;
  friend bool operator==(const DecimalToken&, const DecimalToken&) = default;
};

using Literal = std::variant<NullLiteral, bool, std::int64_t, DecimalToken, std::string>;

enum class AtomKind { Exists, ValueEq, ValueHas, TextMatches, ToolCalled, CountGe };

std::string_view atom_name(AtomKind kind) noexcept;

struct Atom {
  AtomKind kind = AtomKind::Exists;
  std::string role;
  std::string pointer;    // value_eq, value_has, count_ge; tool_called argument pointer
  std::string text;       // text_matches pattern, tool_called tool name
  Literal literal;        // value_eq, tool_called with argument check
  bool has_argument_check = false;  // tool_called/4
  std::int64_t threshold = 0;       // count_ge

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Predicate {
  enum class Op { And, Or, Not, Atom };

  Op op = Op::Atom;
  std::vector<Predicate> children;
  evaudit::Atom atom;

  static Predicate make_atom(evaudit::Atom a);
  static Predicate make_not(Predicate child);
  static Predicate make_and(std::vector<Predicate> children);
  static Predicate make_or(std::vector<Predicate> children);

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

/// Throws PositionedError(SyntaxError) with the byte offset and what was
/// expected there.
Predicate parse_predicate(std::string_view text);

/// Canonical text: single spaces, minimal parentheses. A nested connective of
/// either kind under and/or is parenthesised unless it is an `and` under an
/// `or`, so parse(print(p)) == p for every well-formed tree.
std::string to_string(const Predicate& predicate);
std::string to_string(const Literal& literal);

/// Atoms in pre-order; their position in this list is the atom index used in
/// evaluation reports.
std::vector<const Atom*> collect_atoms(const Predicate& predicate);

bool is_valid_json_pointer(std::string_view pointer) noexcept;

}  // namespace evaudit
