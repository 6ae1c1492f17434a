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


#include "evaudit/predicate.hpp"

#include <array>
#include <charconv>
#include <optional>

#include "evaudit/error.hpp"
#include "evaudit/pattern.hpp"

namespace evaudit {

std::string_view atom_name(AtomKind kind) noexcept {
  switch (kind) {
    case AtomKind::Exists: return "exists";
    case AtomKind::ValueEq: return "value_eq";
    case AtomKind::ValueHas: return "value_has";
    case AtomKind::TextMatches: return "text_matches";
    case AtomKind::ToolCalled: return "tool_called";
    case AtomKind::CountGe: return "count_ge";
  }
  return "?";
}

Predicate Predicate::make_atom(evaudit::Atom a) {
  Predicate p;
  p.op = Op::Atom;
  p.atom = std::move(a);
  return p;
}

Predicate Predicate::make_not(Predicate child) {
  Predicate p;
  p.op = Op::Not;
  p.children.push_back(std::move(child));
  return p;
}

Predicate Predicate::make_and(std::vector<Predicate> children) {
  Predicate p;
  p.op = Op::And;
  p.children = std::move(children);
  return p;
}

Predicate Predicate::make_or(std::vector<Predicate> children) {
  Predicate p;
  p.op = Op::Or;
  p.children = std::move(children);
  return p;
}

bool is_valid_json_pointer(std::string_view pointer) noexcept {
  if (pointer.empty()) return true;
  if (pointer.front() != '/') return false;
  for (std::size_t i = 0; i < pointer.size(); ++i) {
    if (pointer[i] == '~') {
      if (i + 1 >= pointer.size() || (pointer[i + 1] != '0' && pointer[i + 1] != '1')) return false;
    }
  }
  return true;
}

namespace {

constexpr std::array<std::string_view, 6> kReserved = {"and", "or", "not", "true", "false", "null"};

bool is_reserved(std::string_view name) {
  for (auto r : kReserved) {
    if (r == name) return true;
  }
  return false;
}

bool is_name_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_name_char(char c) { return is_name_start(c) || (c >= '0' && c <= '9') || c == '.'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

struct Token {
  enum class Kind { Name, String, Integer, Decimal, LParen, RParen, Comma, End };
  Kind kind = Kind::End;
  std::string text;  // name, decoded string, or numeric token
  std::size_t offset = 0;
};

std::string_view describe(Token::Kind kind) {
  switch (kind) {
    case Token::Kind::Name: return "name";
    case Token::Kind::String: return "string";
    case Token::Kind::Integer: return "integer";
    case Token::Kind::Decimal: return "decimal";
    case Token::Kind::LParen: return "'('";
    case Token::Kind::RParen: return "')'";
    case Token::Kind::Comma: return "','";
    case Token::Kind::End: return "end of input";
  }
  return "?";
}

[[noreturn]] void syntax_error(std::size_t offset, std::string_view expected) {
  throw PositionedError(ErrorCode::SyntaxError, offset, std::string(expected),
                        "syntax error at offset " + std::to_string(offset) + ": expected " + std::string(expected));
}

void append_utf8(std::string& out, unsigned cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r')) {
      ++pos_;
    }
    Token t;
    t.offset = pos_;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (c == '(') return single(t, Token::Kind::LParen);
    if (c == ')') return single(t, Token::Kind::RParen);
    if (c == ',') return single(t, Token::Kind::Comma);
    if (c == '"') return string(t);
    if (is_digit(c) || (c == '-' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) return number(t);
    if (is_name_start(c)) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && is_name_char(src_[pos_])) ++pos_;
      t.kind = Token::Kind::Name;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    syntax_error(pos_, "expression");
  }

 private:
  Token single(Token& t, Token::Kind kind) {
    t.kind = kind;
    ++pos_;
    return t;
  }

  Token number(Token& t) {
    std::size_t start = pos_;
    if (src_[pos_] == '-') ++pos_;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    t.kind = Token::Kind::Integer;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      if (pos_ >= src_.size() || !is_digit(src_[pos_])) syntax_error(pos_, "digit after decimal point");
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      t.kind = Token::Kind::Decimal;
    }
    if (pos_ < src_.size() && is_name_start(src_[pos_])) syntax_error(pos_, "delimiter after number");
    t.text = std::string(src_.substr(start, pos_ - start));
    return t;
  }

  Token string(Token& t) {
    ++pos_;
    t.kind = Token::Kind::String;
    while (true) {
      if (pos_ >= src_.size()) syntax_error(pos_, "closing '\"'");
      char c = src_[pos_++];
      if (c == '"') return t;
      if (static_cast<unsigned char>(c) < 0x20) syntax_error(pos_ - 1, "escaped control character");
      if (c != '\\') {
        t.text.push_back(c);
        continue;
      }
      if (pos_ >= src_.size()) syntax_error(pos_, "escape character");
      char e = src_[pos_++];
      switch (e) {
        case '"': t.text.push_back('"'); break;
        case '\\': t.text.push_back('\\'); break;
        case '/': t.text.push_back('/'); break;
        case 'n': t.text.push_back('\n'); break;
        case 't': t.text.push_back('\t'); break;
        case 'r': t.text.push_back('\r'); break;
        case 'u': {
          if (pos_ + 4 > src_.size()) syntax_error(pos_, "four hex digits");
          unsigned cp = 0;
          auto [p, ec] = std::from_chars(src_.data() + pos_, src_.data() + pos_ + 4, cp, 16);
          if (ec != std::errc() || p != src_.data() + pos_ + 4) syntax_error(pos_, "four hex digits");
          pos_ += 4;
          append_utf8(t.text, cp);
          break;
        }
        default: syntax_error(pos_ - 1, "valid escape (\\\" \\\\ \\/ \\n \\t \\r \\uXXXX)");
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { advance(); }

  Predicate parse() {
    Predicate p = or_expr();
    if (tok_.kind != Token::Kind::End) syntax_error(tok_.offset, "'and', 'or' or end of input");
    return p;
  }

 private:
  void advance() { tok_ = lexer_.next(); }

  bool keyword(std::string_view word) const { return tok_.kind == Token::Kind::Name && tok_.text == word; }

  void expect(Token::Kind kind) {
    if (tok_.kind != kind) syntax_error(tok_.offset, describe(kind));
    advance();
  }

  Predicate or_expr() {
    std::vector<Predicate> items;
    items.push_back(and_expr());
    while (keyword("or")) {
      advance();
      items.push_back(and_expr());
    }
    if (items.size() == 1) return std::move(items.front());
    return Predicate::make_or(std::move(items));
  }

  Predicate and_expr() {
    std::vector<Predicate> items;
    items.push_back(unary());
    while (keyword("and")) {
      advance();
      items.push_back(unary());
    }
    if (items.size() == 1) return std::move(items.front());
    return Predicate::make_and(std::move(items));
  }

  Predicate unary() {
    if (keyword("not")) {
      advance();
      return Predicate::make_not(unary());
    }
    if (tok_.kind == Token::Kind::LParen) {
      advance();
      Predicate inner = or_expr();
      expect(Token::Kind::RParen);
      return inner;
    }
    return atom();
  }

  Predicate atom() {
    if (tok_.kind != Token::Kind::Name || is_reserved(tok_.text)) syntax_error(tok_.offset, "atom, 'not' or '('");
    std::size_t name_offset = tok_.offset;
    std::optional<AtomKind> kind;
    for (auto k : {AtomKind::Exists, AtomKind::ValueEq, AtomKind::ValueHas, AtomKind::TextMatches,
                   AtomKind::ToolCalled, AtomKind::CountGe}) {
      if (atom_name(k) == tok_.text) kind = k;
    }
    if (!kind) syntax_error(name_offset, "atom name (exists, value_eq, value_has, text_matches, tool_called, count_ge)");
    advance();
    expect(Token::Kind::LParen);
    std::vector<Token> args;
    args.push_back(arg());
    while (tok_.kind == Token::Kind::Comma) {
      advance();
      args.push_back(arg());
    }
    std::size_t close_offset = tok_.offset;
    expect(Token::Kind::RParen);
    return Predicate::make_atom(build(*kind, args, close_offset));
  }

  Token arg() {
    switch (tok_.kind) {
      case Token::Kind::Name:
        if (tok_.text == "and" || tok_.text == "or" || tok_.text == "not") break;
        [[fallthrough]];
      case Token::Kind::String:
      case Token::Kind::Integer:
      case Token::Kind::Decimal: {
        Token t = tok_;
        advance();
        return t;
      }
      default:
        break;
    }
    syntax_error(tok_.offset, "argument (string, number or name)");
  }

  static std::string role_arg(const Token& t) {
    if (t.kind == Token::Kind::String && !t.text.empty()) return t.text;
    if (t.kind == Token::Kind::Name && !is_reserved(t.text)) return t.text;
    syntax_error(t.offset, "role (name or non-empty string)");
  }

  static std::string pointer_arg(const Token& t) {
    if (t.kind != Token::Kind::String) syntax_error(t.offset, "JSON pointer string");
    if (!is_valid_json_pointer(t.text)) syntax_error(t.offset, "well-formed JSON pointer");
    return t.text;
  }

  static std::string string_arg(const Token& t, std::string_view what) {
    if (t.kind != Token::Kind::String) syntax_error(t.offset, what);
    return t.text;
  }

  static Literal literal_arg(const Token& t) {
    switch (t.kind) {
      case Token::Kind::String: return t.text;
      case Token::Kind::Decimal: return DecimalToken{t.text};
      case Token::Kind::Integer: {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || p != t.text.data() + t.text.size()) syntax_error(t.offset, "64-bit integer");
        return v;
      }
      case Token::Kind::Name:
        if (t.text == "true") return true;
        if (t.text == "false") return false;
        if (t.text == "null") return NullLiteral{};
        break;
      default:
        break;
    }
    syntax_error(t.offset, "literal (string, integer, decimal, true, false, null)");
  }

  static Atom build(AtomKind kind, const std::vector<Token>& args, std::size_t close_offset) {
    auto arity = [&](std::size_t n) {
      if (args.size() != n) {
        syntax_error(args.size() > n ? args[n].offset : close_offset,
                     std::string(atom_name(kind)) + " with " + std::to_string(n) + " arguments");
      }
    };
    Atom a;
    a.kind = kind;
    switch (kind) {
      case AtomKind::Exists:
        arity(1);
        a.role = role_arg(args[0]);
        break;
      case AtomKind::ValueEq:
        arity(3);
        a.role = role_arg(args[0]);
        a.pointer = pointer_arg(args[1]);
        a.literal = literal_arg(args[2]);
        break;
      case AtomKind::ValueHas:
        arity(2);
        a.role = role_arg(args[0]);
        a.pointer = pointer_arg(args[1]);
        break;
      case AtomKind::TextMatches:
        arity(2);
        a.role = role_arg(args[0]);
        a.text = string_arg(args[1], "pattern string");
        try {
          Pattern::compile(a.text);
        } catch (const PatternError& e) {
          syntax_error(args[1].offset, std::string("valid pattern (") + e.what() + ")");
        }
        break;
      case AtomKind::ToolCalled:
        if (args.size() != 2 && args.size() != 4) {
          syntax_error(args.size() > 4 ? args[4].offset : close_offset, "tool_called with 2 or 4 arguments");
        }
        a.role = role_arg(args[0]);
        a.text = string_arg(args[1], "tool name string");
        if (args.size() == 4) {
          a.has_argument_check = true;
          a.pointer = pointer_arg(args[2]);
          a.literal = literal_arg(args[3]);
        }
        break;
      case AtomKind::CountGe:
        arity(3);
        a.role = role_arg(args[0]);
        a.pointer = pointer_arg(args[1]);
        if (args[2].kind != Token::Kind::Integer || args[2].text.front() == '-') {
          syntax_error(args[2].offset, "non-negative integer threshold");
        }
        a.threshold = std::get<std::int64_t>(literal_arg(args[2]));
        break;
    }
    return a;
  }

  Lexer lexer_;
  Token tok_;
};

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          static constexpr char kHex[] = "0123456789abcdef";
          out += "\\u00";
          out.push_back(kHex[(c >> 4) & 0xF]);
          out.push_back(kHex[c & 0xF]);
        } else {
          out.push_back(c);
        }
    }
  }
  out += '"';
  return out;
}

std::string role_text(const std::string& role) {
  bool plain = !role.empty() && is_name_start(role.front()) && !is_reserved(role);
  for (char c : role) plain = plain && is_name_char(c);
  return plain ? role : quote(role);
}

std::string atom_text(const Atom& a) {
  std::string out(atom_name(a.kind));
  out += "(" + role_text(a.role);
  switch (a.kind) {
    case AtomKind::Exists: break;
    case AtomKind::ValueEq: out += ", " + quote(a.pointer) + ", " + to_string(a.literal); break;
    case AtomKind::ValueHas: out += ", " + quote(a.pointer); break;
    case AtomKind::TextMatches: out += ", " + quote(a.text); break;
    case AtomKind::ToolCalled:
      out += ", " + quote(a.text);
      if (a.has_argument_check) out += ", " + quote(a.pointer) + ", " + to_string(a.literal);
      break;
    case AtomKind::CountGe: out += ", " + quote(a.pointer) + ", " + std::to_string(a.threshold); break;
  }
  return out + ")";
}

void collect(const Predicate& p, std::vector<const Atom*>& out) {
  if (p.op == Predicate::Op::Atom) {
    out.push_back(&p.atom);
    return;
  }
  for (const auto& c : p.children) collect(c, out);
}

std::string print(const Predicate& p, Predicate::Op parent) {
  using Op = Predicate::Op;
  switch (p.op) {
    case Op::Atom: return atom_text(p.atom);
    case Op::Not: {
      const Predicate& child = p.children.front();
      bool wrap = child.op == Op::And || child.op == Op::Or;
      std::string inner = print(child, Op::Not);
      return "not " + (wrap ? "(" + inner + ")" : inner);
    }
    case Op::And:
    case Op::Or: {
      std::string sep = p.op == Op::And ? " and " : " or ";
      std::string out;
      for (std::size_t i = 0; i < p.children.size(); ++i) {
        if (i) out += sep;
        out += print(p.children[i], p.op);
      }
      bool wrap = parent == Op::And || parent == Op::Or;
      if (parent == Op::Or && p.op == Op::And) wrap = false;
      return wrap ? "(" + out + ")" : out;
    }
  }
  return {};
}

}  // namespace

Predicate parse_predicate(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Literal& literal) {
  struct Visitor {
    std::string operator()(NullLiteral) const { return "null"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const DecimalToken& d) const { return d.text; }
    std::string operator()(const std::string& s) const { return quote(s); }
  };
  return std::visit(Visitor{}, literal);
}

std::string to_string(const Predicate& predicate) { return print(predicate, Predicate::Op::Atom); }

std::vector<const Atom*> collect_atoms(const Predicate& predicate) {
  std::vector<const Atom*> out;
  collect(predicate, out);
  return out;
}

}  // namespace evaudit
