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


#include "evaudit/pattern.hpp"

#include <memory>

namespace evaudit {
namespace {

constexpr std::size_t kMaxProgram = 50000;
constexpr int kMaxRepeat = 1000;

struct Node {
  enum class Kind { Empty, Set, Begin, End, Concat, Alt, Repeat };
  Kind kind = Kind::Empty;
  std::bitset<256> bytes;
  std::vector<Node> children;
  int min = 0;
  int max = 0;  // -1: unbounded
};

std::bitset<256> range(unsigned char lo, unsigned char hi) {
  std::bitset<256> s;
  for (unsigned c = lo; c <= hi; ++c) s.set(c);
  return s;
}

std::bitset<256> digit_set() { return range('0', '9'); }
std::bitset<256> word_set() { return range('a', 'z') | range('A', 'Z') | range('0', '9') | range('_', '_'); }
std::bitset<256> space_set() {
  std::bitset<256> s;
  for (char c : std::string_view(" \t\n\r\f\v")) s.set(static_cast<unsigned char>(c));
  return s;
}

}  // namespace

class PatternCompiler {
 public:
  explicit PatternCompiler(std::string_view src) : src_(src) {}

  Node parse() {
    Node n = alternation();
    if (pos_ != src_.size()) fail(src_[pos_] == ')' ? "unbalanced ')'" : "unexpected character");
    return n;
  }

  void emit(const Node& n, std::vector<Pattern::Inst>& prog) {
    if (prog.size() > kMaxProgram) throw PatternError(0, "pattern too large");
    using Op = Pattern::Op;
    switch (n.kind) {
      case Node::Kind::Empty:
        break;
      case Node::Kind::Set:
        prog.push_back({Op::Byte, n.bytes});
        break;
      case Node::Kind::Begin:
        prog.push_back({Op::AssertBegin});
        break;
      case Node::Kind::End:
        prog.push_back({Op::AssertEnd});
        break;
      case Node::Kind::Concat:
        for (const auto& c : n.children) emit(c, prog);
        break;
      case Node::Kind::Alt: {
        std::vector<std::size_t> jumps;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          if (i + 1 < n.children.size()) {
            std::size_t split = prog.size();
            prog.push_back({Op::Split});
            prog[split].x = static_cast<int>(prog.size());
            emit(n.children[i], prog);
            jumps.push_back(prog.size());
            prog.push_back({Op::Jump});
            prog[split].y = static_cast<int>(prog.size());
          } else {
            emit(n.children[i], prog);
          }
        }
        for (auto j : jumps) prog[j].x = static_cast<int>(prog.size());
        break;
      }
      case Node::Kind::Repeat: {
        const Node& body = n.children.front();
        for (int i = 0; i < n.min; ++i) emit(body, prog);
        if (n.max < 0) {
          std::size_t split = prog.size();
          prog.push_back({Op::Split});
          prog[split].x = static_cast<int>(prog.size());
          emit(body, prog);
          prog.push_back({Op::Jump, {}, static_cast<int>(split)});
          prog[split].y = static_cast<int>(prog.size());
        } else {
          std::vector<std::size_t> splits;
          for (int i = n.min; i < n.max; ++i) {
            splits.push_back(prog.size());
            prog.push_back({Op::Split});
            prog.back().x = static_cast<int>(prog.size());
            emit(body, prog);
          }
          for (auto s : splits) prog[s].y = static_cast<int>(prog.size());
        }
        break;
      }
    }
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw PatternError(pos_, "pattern offset " + std::to_string(pos_) + ": " + message);
  }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }

  Node alternation() {
    Node first = concatenation();
    if (at_end() || peek() != '|') return first;
    Node alt;
    alt.kind = Node::Kind::Alt;
    alt.children.push_back(std::move(first));
    while (!at_end() && peek() == '|') {
      ++pos_;
      alt.children.push_back(concatenation());
    }
    return alt;
  }

  Node concatenation() {
    Node seq;
    seq.kind = Node::Kind::Concat;
    while (!at_end() && peek() != '|' && peek() != ')') seq.children.push_back(repetition());
    if (seq.children.size() == 1) return std::move(seq.children.front());
    return seq;
  }

  int number() {
    std::size_t start = pos_;
    long value = 0;
    while (!at_end() && peek() >= '0' && peek() <= '9') {
      value = value * 10 + (peek() - '0');
      if (value > kMaxRepeat) fail("repetition bound too large");
      ++pos_;
    }
    if (pos_ == start) fail("expected a number");
    return static_cast<int>(value);
  }

  Node repetition() {
    Node atom_node = atom();
    while (!at_end()) {
      int lo = 0;
      int hi = 0;
      char c = peek();
      if (c == '*') {
        lo = 0, hi = -1, ++pos_;
      } else if (c == '+') {
        lo = 1, hi = -1, ++pos_;
      } else if (c == '?') {
        lo = 0, hi = 1, ++pos_;
      } else if (c == '{') {
        ++pos_;
        lo = number();
        hi = lo;
        if (!at_end() && peek() == ',') {
          ++pos_;
          hi = (!at_end() && peek() == '}') ? -1 : number();
        }
        if (at_end() || peek() != '}') fail("expected '}'");
        ++pos_;
        if (hi >= 0 && hi < lo) fail("repetition bounds out of order");
      } else {
        break;
      }
      if (atom_node.kind == Node::Kind::Begin || atom_node.kind == Node::Kind::End) fail("quantified anchor");
      if (!at_end() && peek() == '?') ++pos_;  // lazy suffix
      Node rep;
      rep.kind = Node::Kind::Repeat;
      rep.min = lo;
      rep.max = hi;
      rep.children.push_back(std::move(atom_node));
      atom_node = std::move(rep);
    }
    return atom_node;
  }

  Node set_node(std::bitset<256> bytes) {
    Node n;
    n.kind = Node::Kind::Set;
    n.bytes = bytes;
    return n;
  }

  // Escape body after the backslash.
  std::bitset<256> escape() {
    if (at_end()) fail("trailing backslash");
    char c = src_[pos_++];
    switch (c) {
      case 'd': return digit_set();
      case 'D': return ~digit_set();
      case 'w': return word_set();
      case 'W': return ~word_set();
      case 's': return space_set();
      case 'S': return ~space_set();
      case 'n': return range('\n', '\n');
      case 'r': return range('\r', '\r');
      case 't': return range('\t', '\t');
      default: break;
    }
    if (c >= '1' && c <= '9') {
      --pos_;
      fail("backreferences are not supported");
    }
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) {
      --pos_;
      fail(std::string("unsupported escape \\") + c);
    }
    return range(static_cast<unsigned char>(c), static_cast<unsigned char>(c));
  }

  Node atom() {
    char c = peek();
    switch (c) {
      case '(': {
        ++pos_;
        if (!at_end() && peek() == '?') {
          if (pos_ + 1 < src_.size() && src_[pos_ + 1] == ':') {
            pos_ += 2;
          } else {
            fail("lookaround and inline flags are not supported");
          }
        }
        Node inner = alternation();
        if (at_end() || peek() != ')') fail("missing ')'");
        ++pos_;
        return inner;
      }
      case '[':
        return bracket();
      case '.':
        ++pos_;
        return set_node(~range('\n', '\n'));
      case '^': {
        ++pos_;
        Node n;
        n.kind = Node::Kind::Begin;
        return n;
      }
      case '$': {
        ++pos_;
        Node n;
        n.kind = Node::Kind::End;
        return n;
      }
      case '\\':
        ++pos_;
        return set_node(escape());
      case '*':
      case '+':
      case '?':
      case '{':
        fail("quantifier without a target");
      default:
        ++pos_;
        return set_node(range(static_cast<unsigned char>(c), static_cast<unsigned char>(c)));
    }
  }

  Node bracket() {
    ++pos_;  // '['
    bool negate = false;
    if (!at_end() && peek() == '^') {
      negate = true;
      ++pos_;
    }
    std::bitset<256> set;
    bool first = true;
    while (true) {
      if (at_end()) fail("unterminated class");
      char c = peek();
      if (c == ']' && !first) {
        ++pos_;
        break;
      }
      first = false;
      std::bitset<256> item;
      int lo = -1;
      if (c == '\\') {
        ++pos_;
        std::size_t before = pos_;
        item = escape();
        if (item.count() == 1 && pos_ == before + 1) {
          for (int b = 0; b < 256; ++b)
            if (item.test(b)) lo = b;
        }
      } else {
        ++pos_;
        lo = static_cast<unsigned char>(c);
        item.set(lo);
      }
      if (lo >= 0 && pos_ + 1 < src_.size() && peek() == '-' && src_[pos_ + 1] != ']') {
        ++pos_;
        int hi;
        if (peek() == '\\') {
          ++pos_;
          auto h = escape();
          if (h.count() != 1) fail("class range with a class escape");
          hi = 0;
          for (int b = 0; b < 256; ++b)
            if (h.test(b)) hi = b;
        } else {
          hi = static_cast<unsigned char>(peek());
          ++pos_;
        }
        if (hi < lo) fail("class range out of order");
        item = range(static_cast<unsigned char>(lo), static_cast<unsigned char>(hi));
      }
      set |= item;
    }
    return set_node(negate ? ~set : set);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

Pattern Pattern::compile(std::string_view source) {
  PatternCompiler compiler(source);
  Node root = compiler.parse();
  Pattern p;
  p.source_ = std::string(source);
  compiler.emit(root, p.program_);
  p.program_.push_back({Op::Match});
  return p;
}

bool Pattern::search(std::string_view text) const {
  const std::size_t n = program_.size();
  std::vector<int> current;
  std::vector<int> next;
  std::vector<std::size_t> mark(n, static_cast<std::size_t>(-1));
  std::vector<int> stack;
  current.reserve(n);
  next.reserve(n);

  // Adds the epsilon closure of `pc` at text position `pos` to `list`.
  auto add = [&](std::vector<int>& list, int start, std::size_t pos, std::size_t generation) -> bool {
    stack.clear();
    stack.push_back(start);
    bool matched = false;
    while (!stack.empty()) {
      int pc = stack.back();
      stack.pop_back();
      if (mark[pc] == generation) continue;
      mark[pc] = generation;
      const Inst& inst = program_[pc];
      switch (inst.op) {
        case Op::Jump: stack.push_back(inst.x); break;
        case Op::Split:
          stack.push_back(inst.y);
          stack.push_back(inst.x);
          break;
        case Op::AssertBegin:
          if (pos == 0) stack.push_back(pc + 1);
          break;
        case Op::AssertEnd:
          if (pos == text.size()) stack.push_back(pc + 1);
          break;
        case Op::Match: matched = true; break;
        case Op::Byte: list.push_back(pc); break;
      }
    }
    return matched;
  };

  for (std::size_t pos = 0;; ++pos) {
    if (add(current, 0, pos, pos)) return true;
    if (pos == text.size()) return false;
    next.clear();
    auto byte = static_cast<unsigned char>(text[pos]);
    for (int pc : current) {
      if (program_[pc].bytes.test(byte) && add(next, pc + 1, pos + 1, pos + 1)) return true;
    }
    std::swap(current, next);
  }
}

}  // namespace evaudit
