#pragma once
// Label-regex AST and parser. Grammar, loosest to tightest:
//   alt    := cat ('|' cat)*
//   cat    := postfix ('.'? postfix)*        -- juxtaposition or '.'
//   postfix:= atom ('*' | '+' | '?')*
//   atom   := label | '(' alt? ')'           -- '()' is the empty word
// Labels are identifiers [A-Za-z_][A-Za-z0-9_]*; whitespace separates atoms.

#include <cctype>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace recap {

enum class RegexKind { Label, Concat, Alt, Star, Plus, Opt, Empty };

struct RegexNode;
using RegexAst = std::shared_ptr<const RegexNode>;

struct RegexNode {
  RegexKind kind;
  std::string label;      // Label only
  RegexAst left, right;   // children; unary ops use left
};

inline RegexAst rx_label(std::string name) {
  return std::make_shared<RegexNode>(RegexNode{RegexKind::Label, std::move(name), nullptr, nullptr});
}
inline RegexAst rx_concat(RegexAst a, RegexAst b) {
  return std::make_shared<RegexNode>(RegexNode{RegexKind::Concat, "", std::move(a), std::move(b)});
}
inline RegexAst rx_alt(RegexAst a, RegexAst b) {
  return std::make_shared<RegexNode>(RegexNode{RegexKind::Alt, "", std::move(a), std::move(b)});
}
inline RegexAst rx_star(RegexAst a) {
  return std::make_shared<RegexNode>(RegexNode{RegexKind::Star, "", std::move(a), nullptr});
}
inline RegexAst rx_plus(RegexAst a) {
  return std::make_shared<RegexNode>(RegexNode{RegexKind::Plus, "", std::move(a), nullptr});
}
inline RegexAst rx_opt(RegexAst a) {
  return std::make_shared<RegexNode>(RegexNode{RegexKind::Opt, "", std::move(a), nullptr});
}
inline RegexAst rx_empty() {
  return std::make_shared<RegexNode>(RegexNode{RegexKind::Empty, "", nullptr, nullptr});
}

struct RegexSyntaxError : std::runtime_error {
  std::size_t offset;
  RegexSyntaxError(const std::string& msg, std::size_t off)
      : std::runtime_error("regex syntax error at byte " + std::to_string(off) + ": " + msg),
        offset(off) {}
};

namespace detail {

class RegexParser {
 public:
  explicit RegexParser(std::string_view src) : src_(src) {}

  RegexAst parse() {
    skip_ws();
    if (at_end()) throw RegexSyntaxError("empty regex", 0);
    RegexAst ast = parse_alt();
    skip_ws();
    if (!at_end()) throw RegexSyntaxError("unexpected character", pos_);
    return ast;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool starts_atom() const {
    if (at_end()) return false;
    char c = peek();
    return c == '(' || c == '_' || std::isalpha(static_cast<unsigned char>(c));
  }

  RegexAst parse_alt() {
    RegexAst node = parse_cat();
    skip_ws();
    while (!at_end() && peek() == '|') {
      ++pos_;
      skip_ws();
      node = rx_alt(std::move(node), parse_cat());
      skip_ws();
    }
    return node;
  }

  RegexAst parse_cat() {
    skip_ws();
    RegexAst node = parse_postfix();
    for (;;) {
      skip_ws();
      if (!at_end() && peek() == '.') {
        ++pos_;
        skip_ws();
        node = rx_concat(std::move(node), parse_postfix());
      } else if (starts_atom()) {
        node = rx_concat(std::move(node), parse_postfix());
      } else {
        return node;
      }
    }
  }

  RegexAst parse_postfix() {
    RegexAst node = parse_atom();
    for (;;) {
      skip_ws();
      if (at_end()) return node;
      char c = peek();
      if (c == '*') node = rx_star(std::move(node));
      else if (c == '+') node = rx_plus(std::move(node));
      else if (c == '?') node = rx_opt(std::move(node));
      else return node;
      ++pos_;
    }
  }

  RegexAst parse_atom() {
    skip_ws();
    if (at_end()) throw RegexSyntaxError("expected label or '('", pos_);
    char c = peek();
    if (c == '(') {
      std::size_t open = pos_;
      ++pos_;
      skip_ws();
      if (!at_end() && peek() == ')') {
        ++pos_;
        return rx_empty();
      }
      RegexAst inner = parse_alt();
      skip_ws();
      if (at_end() || peek() != ')')
        throw RegexSyntaxError("unclosed '('", open);
      ++pos_;
      return inner;
    }
    if (c == '_' || std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (!at_end() && (peek() == '_' || std::isalnum(static_cast<unsigned char>(peek()))))
        ++pos_;
      return rx_label(std::string(src_.substr(start, pos_ - start)));
    }
    throw RegexSyntaxError("expected label or '('", pos_);
  }
};

}  // namespace detail

inline RegexAst parse_regex(std::string_view src) {
  return detail::RegexParser(src).parse();
}

}  // namespace recap
