#pragma once

// Recursive-descent parser for CDL text.
//
//   document  := (statement (";" | "\n"))*      trailing separator optional
//   statement := IDENT "(" arglist? ")"
//   arglist   := arg ("," arg)*
//   arg       := IDENT | NUMBER | statement
//   IDENT     := [A-Za-z][A-Za-z0-9_]*
//   NUMBER    := [+-]?[0-9]+("."[0-9]+)?
//
// Spaces, tabs and CR are skipped between tokens; a newline separates
// statements at top level and is plain whitespace inside parentheses.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdio>
#include <string>
#include <string_view>

#include "geokit/cdl/ast.hpp"
#include "geokit/error.hpp"

namespace geokit::cdl {

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::string expected, std::string found,
             std::size_t statement_offset = 0)
      : Error("offset " + std::to_string(offset) + ": expected " + expected +
              ", found " + found),
        offset_(offset),
        statement_offset_(std::min(statement_offset, offset)),
        expected_(std::move(expected)),
        found_(std::move(found)) {}

  std::size_t offset() const { return offset_; }
  /// Start of the top-level statement being parsed when the error occurred.
  std::size_t statement_offset() const { return statement_offset_; }
  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::size_t offset_;
  std::size_t statement_offset_;
  std::string expected_;
  std::string found_;
};

struct SourceLocation {
  std::size_t line = 1;
  std::size_t column = 1;
};

/// 1-based line/column of a byte offset.
inline SourceLocation locate(std::string_view text, std::size_t offset) {
  SourceLocation loc;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++loc.line;
      loc.column = 1;
    } else {
      ++loc.column;
    }
  }
  return loc;
}

/// Maximum statement nesting accepted before the parser gives up.
inline constexpr int kMaxNestingDepth = 256;

namespace detail {

inline bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0;
}
inline bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}
inline bool is_digit(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Document parse_document(Role role) {
    Document doc;
    doc.role = role;
    for (;;) {
      skip_separators();
      if (at_end()) break;
      stmt_start_ = pos_;
      doc.statements.push_back(parse_statement(0));
      skip_inline_ws();
      if (at_end()) break;
      if (peek() != ';' && peek() != '\n') fail("';' or newline");
    }
    return doc;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  std::string describe_current() const {
    if (at_end()) return "end of input";
    const auto c = static_cast<unsigned char>(peek());
    if (c == '\n') return "newline";
    if (std::isprint(c)) return std::string("'") + static_cast<char>(c) + "'";
    char buf[8];
    std::snprintf(buf, sizeof buf, "0x%02X", c);
    return buf;
  }

  [[noreturn]] void fail(std::string expected) const {
    throw ParseError(pos_, std::move(expected), describe_current(), stmt_start_);
  }

  void skip_inline_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }
  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r' ||
                         peek() == '\n')) {
      ++pos_;
    }
  }
  void skip_separators() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r' ||
                         peek() == '\n' || peek() == ';')) {
      ++pos_;
    }
  }

  std::string parse_identifier() {
    if (at_end() || !is_ident_start(peek())) fail("identifier");
    const std::size_t start = pos_;
    while (!at_end() && is_ident_char(peek())) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string parse_number() {
    const std::size_t start = pos_;
    if (peek() == '+' || peek() == '-') ++pos_;
    if (at_end() || !is_digit(peek())) fail("digit");
    while (!at_end() && is_digit(peek())) ++pos_;
    if (!at_end() && peek() == '.') {
      ++pos_;
      if (at_end() || !is_digit(peek())) fail("digit after '.'");
      while (!at_end() && is_digit(peek())) ++pos_;
    }
    if (!at_end() && is_ident_char(peek())) fail("',' or ')'");
    return std::string(text_.substr(start, pos_ - start));
  }

  Statement parse_statement(int depth) {
    if (depth >= kMaxNestingDepth) fail("shallower nesting");
    Statement s;
    s.predicate = parse_identifier();
    skip_ws();
    if (at_end() || peek() != '(') fail("'('");
    ++pos_;
    parse_arglist(s, depth);
    return s;
  }

  // Called just after '('; consumes through the matching ')'.
  void parse_arglist(Statement& s, int depth) {
    skip_ws();
    if (!at_end() && peek() == ')') {
      ++pos_;
      return;
    }
    for (;;) {
      skip_ws();
      s.args.push_back(parse_arg(depth));
      skip_ws();
      if (at_end()) fail("',' or ')'");
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == ')') {
        ++pos_;
        return;
      }
      fail("',' or ')'");
    }
  }

  Arg parse_arg(int depth) {
    if (at_end()) fail("argument");
    const char c = peek();
    if (is_ident_start(c)) {
      std::string name = parse_identifier();
      skip_ws();
      if (!at_end() && peek() == '(') {
        if (depth + 1 >= kMaxNestingDepth) fail("shallower nesting");
        ++pos_;
        Statement inner;
        inner.predicate = std::move(name);
        parse_arglist(inner, depth + 1);
        return Arg::nested(std::move(inner));
      }
      return Arg::identifier(std::move(name));
    }
    if (is_digit(c) || c == '+' || c == '-') return Arg::number(parse_number());
    fail("argument");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t stmt_start_ = 0;
};

}  // namespace detail

/// Parses CDL text into a non-canonical document. Throws ParseError.
inline Document parse_cdl(std::string_view text, Role role) {
  return detail::Parser(text).parse_document(role);
}

}  // namespace geokit::cdl
