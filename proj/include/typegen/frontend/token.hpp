#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace typegen::py {

/// 1-based line, 0-based UTF-8 byte column (the convention of Python's ast).
struct Location {
  int line = 0;
  int column = 0;

  auto operator<=>(const Location&) const = default;
};

enum class TokenKind {
  Name,
  Number,
  String,
  Op,
  Newline,
  Indent,
  Dedent,
  EndMarker,
};

struct Token {
  TokenKind kind = TokenKind::EndMarker;
  std::string text;
  Location start;
  Location end;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_op(std::string_view t) const { return is(TokenKind::Op, t); }
  bool is_name(std::string_view t) const { return is(TokenKind::Name, t); }
};

/// Splits Python source into logical-line tokens with INDENT/DEDENT
/// bookkeeping. Blank and comment-only lines produce no tokens. Throws
/// SyntaxError on unterminated strings, bad indentation and stray characters.
std::vector<Token> tokenize(std::string_view source);

bool is_keyword(std::string_view word);

}  // namespace typegen::py
