#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "typegen/error.hpp"
#include "typegen/frontend/token.hpp"

namespace typegen::py {
namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False",  "None",     "True",     "and",    "as",     "assert", "async",
    "await",  "break",    "class",    "continue", "def",  "del",    "elif",
    "else",   "except",   "finally",  "for",    "from",   "global", "if",
    "import", "in",       "is",       "lambda", "nonlocal", "not",  "or",
    "pass",   "raise",    "return",   "try",    "while",  "with",   "yield"};

// Longest first so that a greedy scan picks "**=" before "**" before "*".
constexpr std::array<std::string_view, 47> kOperators = {
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "==", "!=", "<=", ">=",
    "**",  "//",  "<<",  ">>",  "+=",  "-=", "*=", "/=", "%=", "&=", "|=",
    "^=",  "@=",  "+",   "-",   "*",   "/",  "%",  "@",  "&",  "|",  "^",
    "~",   "<",   ">",   "(",   ")",   "[",  "]",  "{",  "}",  ",",  ":",
    ".",   ";",   "="};

bool is_ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c >= 0x80;
}
bool is_ident_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    indents_.push_back(0);
    while (pos_ < src_.size()) {
      if (at_line_start_ && depth_ == 0) {
        if (!handle_indentation()) continue;
      }
      scan_token();
    }
    if (line_has_tokens_) emit(TokenKind::Newline, "", here(), here());
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokenKind::Dedent, "", here(), here());
    }
    emit(TokenKind::EndMarker, "", here(), here());
    return std::move(tokens_);
  }

 private:
  Location here() const { return {line_, static_cast<int>(pos_ - line_begin_)}; }

  void emit(TokenKind kind, std::string text, Location start, Location end) {
    tokens_.push_back(Token{kind, std::move(text), start, end});
  }

  [[noreturn]] void fail(const std::string& msg, Location at) const {
    throw SyntaxError(msg, at.line, at.column);
  }

  void newline_advance() {
    ++pos_;
    ++line_;
    line_begin_ = pos_;
  }

  // Measures leading whitespace of a physical line. Returns false when the
  // line is blank or comment-only (it has been consumed entirely).
  bool handle_indentation() {
    int width = 0;
    size_t p = pos_;
    while (p < src_.size()) {
      char c = src_[p];
      if (c == ' ') {
        ++width;
      } else if (c == '\t') {
        width = (width / 8 + 1) * 8;
      } else if (c == '\f') {
        width = 0;
      } else {
        break;
      }
      ++p;
    }
    if (p >= src_.size()) {
      pos_ = p;
      return false;
    }
    char c = src_[p];
    if (c == '#' || c == '\n' || c == '\r') {
      pos_ = p;
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      if (pos_ < src_.size()) newline_advance();
      return false;
    }
    if (c == '\\' && p + 1 < src_.size() &&
        (src_[p + 1] == '\n' || src_[p + 1] == '\r')) {
      // Continuation on an otherwise empty line; treat as blank.
      pos_ = p + 1;
      if (src_[pos_] == '\r') ++pos_;
      if (pos_ < src_.size() && src_[pos_] == '\n') newline_advance();
      return false;
    }
    pos_ = p;
    at_line_start_ = false;
    Location loc = here();
    if (width > indents_.back()) {
      indents_.push_back(width);
      emit(TokenKind::Indent, "", {loc.line, 0}, loc);
    } else {
      while (width < indents_.back()) {
        indents_.pop_back();
        emit(TokenKind::Dedent, "", loc, loc);
      }
      if (width != indents_.back()) {
        fail("unindent does not match any outer indentation level", loc);
      }
    }
    return true;
  }

  void scan_token() {
    char c = src_[pos_];
    if (c == ' ' || c == '\t' || c == '\f') {
      ++pos_;
      return;
    }
    if (c == '\r') {
      ++pos_;
      return;
    }
    if (c == '#') {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      return;
    }
    if (c == '\n') {
      if (depth_ == 0 && line_has_tokens_) {
        Location loc = here();
        emit(TokenKind::Newline, "\n", loc, {loc.line, loc.column + 1});
        line_has_tokens_ = false;
      }
      newline_advance();
      if (depth_ == 0) at_line_start_ = true;
      return;
    }
    if (c == '\\') {
      size_t p = pos_ + 1;
      if (p < src_.size() && src_[p] == '\r') ++p;
      if (p < src_.size() && src_[p] == '\n') {
        pos_ = p;
        newline_advance();
        return;
      }
      if (p >= src_.size()) {
        pos_ = p;
        return;
      }
      fail("unexpected character after line continuation character", here());
    }
    line_has_tokens_ = true;
    unsigned char uc = static_cast<unsigned char>(c);
    if (is_ident_start(uc)) {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             is_ident_char(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
      }
      // String prefix?
      if (pos_ < src_.size() && (src_[pos_] == '\'' || src_[pos_] == '"') &&
          is_string_prefix(src_.substr(start, pos_ - start))) {
        pos_ = start;
        scan_string();
        return;
      }
      Location s{line_, static_cast<int>(start - line_begin_)};
      emit(TokenKind::Name, std::string(src_.substr(start, pos_ - start)), s,
           here());
      return;
    }
    if (std::isdigit(uc) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      scan_number();
      return;
    }
    if (c == '\'' || c == '"') {
      scan_string();
      return;
    }
    for (std::string_view op : kOperators) {
      if (src_.substr(pos_, op.size()) == op) {
        Location s = here();
        pos_ += op.size();
        if (op == "(" || op == "[" || op == "{") {
          ++depth_;
        } else if (op == ")" || op == "]" || op == "}") {
          if (depth_ == 0) fail("unmatched '" + std::string(op) + "'", s);
          --depth_;
        }
        emit(TokenKind::Op, std::string(op), s, here());
        return;
      }
    }
    fail(std::string("invalid character '") + c + "'", here());
  }

  static bool is_string_prefix(std::string_view p) {
    if (p.size() > 2) return false;
    std::string lower;
    for (char ch : p) lower += static_cast<char>(std::tolower(ch));
    static constexpr std::array<std::string_view, 11> kPrefixes = {
        "r", "u", "b", "f", "br", "rb", "fr", "rf", "R", "B", "F"};
    return std::find(kPrefixes.begin(), kPrefixes.end(), lower) !=
           kPrefixes.end();
  }

  // pos_ is at the start of the (possibly empty) prefix.
  void scan_string() {
    size_t q = pos_;
    while (q < src_.size() && src_[q] != '\'' && src_[q] != '"') ++q;
    Location start = here();
    size_t begin = pos_;
    char quote = src_[q];
    bool triple = src_.substr(q, 3) == std::string(3, quote);
    size_t p = q + (triple ? 3 : 1);
    int line = line_;
    size_t line_begin = line_begin_;
    while (true) {
      if (p >= src_.size()) fail("unterminated string literal", start);
      char ch = src_[p];
      if (ch == '\\') {
        if (p + 1 < src_.size() && src_[p + 1] == '\n') {
          ++line;
          line_begin = p + 2;
        }
        p += 2;
        continue;
      }
      if (ch == '\n') {
        if (!triple) fail("unterminated string literal", start);
        ++line;
        line_begin = p + 1;
        ++p;
        continue;
      }
      if (ch == quote) {
        if (!triple) {
          ++p;
          break;
        }
        if (src_.substr(p, 3) == std::string(3, quote)) {
          p += 3;
          break;
        }
      }
      ++p;
    }
    pos_ = p;
    line_ = line;
    line_begin_ = line_begin;
    emit(TokenKind::String, std::string(src_.substr(begin, p - begin)), start,
         here());
  }

  void scan_number() {
    Location start = here();
    size_t begin = pos_;
    auto digits = [&](auto pred) {
      while (pos_ < src_.size() &&
             (pred(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        ++pos_;
      }
    };
    auto is_dec = [](unsigned char ch) { return std::isdigit(ch) != 0; };
    if (src_[pos_] == '0' && pos_ + 1 < src_.size() &&
        std::string_view("xXoObB").find(src_[pos_ + 1]) !=
            std::string_view::npos) {
      pos_ += 2;
      digits([](unsigned char ch) { return std::isxdigit(ch) != 0; });
    } else {
      digits(is_dec);
      if (pos_ < src_.size() && src_[pos_] == '.') {
        ++pos_;
        digits(is_dec);
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        size_t save = pos_;
        ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
          ++pos_;
        }
        if (pos_ < src_.size() &&
            std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          digits(is_dec);
        } else {
          pos_ = save;
        }
      }
      if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J')) {
        ++pos_;
      }
    }
    if (pos_ < src_.size() &&
        is_ident_start(static_cast<unsigned char>(src_[pos_]))) {
      fail("invalid decimal literal", start);
    }
    emit(TokenKind::Number, std::string(src_.substr(begin, pos_ - begin)),
         start, here());
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  size_t line_begin_ = 0;
  int depth_ = 0;
  bool at_line_start_ = true;
  bool line_has_tokens_ = false;
  std::vector<int> indents_;
  std::vector<Token> tokens_;
};

}  // namespace

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) {
  return Lexer(source).run();
}

}  // namespace typegen::py
