#include <algorithm>
#include <cctype>
#include <optional>
#include <set>

#include "typegen/eval.hpp"

namespace typegen {
namespace {

struct Token {
  enum Kind { Name, Punct, String, Number, End } kind;
  std::string text;
};

std::optional<std::vector<Token>> lex(std::string_view s) {
  std::vector<Token> out;
  size_t i = 0;
  auto ident = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (s.substr(i, 3) == "...") {
      out.push_back({Token::Name, "..."});
      i += 3;
    } else if (c == '[' || c == ']' || c == ',' || c == '|' || c == '(' || c == ')') {
      out.push_back({Token::Punct, std::string(1, c)});
      ++i;
    } else if (c == '\'' || c == '"') {
      size_t end = s.find(c, i + 1);
      if (end == std::string_view::npos) return std::nullopt;
      out.push_back({Token::String, std::string(s.substr(i, end - i + 1))});
      i = end + 1;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
      size_t j = i + 1;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      out.push_back({Token::Number, std::string(s.substr(i, j - i))});
      i = j;
    } else if (ident(c)) {
      size_t j = i;
      while (j < s.size() && ident(s[j])) ++j;
      std::string name(s.substr(i, j - i));
      if (name.front() == '.' || name.back() == '.' ||
          name.find("..") != std::string::npos) {
        return std::nullopt;
      }
      out.push_back({Token::Name, std::move(name)});
      i = j;
    } else {
      return std::nullopt;
    }
  }
  out.push_back({Token::End, ""});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  std::optional<TypeExpr> parse() {
    auto t = expr();
    if (!t || peek().kind != Token::End) return std::nullopt;
    return t;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  bool accept(const char* punct) {
    if (peek().kind == Token::Punct && peek().text == punct) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::optional<TypeExpr> expr() {
    auto first = primary();
    if (!first) return std::nullopt;
    if (!(peek().kind == Token::Punct && peek().text == "|")) return first;
    TypeExpr u{"|", {*first}};
    while (accept("|")) {
      auto next = primary();
      if (!next) return std::nullopt;
      u.args.push_back(std::move(*next));
    }
    return u;
  }

  std::optional<std::vector<TypeExpr>> arglist(const char* close) {
    std::vector<TypeExpr> args;
    while (!accept(close)) {
      auto a = expr();
      if (!a) return std::nullopt;
      args.push_back(std::move(*a));
      if (accept(",")) continue;
      if (!accept(close)) return std::nullopt;
      break;
    }
    return args;
  }

  std::optional<TypeExpr> primary() {
    const Token& t = peek();
    if (t.kind == Token::Name || t.kind == Token::String || t.kind == Token::Number) {
      ++pos_;
      TypeExpr out{t.text, {}};
      if (t.kind == Token::Name && accept("[")) {
        auto args = arglist("]");
        if (!args || args->empty()) return std::nullopt;
        out.args = std::move(*args);
      }
      return out;
    }
    if (accept("[")) {
      auto args = arglist("]");
      if (!args) return std::nullopt;
      return TypeExpr{"[]", std::move(*args)};
    }
    if (accept("(")) {
      if (!accept(")")) return std::nullopt;
      return TypeExpr{"()", {}};
    }
    return std::nullopt;
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::optional<TypeExpr> parse_raw(std::string_view text) {
  auto tokens = lex(text);
  if (!tokens) return std::nullopt;
  return Parser(std::move(*tokens)).parse();
}

bool is_string_literal(const std::string& s) {
  return s.size() >= 2 && (s.front() == '\'' || s.front() == '"');
}

TypeExpr normalize(TypeExpr t, bool in_literal = false);

TypeExpr make_union(std::vector<TypeExpr> members) {
  std::vector<TypeExpr> flat;
  for (auto& m : members) {
    if (m.constructor == "Union") {
      for (auto& inner : m.args) flat.push_back(std::move(inner));
    } else {
      flat.push_back(std::move(m));
    }
  }
  std::vector<std::pair<std::string, TypeExpr>> keyed;
  std::set<std::string> seen;
  for (auto& m : flat) {
    std::string key = m.canonical_text();
    if (seen.insert(key).second) keyed.emplace_back(std::move(key), std::move(m));
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    bool an = a.first == "None", bn = b.first == "None";
    if (an != bn) return bn;
    return a.first < b.first;
  });
  if (keyed.size() == 1) return std::move(keyed.front().second);
  TypeExpr u{"Union", {}};
  for (auto& [key, m] : keyed) u.args.push_back(std::move(m));
  return u;
}

TypeExpr normalize(TypeExpr t, bool in_literal) {
  if (!in_literal && is_string_literal(t.constructor) && t.args.empty()) {
    // A quoted forward reference stands for the type it names.
    if (auto inner = parse_raw(t.constructor.substr(1, t.constructor.size() - 2))) {
      return normalize(std::move(*inner));
    }
    return t;
  }
  std::string& c = t.constructor;
  if (c.rfind("typing.", 0) == 0) c = c.substr(7);
  static const std::map<std::string, std::string> kLowered = {
      {"List", "list"},           {"Dict", "dict"}, {"Set", "set"},
      {"Tuple", "tuple"},         {"FrozenSet", "frozenset"},
      {"Type", "type"}};
  if (auto it = kLowered.find(c); it != kLowered.end()) c = it->second;

  bool literal = c == "Literal";
  for (auto& a : t.args) a = normalize(std::move(a), literal);

  if (c == "Optional" && t.args.size() == 1) {
    return make_union({std::move(t.args[0]), TypeExpr{"None", {}}});
  }
  if (c == "Union" || c == "|") return make_union(std::move(t.args));
  return t;
}

const std::set<std::string>& elementary_names() {
  static const std::set<std::string> k = {
      "int",   "float",  "complex", "str",        "bytes",  "bool",
      "None",  "object", "bytearray", "memoryview", "range", "slice",
      "Any",   "...",    "NoReturn", "Never",      "AnyStr", "Text",
      "Hashable", "Sized", "SupportsInt", "SupportsFloat", "SupportsIndex"};
  return k;
}

const std::set<std::string>& generic_names() {
  static const std::set<std::string> k = {
      "list",           "dict",           "set",            "frozenset",
      "tuple",          "type",           "Union",          "Optional",
      "Callable",       "Iterable",       "Iterator",       "Generator",
      "Sequence",       "MutableSequence", "Mapping",       "MutableMapping",
      "AbstractSet",    "MutableSet",     "Collection",     "Container",
      "Awaitable",      "Coroutine",      "AsyncIterator",  "AsyncIterable",
      "AsyncGenerator", "DefaultDict",    "defaultdict",    "OrderedDict",
      "Counter",        "Deque",          "deque",          "ChainMap",
      "Literal",        "ClassVar",       "Final",          "Annotated",
      "Pattern",        "Match",          "IO",             "TextIO",
      "BinaryIO",       "KeysView",       "ValuesView",     "ItemsView",
      "ContextManager", "AsyncContextManager", "Reversible",  "[]",
      "()"};
  return k;
}

std::string vocabulary_name(const std::string& c) {
  for (const char* prefix : {"typing.", "collections.abc.", "collections.", "re."}) {
    if (c.rfind(prefix, 0) == 0) return c.substr(std::string_view(prefix).size());
  }
  return c;
}

}  // namespace

std::string TypeExpr::canonical_text() const {
  if (constructor == "[]") {
    std::string out = "[";
    for (size_t i = 0; i < args.size(); ++i) out += (i ? ", " : "") + args[i].canonical_text();
    return out + "]";
  }
  if (constructor == "|") {
    std::string out;
    for (size_t i = 0; i < args.size(); ++i) out += (i ? " | " : "") + args[i].canonical_text();
    return out;
  }
  if (args.empty()) return constructor;
  std::string out = constructor + "[";
  for (size_t i = 0; i < args.size(); ++i) out += (i ? ", " : "") + args[i].canonical_text();
  return out + "]";
}

TypeExpr parse_type(std::string_view text, TypeParseOptions options) {
  auto parsed = parse_raw(text);
  if (!parsed) return TypeExpr{trim(text), {}, true};
  return options.normalize ? normalize(std::move(*parsed)) : std::move(*parsed);
}

std::string canonical_type(std::string_view text, TypeParseOptions options) {
  return parse_type(text, options).canonical_text();
}

bool exact_match(const TypeExpr& pred, const TypeExpr& gt) {
  return pred.canonical_text() == gt.canonical_text();
}

bool match_to_parametric(const TypeExpr& pred, const TypeExpr& gt) {
  return pred.constructor == gt.constructor;
}

const char* to_string(TypeCategory c) {
  switch (c) {
    case TypeCategory::Ele: return "Ele";
    case TypeCategory::Gen: return "Gen";
    case TypeCategory::Usr: return "Usr";
  }
  return "?";
}

const char* to_string(VarCategory c) {
  switch (c) {
    case VarCategory::Arg: return "Arg";
    case VarCategory::Ret: return "Ret";
    case VarCategory::Var: return "Var";
  }
  return "?";
}

TypeCategory categorize_type(const TypeExpr& t) {
  if (t.opaque) return TypeCategory::Usr;
  std::string name = vocabulary_name(t.constructor);
  if (!t.args.empty() || generic_names().count(name)) return TypeCategory::Gen;
  if (elementary_names().count(name)) return TypeCategory::Ele;
  if (is_string_literal(name) || std::isdigit(static_cast<unsigned char>(name[0])) ||
      name[0] == '-') {
    return TypeCategory::Ele;
  }
  return TypeCategory::Usr;
}

}  // namespace typegen
