#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "typegen/error.hpp"
#include "typegen/frontend/ast.hpp"
#include "typegen/frontend/token.hpp"

namespace typegen::py {

const char* to_string(StmtKind kind) {
  switch (kind) {
    case StmtKind::Expr: return "Expr";
    case StmtKind::Assign: return "Assign";
    case StmtKind::AugAssign: return "AugAssign";
    case StmtKind::AnnAssign: return "AnnAssign";
    case StmtKind::Return: return "Return";
    case StmtKind::Delete: return "Delete";
    case StmtKind::Pass: return "Pass";
    case StmtKind::Break: return "Break";
    case StmtKind::Continue: return "Continue";
    case StmtKind::Raise: return "Raise";
    case StmtKind::Assert: return "Assert";
    case StmtKind::Global: return "Global";
    case StmtKind::Nonlocal: return "Nonlocal";
    case StmtKind::Import: return "Import";
    case StmtKind::ImportFrom: return "ImportFrom";
    case StmtKind::If: return "If";
    case StmtKind::For: return "For";
    case StmtKind::While: return "While";
    case StmtKind::With: return "With";
    case StmtKind::Try: return "Try";
    case StmtKind::FunctionDef: return "FunctionDef";
    case StmtKind::ClassDef: return "ClassDef";
  }
  return "?";
}

namespace {

bool is_augassign(std::string_view op) {
  return op == "+=" || op == "-=" || op == "*=" || op == "/=" || op == "//=" ||
         op == "%=" || op == "**=" || op == ">>=" || op == "<<=" ||
         op == "&=" || op == "|=" || op == "^=" || op == "@=";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  std::unique_ptr<ModuleAst> parse_module() {
    auto mod = std::make_unique<ModuleAst>();
    while (peek().kind != TokenKind::EndMarker) {
      if (peek().kind == TokenKind::Newline) {
        advance();
        continue;
      }
      parse_statement(mod->body);
    }
    return mod;
  }

 private:
  // ---- token helpers -------------------------------------------------------

  const Token& peek(size_t k = 0) const {
    size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }

  const Token& advance() {
    const Token& t = toks_[pos_];
    if (t.kind != TokenKind::Newline && t.kind != TokenKind::Indent &&
        t.kind != TokenKind::Dedent && t.kind != TokenKind::EndMarker) {
      last_end_ = t.end;
    }
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, peek()); }

  [[noreturn]] static void fail_at(const std::string& msg, const Token& t) {
    std::string m = msg;
    if (t.kind == TokenKind::EndMarker) m = "unexpected EOF while parsing";
    if (t.kind == TokenKind::Indent) m = "unexpected indent";
    throw SyntaxError(m, t.start.line, t.start.column);
  }

  bool at_op(std::string_view op) const { return peek().is_op(op); }
  bool at_kw(std::string_view kw) const { return peek().is_name(kw); }

  bool accept_op(std::string_view op) {
    if (!at_op(op)) return false;
    advance();
    return true;
  }
  bool accept_kw(std::string_view kw) {
    if (!at_kw(kw)) return false;
    advance();
    return true;
  }
  const Token& expect_op(std::string_view op) {
    if (!at_op(op)) fail("invalid syntax (expected '" + std::string(op) + "')");
    return advance();
  }
  void expect_kw(std::string_view kw) {
    if (!at_kw(kw)) fail("invalid syntax (expected '" + std::string(kw) + "')");
    advance();
  }

  bool at_identifier() const {
    return peek().kind == TokenKind::Name && !is_keyword(peek().text);
  }

  std::string expect_identifier(Location* loc = nullptr) {
    if (!at_identifier()) fail("invalid syntax (expected a name)");
    if (loc != nullptr) *loc = peek().start;
    return advance().text;
  }

  bool can_start_expression() const {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Number:
      case TokenKind::String:
        return true;
      case TokenKind::Name:
        return !is_keyword(t.text) || t.text == "None" || t.text == "True" ||
               t.text == "False" || t.text == "not" || t.text == "lambda" ||
               t.text == "await" || t.text == "yield";
      case TokenKind::Op:
        return t.text == "(" || t.text == "[" || t.text == "{" ||
               t.text == "-" || t.text == "+" || t.text == "~" ||
               t.text == "*" || t.text == "..." || t.text == "**";
      default:
        return false;
    }
  }

  ExprPtr make(ExprKind kind, Location start) const {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->start = start;
    return e;
  }
  ExprPtr finish(ExprPtr e) const {
    e->end = last_end_;
    return e;
  }

  // ---- statements ----------------------------------------------------------

  void parse_statement(std::vector<StmtPtr>& out) {
    const Token& t = peek();
    if (t.kind == TokenKind::Indent) fail("unexpected indent");
    if (t.kind == TokenKind::Dedent) fail("unexpected dedent");
    if (t.is_op("@")) {
      out.push_back(parse_decorated());
      return;
    }
    if (t.kind == TokenKind::Name) {
      if (t.text == "if") return out.push_back(parse_if());
      if (t.text == "while") return out.push_back(parse_while());
      if (t.text == "for") return out.push_back(parse_for(false, t.start));
      if (t.text == "try") return out.push_back(parse_try());
      if (t.text == "with") return out.push_back(parse_with(false, t.start));
      if (t.text == "def") return out.push_back(parse_def({}, false, t.start));
      if (t.text == "class") return out.push_back(parse_class({}));
      if (t.text == "async" && peek(1).kind == TokenKind::Name) {
        Location start = t.start;
        const std::string& nxt = peek(1).text;
        if (nxt == "def" || nxt == "for" || nxt == "with") {
          advance();
          if (nxt == "def") return out.push_back(parse_def({}, true, start));
          if (nxt == "for") return out.push_back(parse_for(true, start));
          return out.push_back(parse_with(true, start));
        }
      }
    }
    parse_simple_statements(out);
  }

  void parse_simple_statements(std::vector<StmtPtr>& out) {
    while (true) {
      out.push_back(parse_small_statement());
      if (accept_op(";")) {
        if (peek().kind == TokenKind::Newline ||
            peek().kind == TokenKind::EndMarker) {
          break;
        }
        continue;
      }
      break;
    }
    if (peek().kind == TokenKind::Newline) {
      advance();
    } else if (peek().kind != TokenKind::EndMarker) {
      fail("invalid syntax");
    }
  }

  StmtPtr new_stmt(StmtKind kind, Location start) {
    auto s = std::make_unique<Stmt>();
    s->kind = kind;
    s->start = start;
    return s;
  }
  StmtPtr finish_simple(StmtPtr s) {
    s->end = last_end_;
    s->header_end = s->end;
    return s;
  }

  StmtPtr parse_small_statement() {
    const Token& t = peek();
    Location start = t.start;
    if (t.kind == TokenKind::Name) {
      if (t.text == "pass" || t.text == "break" || t.text == "continue") {
        StmtKind k = t.text == "pass"    ? StmtKind::Pass
                     : t.text == "break" ? StmtKind::Break
                                         : StmtKind::Continue;
        advance();
        return finish_simple(new_stmt(k, start));
      }
      if (t.text == "return") {
        advance();
        auto s = new_stmt(StmtKind::Return, start);
        if (can_start_expression()) s->value = parse_star_expressions();
        return finish_simple(std::move(s));
      }
      if (t.text == "raise") {
        advance();
        auto s = new_stmt(StmtKind::Raise, start);
        if (can_start_expression()) {
          s->value = parse_expression();
          if (accept_kw("from")) s->extra = parse_expression();
        }
        return finish_simple(std::move(s));
      }
      if (t.text == "global" || t.text == "nonlocal") {
        auto s = new_stmt(t.text == "global" ? StmtKind::Global
                                             : StmtKind::Nonlocal,
                          start);
        advance();
        s->names.push_back(expect_identifier());
        while (accept_op(",")) s->names.push_back(expect_identifier());
        return finish_simple(std::move(s));
      }
      if (t.text == "del") {
        advance();
        auto s = new_stmt(StmtKind::Delete, start);
        ExprPtr targets = parse_target_list();
        check_del_target(*targets);
        if (targets->kind == ExprKind::Tuple) {
          for (auto& e : targets->items) s->targets.push_back(std::move(e));
        } else {
          s->targets.push_back(std::move(targets));
        }
        return finish_simple(std::move(s));
      }
      if (t.text == "assert") {
        advance();
        auto s = new_stmt(StmtKind::Assert, start);
        s->value = parse_expression();
        if (accept_op(",")) s->extra = parse_expression();
        return finish_simple(std::move(s));
      }
      if (t.text == "import") return parse_import();
      if (t.text == "from") return parse_from_import();
    }

    ExprPtr first = at_kw("yield") ? parse_yield() : parse_star_expressions();
    if (at_op(":")) {
      advance();
      check_single_target(*first);
      auto s = new_stmt(StmtKind::AnnAssign, start);
      s->annotation = parse_expression();
      if (accept_op("=")) {
        s->value = at_kw("yield") ? parse_yield() : parse_star_expressions();
      }
      s->targets.push_back(std::move(first));
      return finish_simple(std::move(s));
    }
    if (peek().kind == TokenKind::Op && is_augassign(peek().text)) {
      check_single_target(*first);
      auto s = new_stmt(StmtKind::AugAssign, start);
      std::string op = advance().text;
      s->op = op.substr(0, op.size() - 1);
      s->value = at_kw("yield") ? parse_yield() : parse_star_expressions();
      s->targets.push_back(std::move(first));
      return finish_simple(std::move(s));
    }
    if (at_op("=")) {
      auto s = new_stmt(StmtKind::Assign, start);
      check_target(*first);
      s->targets.push_back(std::move(first));
      while (accept_op("=")) {
        ExprPtr rhs =
            at_kw("yield") ? parse_yield() : parse_star_expressions();
        if (at_op("=")) {
          check_target(*rhs);
          s->targets.push_back(std::move(rhs));
        } else {
          s->value = std::move(rhs);
        }
      }
      if (!s->value) fail("invalid syntax");
      return finish_simple(std::move(s));
    }
    auto s = new_stmt(StmtKind::Expr, start);
    s->value = std::move(first);
    return finish_simple(std::move(s));
  }

  void check_target(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::Name:
      case ExprKind::Attribute:
      case ExprKind::Subscript:
        return;
      case ExprKind::Starred:
        check_target(*e.value);
        return;
      case ExprKind::Tuple:
      case ExprKind::List:
        for (const auto& item : e.items) check_target(*item);
        return;
      default:
        throw SyntaxError("cannot assign to expression", e.start.line,
                          e.start.column);
    }
  }

  void check_single_target(const Expr& e) const {
    if (e.kind != ExprKind::Name && e.kind != ExprKind::Attribute &&
        e.kind != ExprKind::Subscript) {
      throw SyntaxError("illegal target for annotation or augmented assignment",
                        e.start.line, e.start.column);
    }
  }

  void check_del_target(const Expr& e) const {
    if (e.kind == ExprKind::Starred) {
      throw SyntaxError("cannot delete starred", e.start.line, e.start.column);
    }
    check_target(e);
  }

  std::string parse_dotted_name() {
    std::string name = expect_identifier();
    while (at_op(".")) {
      advance();
      name += "." + expect_identifier();
    }
    return name;
  }

  StmtPtr parse_import() {
    Location start = peek().start;
    advance();
    auto s = new_stmt(StmtKind::Import, start);
    do {
      ImportRecord rec;
      rec.line = start.line;
      rec.module = parse_dotted_name();
      if (accept_kw("as")) rec.aliases[expect_identifier()] = rec.module;
      s->imports.push_back(std::move(rec));
    } while (accept_op(","));
    return finish_simple(std::move(s));
  }

  StmtPtr parse_from_import() {
    Location start = peek().start;
    advance();
    auto s = new_stmt(StmtKind::ImportFrom, start);
    ImportRecord rec;
    rec.line = start.line;
    while (at_op(".") || at_op("...")) {
      rec.level += at_op(".") ? 1 : 3;
      advance();
    }
    rec.module = std::string(static_cast<size_t>(rec.level), '.');
    if (!at_kw("import")) {
      rec.module += parse_dotted_name();
    } else if (rec.level == 0) {
      fail("invalid syntax");
    }
    rec.is_relative = rec.level > 0;
    expect_kw("import");
    if (accept_op("*")) {
      rec.names.push_back("*");
    } else {
      bool paren = accept_op("(");
      while (true) {
        std::string name = expect_identifier();
        rec.names.push_back(name);
        if (accept_kw("as")) rec.aliases[expect_identifier()] = name;
        if (!accept_op(",")) break;
        if (paren && at_op(")")) break;
      }
      if (paren) expect_op(")");
    }
    s->imports.push_back(std::move(rec));
    return finish_simple(std::move(s));
  }

  // Parses `':' block` and fills the clause's body and header end.
  void parse_block(Clause& clause) {
    clause.header_end = expect_op(":").end;
    if (peek().kind == TokenKind::Newline) {
      advance();
      if (peek().kind != TokenKind::Indent) {
        fail("expected an indented block");
      }
      advance();
      while (peek().kind != TokenKind::Dedent &&
             peek().kind != TokenKind::EndMarker) {
        parse_statement(clause.body);
      }
      if (peek().kind == TokenKind::Dedent) advance();
    } else {
      parse_simple_statements(clause.body);
    }
  }

  void finish_compound(Stmt& s) {
    s.header_end = s.clauses.front().header_end;
    const Clause& last = s.clauses.back();
    s.end = last.body.empty() ? last.header_end : last.body.back()->end;
  }

  StmtPtr parse_if() {
    Location start = peek().start;
    advance();
    auto s = new_stmt(StmtKind::If, start);
    Clause c;
    c.kind = ClauseKind::If;
    c.start = start;
    c.test = parse_named_expression();
    parse_block(c);
    s->clauses.push_back(std::move(c));
    while (at_kw("elif")) {
      Clause e;
      e.kind = ClauseKind::Elif;
      e.start = peek().start;
      advance();
      e.test = parse_named_expression();
      parse_block(e);
      s->clauses.push_back(std::move(e));
    }
    parse_else(*s);
    finish_compound(*s);
    return s;
  }

  void parse_else(Stmt& s) {
    if (!at_kw("else")) return;
    Clause e;
    e.kind = ClauseKind::Else;
    e.start = peek().start;
    advance();
    parse_block(e);
    s.clauses.push_back(std::move(e));
  }

  StmtPtr parse_while() {
    Location start = peek().start;
    advance();
    auto s = new_stmt(StmtKind::While, start);
    Clause c;
    c.kind = ClauseKind::While;
    c.start = start;
    c.test = parse_named_expression();
    parse_block(c);
    s->clauses.push_back(std::move(c));
    parse_else(*s);
    finish_compound(*s);
    return s;
  }

  StmtPtr parse_for(bool is_async, Location start) {
    advance();  // 'for'
    auto s = new_stmt(StmtKind::For, start);
    s->is_async = is_async;
    ExprPtr target = parse_target_list();
    check_target(*target);
    s->targets.push_back(std::move(target));
    expect_kw("in");
    s->value = parse_star_expressions();
    Clause c;
    c.kind = ClauseKind::For;
    c.start = start;
    parse_block(c);
    s->clauses.push_back(std::move(c));
    parse_else(*s);
    finish_compound(*s);
    return s;
  }

  StmtPtr parse_try() {
    Location start = peek().start;
    advance();
    auto s = new_stmt(StmtKind::Try, start);
    Clause c;
    c.kind = ClauseKind::Try;
    c.start = start;
    parse_block(c);
    s->clauses.push_back(std::move(c));
    bool handlers = false;
    while (at_kw("except")) {
      Clause h;
      h.kind = ClauseKind::Except;
      h.start = peek().start;
      advance();
      if (at_op("*")) fail("except* requires Python 3.11");
      if (!at_op(":")) {
        h.test = parse_expression();
        if (accept_kw("as")) h.name = expect_identifier(&h.name_loc);
      }
      parse_block(h);
      s->clauses.push_back(std::move(h));
      handlers = true;
    }
    if (handlers) parse_else(*s);
    bool has_finally = false;
    if (at_kw("finally")) {
      Clause f;
      f.kind = ClauseKind::Finally;
      f.start = peek().start;
      advance();
      parse_block(f);
      s->clauses.push_back(std::move(f));
      has_finally = true;
    }
    if (!handlers && !has_finally) fail("expected 'except' or 'finally' block");
    finish_compound(*s);
    return s;
  }

  WithItem parse_with_item() {
    WithItem item;
    item.context = parse_expression();
    if (accept_kw("as")) {
      item.target = parse_target();
      check_target(*item.target);
    }
    return item;
  }

  StmtPtr parse_with(bool is_async, Location start) {
    advance();  // 'with'
    auto s = new_stmt(StmtKind::With, start);
    s->is_async = is_async;
    bool parsed = false;
    if (at_op("(")) {
      // Parenthesized context managers; fall back to a plain expression.
      size_t save = pos_;
      Location save_end = last_end_;
      try {
        advance();
        std::vector<WithItem> items;
        while (!at_op(")")) {
          items.push_back(parse_with_item());
          if (!accept_op(",")) break;
        }
        expect_op(")");
        if (at_op(":")) {
          s->with_items = std::move(items);
          parsed = true;
        }
      } catch (const SyntaxError&) {
      }
      if (!parsed) {
        pos_ = save;
        last_end_ = save_end;
      }
    }
    if (!parsed) {
      do {
        s->with_items.push_back(parse_with_item());
      } while (accept_op(","));
    }
    Clause c;
    c.kind = ClauseKind::With;
    c.start = start;
    parse_block(c);
    s->clauses.push_back(std::move(c));
    finish_compound(*s);
    return s;
  }

  StmtPtr parse_decorated() {
    std::vector<ExprPtr> decorators;
    while (at_op("@")) {
      advance();
      decorators.push_back(parse_named_expression());
      if (peek().kind != TokenKind::Newline) fail("invalid syntax");
      advance();
    }
    Location start = peek().start;
    if (at_kw("def")) return parse_def(std::move(decorators), false, start);
    if (at_kw("class")) return parse_class(std::move(decorators));
    if (at_kw("async") && peek(1).is_name("def")) {
      advance();
      return parse_def(std::move(decorators), true, start);
    }
    fail("invalid syntax");
  }

  // Parameter list for `def` (annotations allowed) or `lambda`.
  std::vector<Param> parse_params(bool annotations, std::string_view close) {
    std::vector<Param> params;
    bool keyword_only = false;
    while (!at_op(close)) {
      Param p;
      if (accept_op("/")) {
        for (auto& q : params) q.kind = ParamKind::PositionalOnly;
        if (!accept_op(",")) break;
        continue;
      }
      if (at_op("**")) {
        advance();
        p.kind = ParamKind::VarKeywords;
      } else if (at_op("*")) {
        advance();
        keyword_only = true;
        if (at_op(",") || at_op(close)) {
          if (!accept_op(",")) break;
          continue;
        }
        p.kind = ParamKind::VarArgs;
      } else {
        p.kind = keyword_only ? ParamKind::KeywordOnly : ParamKind::Regular;
      }
      p.name = expect_identifier(&p.loc);
      if (annotations && accept_op(":")) p.annotation = parse_expression();
      if (accept_op("=")) p.default_value = parse_expression();
      params.push_back(std::move(p));
      if (!accept_op(",")) break;
    }
    return params;
  }

  StmtPtr parse_def(std::vector<ExprPtr> decorators, bool is_async,
                    Location start) {
    Location def_loc = peek().start;
    advance();  // 'def'
    auto s = new_stmt(StmtKind::FunctionDef, is_async ? start : def_loc);
    s->is_async = is_async;
    s->decorators = std::move(decorators);
    s->name = expect_identifier(&s->name_loc);
    expect_op("(");
    s->params = parse_params(true, ")");
    s->returns_loc = peek().start;
    expect_op(")");
    if (accept_op("->")) {
      s->returns_loc = peek().start;
      s->returns = parse_expression();
    }
    Clause c;
    c.kind = ClauseKind::Def;
    c.start = s->start;
    parse_block(c);
    s->clauses.push_back(std::move(c));
    finish_compound(*s);
    return s;
  }

  StmtPtr parse_class(std::vector<ExprPtr> decorators) {
    Location start = peek().start;
    advance();
    auto s = new_stmt(StmtKind::ClassDef, start);
    s->decorators = std::move(decorators);
    s->name = expect_identifier(&s->name_loc);
    if (accept_op("(")) {
      ExprPtr call = make(ExprKind::Call, start);
      parse_call_args(*call);
      s->bases = std::move(call->items);
      s->class_keywords = std::move(call->keywords);
    }
    Clause c;
    c.kind = ClauseKind::Class;
    c.start = start;
    parse_block(c);
    s->clauses.push_back(std::move(c));
    finish_compound(*s);
    return s;
  }

  // ---- expressions ---------------------------------------------------------

  // Comma-separated list at bitwise-or precedence, used for `for`/`del`
  // targets where `in` must not be swallowed by a comparison.
  ExprPtr parse_target_list() {
    Location start = peek().start;
    ExprPtr first = parse_target();
    if (!at_op(",")) return first;
    auto tuple = make(ExprKind::Tuple, start);
    tuple->items.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_kw("in") || !can_start_expression()) break;
      tuple->items.push_back(parse_target());
    }
    return finish(std::move(tuple));
  }

  ExprPtr parse_target() {
    if (at_op("*")) {
      Location start = peek().start;
      advance();
      auto e = make(ExprKind::Starred, start);
      e->value = parse_bitwise_or();
      return finish(std::move(e));
    }
    return parse_bitwise_or();
  }

  ExprPtr parse_star_expressions() {
    Location start = peek().start;
    ExprPtr first = parse_star_expression();
    if (!at_op(",")) return first;
    auto tuple = make(ExprKind::Tuple, start);
    tuple->items.push_back(std::move(first));
    while (accept_op(",")) {
      if (!can_start_expression()) break;
      tuple->items.push_back(parse_star_expression());
    }
    return finish(std::move(tuple));
  }

  ExprPtr parse_star_expression() {
    if (at_op("*")) {
      Location start = peek().start;
      advance();
      auto e = make(ExprKind::Starred, start);
      e->value = parse_bitwise_or();
      return finish(std::move(e));
    }
    return parse_expression();
  }

  ExprPtr parse_star_named_expression() {
    if (at_op("*")) return parse_star_expression();
    return parse_named_expression();
  }

  ExprPtr parse_named_expression() {
    if (at_identifier() && peek(1).is_op(":=")) {
      Location start = peek().start;
      auto e = make(ExprKind::NamedExpr, start);
      e->left = make(ExprKind::Name, start);
      e->left->name = advance().text;
      e->left->end = last_end_;
      advance();  // :=
      e->value = parse_expression();
      return finish(std::move(e));
    }
    return parse_expression();
  }

  ExprPtr parse_expression() {
    if (at_kw("lambda")) return parse_lambda();
    Location start = peek().start;
    ExprPtr body = parse_disjunction();
    if (at_kw("if")) {
      advance();
      auto e = make(ExprKind::IfExp, start);
      e->test = parse_disjunction();
      expect_kw("else");
      e->left = std::move(body);
      e->right = parse_expression();
      return finish(std::move(e));
    }
    return body;
  }

  ExprPtr parse_lambda() {
    Location start = peek().start;
    advance();
    auto e = make(ExprKind::Lambda, start);
    parse_params(false, ":");
    expect_op(":");
    e->value = parse_expression();
    return finish(std::move(e));
  }

  ExprPtr parse_yield() {
    Location start = peek().start;
    advance();
    if (accept_kw("from")) {
      auto e = make(ExprKind::YieldFrom, start);
      e->value = parse_expression();
      return finish(std::move(e));
    }
    auto e = make(ExprKind::Yield, start);
    if (can_start_expression()) e->value = parse_star_expressions();
    return finish(std::move(e));
  }

  ExprPtr parse_disjunction() {
    Location start = peek().start;
    ExprPtr first = parse_conjunction();
    if (!at_kw("or")) return first;
    auto e = make(ExprKind::BoolOp, start);
    e->name = "or";
    e->items.push_back(std::move(first));
    while (accept_kw("or")) e->items.push_back(parse_conjunction());
    return finish(std::move(e));
  }

  ExprPtr parse_conjunction() {
    Location start = peek().start;
    ExprPtr first = parse_inversion();
    if (!at_kw("and")) return first;
    auto e = make(ExprKind::BoolOp, start);
    e->name = "and";
    e->items.push_back(std::move(first));
    while (accept_kw("and")) e->items.push_back(parse_inversion());
    return finish(std::move(e));
  }

  ExprPtr parse_inversion() {
    if (at_kw("not")) {
      Location start = peek().start;
      advance();
      auto e = make(ExprKind::UnaryOp, start);
      e->name = "not";
      e->value = parse_inversion();
      return finish(std::move(e));
    }
    return parse_comparison();
  }

  bool at_compare_op(std::string* op) const {
    const Token& t = peek();
    if (t.kind == TokenKind::Op &&
        (t.text == "==" || t.text == "!=" || t.text == "<" || t.text == "<=" ||
         t.text == ">" || t.text == ">=")) {
      *op = t.text;
      return true;
    }
    if (t.is_name("in")) {
      *op = "in";
      return true;
    }
    if (t.is_name("not") && peek(1).is_name("in")) {
      *op = "not in";
      return true;
    }
    if (t.is_name("is")) {
      *op = peek(1).is_name("not") ? "is not" : "is";
      return true;
    }
    return false;
  }

  ExprPtr parse_comparison() {
    Location start = peek().start;
    ExprPtr left = parse_bitwise_or();
    std::string op;
    if (!at_compare_op(&op)) return left;
    auto e = make(ExprKind::Compare, start);
    e->left = std::move(left);
    while (at_compare_op(&op)) {
      advance();
      if (op == "not in" || op == "is not") advance();
      e->ops.push_back(op);
      e->items.push_back(parse_bitwise_or());
    }
    return finish(std::move(e));
  }

  template <typename Next>
  ExprPtr parse_binary(std::initializer_list<std::string_view> ops, Next next) {
    Location start = peek().start;
    ExprPtr left = (this->*next)();
    while (true) {
      const Token& t = peek();
      bool match = false;
      if (t.kind == TokenKind::Op) {
        for (std::string_view op : ops) match = match || t.text == op;
      }
      if (!match) return left;
      auto e = make(ExprKind::BinOp, start);
      e->name = advance().text;
      e->left = std::move(left);
      e->right = (this->*next)();
      left = finish(std::move(e));
    }
  }

  ExprPtr parse_bitwise_or() {
    return parse_binary({"|"}, &Parser::parse_bitwise_xor);
  }
  ExprPtr parse_bitwise_xor() {
    return parse_binary({"^"}, &Parser::parse_bitwise_and);
  }
  ExprPtr parse_bitwise_and() {
    return parse_binary({"&"}, &Parser::parse_shift);
  }
  ExprPtr parse_shift() {
    return parse_binary({"<<", ">>"}, &Parser::parse_sum);
  }
  ExprPtr parse_sum() { return parse_binary({"+", "-"}, &Parser::parse_term); }
  ExprPtr parse_term() {
    return parse_binary({"*", "/", "//", "%", "@"}, &Parser::parse_factor);
  }

  ExprPtr parse_factor() {
    if (at_op("+") || at_op("-") || at_op("~")) {
      Location start = peek().start;
      auto e = make(ExprKind::UnaryOp, start);
      e->name = advance().text;
      e->value = parse_factor();
      return finish(std::move(e));
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    Location start = peek().start;
    ExprPtr base;
    if (at_kw("await")) {
      advance();
      auto e = make(ExprKind::Await, start);
      e->value = parse_primary();
      base = finish(std::move(e));
    } else {
      base = parse_primary();
    }
    if (at_op("**")) {
      advance();
      auto e = make(ExprKind::BinOp, start);
      e->name = "**";
      e->left = std::move(base);
      e->right = parse_factor();
      return finish(std::move(e));
    }
    return base;
  }

  ExprPtr parse_primary() {
    Location start = peek().start;
    ExprPtr e = parse_atom();
    while (true) {
      if (at_op(".")) {
        advance();
        auto a = make(ExprKind::Attribute, start);
        a->value = std::move(e);
        a->name = expect_identifier();
        e = finish(std::move(a));
      } else if (at_op("(")) {
        advance();
        auto c = make(ExprKind::Call, start);
        c->func = std::move(e);
        parse_call_args(*c);
        e = finish(std::move(c));
      } else if (at_op("[")) {
        advance();
        auto s = make(ExprKind::Subscript, start);
        s->value = std::move(e);
        s->index = parse_slices();
        expect_op("]");
        e = finish(std::move(s));
      } else {
        return e;
      }
    }
  }

  // Consumes arguments up to and including ')'.
  void parse_call_args(Expr& call) {
    while (!at_op(")")) {
      if (at_op("**")) {
        Keyword kw;
        kw.loc = peek().start;
        advance();
        kw.value = parse_expression();
        call.keywords.push_back(std::move(kw));
      } else if (at_op("*")) {
        call.items.push_back(parse_star_expression());
      } else if (at_identifier() && peek(1).is_op("=")) {
        Keyword kw;
        kw.loc = peek().start;
        kw.name = advance().text;
        advance();  // '='
        kw.value = parse_expression();
        call.keywords.push_back(std::move(kw));
      } else {
        Location arg_start = peek().start;
        ExprPtr arg = parse_named_expression();
        if (at_kw("for") || (at_kw("async") && peek(1).is_name("for"))) {
          auto gen = make(ExprKind::GeneratorExp, arg_start);
          gen->value = std::move(arg);
          parse_comprehension_clauses(*gen);
          arg = finish(std::move(gen));
        }
        call.items.push_back(std::move(arg));
      }
      if (!accept_op(",")) break;
    }
    expect_op(")");
  }

  ExprPtr parse_slices() {
    Location start = peek().start;
    ExprPtr first = parse_slice();
    if (!at_op(",")) return first;
    auto tuple = make(ExprKind::Tuple, start);
    tuple->items.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_op("]")) break;
      tuple->items.push_back(parse_slice());
    }
    return finish(std::move(tuple));
  }

  ExprPtr parse_slice() {
    Location start = peek().start;
    ExprPtr lower;
    if (!at_op(":")) {
      lower = parse_star_named_expression();
      if (!at_op(":")) return lower;
    }
    advance();  // ':'
    auto s = make(ExprKind::Slice, start);
    s->items.push_back(std::move(lower));
    ExprPtr upper;
    if (!at_op(":") && !at_op("]") && !at_op(",")) upper = parse_expression();
    s->items.push_back(std::move(upper));
    ExprPtr step;
    if (accept_op(":")) {
      if (!at_op("]") && !at_op(",")) step = parse_expression();
    }
    s->items.push_back(std::move(step));
    return finish(std::move(s));
  }

  void parse_comprehension_clauses(Expr& comp) {
    while (at_kw("for") || (at_kw("async") && peek(1).is_name("for"))) {
      Comprehension gen;
      if (accept_kw("async")) gen.is_async = true;
      expect_kw("for");
      gen.target = parse_target_list();
      check_target(*gen.target);
      expect_kw("in");
      gen.iter = parse_disjunction();
      while (at_kw("if")) {
        advance();
        gen.ifs.push_back(parse_disjunction());
      }
      comp.generators.push_back(std::move(gen));
    }
  }

  bool at_comprehension() const {
    return at_kw("for") || (at_kw("async") && peek(1).is_name("for"));
  }

  ExprPtr parse_atom() {
    const Token& t = peek();
    Location start = t.start;
    switch (t.kind) {
      case TokenKind::Name: {
        if (t.text == "None" || t.text == "True" || t.text == "False") {
          auto e = make(ExprKind::Constant, start);
          e->constant = t.text == "None" ? ConstKind::None : ConstKind::Bool;
          e->name = advance().text;
          return finish(std::move(e));
        }
        if (is_keyword(t.text)) fail("invalid syntax");
        auto e = make(ExprKind::Name, start);
        e->name = advance().text;
        return finish(std::move(e));
      }
      case TokenKind::Number: {
        auto e = make(ExprKind::Constant, start);
        const std::string& text = t.text;
        bool radix = text.size() > 1 && text[0] == '0' &&
                     std::string_view("xXoObB").find(text[1]) !=
                         std::string_view::npos;
        if (!radix && (text.back() == 'j' || text.back() == 'J')) {
          e->constant = ConstKind::Complex;
        } else if (!radix &&
                   text.find_first_of(".eE") != std::string::npos) {
          e->constant = ConstKind::Float;
        } else {
          e->constant = ConstKind::Int;
        }
        e->name = advance().text;
        return finish(std::move(e));
      }
      case TokenKind::String:
        return parse_strings();
      case TokenKind::Op:
        break;
      default:
        fail("invalid syntax");
    }
    if (t.text == "...") {
      auto e = make(ExprKind::Constant, start);
      e->constant = ConstKind::Ellipsis;
      e->name = advance().text;
      return finish(std::move(e));
    }
    if (t.text == "(") return parse_paren();
    if (t.text == "[") return parse_list();
    if (t.text == "{") return parse_brace();
    fail("invalid syntax");
  }

  ExprPtr parse_strings() {
    Location start = peek().start;
    bool any_f = false;
    bool any_bytes = false;
    bool any_text = false;
    std::string text;
    while (peek().kind == TokenKind::String) {
      const std::string& s = peek().text;
      size_t q = s.find_first_of("'\"");
      std::string_view prefix(s.data(), q);
      bool is_bytes = prefix.find_first_of("bB") != std::string_view::npos;
      any_f = any_f || prefix.find_first_of("fF") != std::string_view::npos;
      (is_bytes ? any_bytes : any_text) = true;
      if (!text.empty()) text += ' ';
      text += advance().text;
    }
    if (any_bytes && any_text) {
      throw SyntaxError("cannot mix bytes and nonbytes literals", start.line,
                        start.column);
    }
    auto e = make(any_f ? ExprKind::FString : ExprKind::Constant, start);
    e->constant = any_bytes ? ConstKind::Bytes : ConstKind::Str;
    e->name = std::move(text);
    return finish(std::move(e));
  }

  ExprPtr parse_paren() {
    Location start = peek().start;
    advance();
    if (accept_op(")")) {
      auto e = make(ExprKind::Tuple, start);
      return finish(std::move(e));
    }
    if (at_kw("yield")) {
      ExprPtr y = parse_yield();
      expect_op(")");
      return y;
    }
    ExprPtr first = parse_star_named_expression();
    if (at_comprehension()) {
      auto gen = make(ExprKind::GeneratorExp, start);
      gen->value = std::move(first);
      parse_comprehension_clauses(*gen);
      expect_op(")");
      return finish(std::move(gen));
    }
    if (at_op(",")) {
      auto tuple = make(ExprKind::Tuple, start);
      tuple->items.push_back(std::move(first));
      while (accept_op(",")) {
        if (at_op(")")) break;
        tuple->items.push_back(parse_star_named_expression());
      }
      expect_op(")");
      return finish(std::move(tuple));
    }
    expect_op(")");
    return first;
  }

  ExprPtr parse_list() {
    Location start = peek().start;
    advance();
    if (accept_op("]")) return finish(make(ExprKind::List, start));
    ExprPtr first = parse_star_named_expression();
    if (at_comprehension()) {
      auto comp = make(ExprKind::ListComp, start);
      comp->value = std::move(first);
      parse_comprehension_clauses(*comp);
      expect_op("]");
      return finish(std::move(comp));
    }
    auto list = make(ExprKind::List, start);
    list->items.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_op("]")) break;
      list->items.push_back(parse_star_named_expression());
    }
    expect_op("]");
    return finish(std::move(list));
  }

  ExprPtr parse_brace() {
    Location start = peek().start;
    advance();
    if (accept_op("}")) return finish(make(ExprKind::Dict, start));
    if (at_op("**")) return parse_dict_rest(start, nullptr, nullptr);
    ExprPtr first = parse_star_named_expression();
    if (accept_op(":")) {
      ExprPtr value = parse_expression();
      if (at_comprehension()) {
        auto comp = make(ExprKind::DictComp, start);
        comp->left = std::move(first);
        comp->value = std::move(value);
        parse_comprehension_clauses(*comp);
        expect_op("}");
        return finish(std::move(comp));
      }
      return parse_dict_rest(start, std::move(first), std::move(value));
    }
    if (at_comprehension()) {
      auto comp = make(ExprKind::SetComp, start);
      comp->value = std::move(first);
      parse_comprehension_clauses(*comp);
      expect_op("}");
      return finish(std::move(comp));
    }
    auto set = make(ExprKind::Set, start);
    set->items.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_op("}")) break;
      set->items.push_back(parse_star_named_expression());
    }
    expect_op("}");
    return finish(std::move(set));
  }

  // Remaining dict entries after an optional already-parsed first pair.
  ExprPtr parse_dict_rest(Location start, ExprPtr key, ExprPtr value) {
    auto dict = make(ExprKind::Dict, start);
    bool first_pending = value != nullptr;
    if (first_pending) {
      dict->keys.push_back(std::move(key));
      dict->items.push_back(std::move(value));
      if (!accept_op(",")) {
        expect_op("}");
        return finish(std::move(dict));
      }
    }
    while (!at_op("}")) {
      if (accept_op("**")) {
        dict->keys.push_back(nullptr);
        dict->items.push_back(parse_bitwise_or());
      } else {
        dict->keys.push_back(parse_expression());
        expect_op(":");
        dict->items.push_back(parse_expression());
      }
      if (!accept_op(",")) break;
    }
    expect_op("}");
    return finish(std::move(dict));
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  Location last_end_;
};

}  // namespace

std::unique_ptr<ModuleAst> parse(std::string_view source) {
  return Parser(tokenize(source)).parse_module();
}

}  // namespace typegen::py
