#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "typegen/frontend/token.hpp"

namespace typegen::py {

enum class ConstKind { Int, Float, Complex, Str, Bytes, Bool, None, Ellipsis };

enum class ExprKind {
  Name,
  Constant,
  FString,
  Attribute,
  Subscript,
  Slice,
  Call,
  BinOp,
  UnaryOp,
  BoolOp,
  Compare,
  List,
  Tuple,
  Set,
  Dict,
  ListComp,
  SetComp,
  DictComp,
  GeneratorExp,
  IfExp,
  Lambda,
  Starred,
  NamedExpr,
  Await,
  Yield,
  YieldFrom,
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Keyword {
  std::string name;  // empty for `**mapping`
  Location loc;
  ExprPtr value;
};

struct Comprehension {
  ExprPtr target;
  ExprPtr iter;
  std::vector<ExprPtr> ifs;
  bool is_async = false;
};

/// One expression node. Which slots are populated depends on `kind`:
///
///   Name        name
///   Constant    constant, name (literal source text)
///   FString     name (literal source text)
///   Attribute   value, name (attribute)
///   Subscript   value, index
///   Slice       items = {lower, upper, step}, entries may be null
///   Call        func, items (positional args), keywords
///   BinOp       left, name (operator), right
///   UnaryOp     name (operator), value
///   BoolOp      name ("and" / "or"), items
///   Compare     left, ops, items (comparators)
///   List/Tuple/Set  items
///   Dict        keys, items (values); a null key marks `**mapping`
///   *Comp / GeneratorExp  value (element), generators; DictComp key in left
///   IfExp       test, left (body), right (orelse)
///   Lambda      value (body)
///   Starred / Await / Yield / YieldFrom  value (may be null for bare yield)
///   NamedExpr   left (target), value
struct Expr {
  ExprKind kind = ExprKind::Name;
  Location start;
  Location end;
  std::string name;
  ConstKind constant = ConstKind::None;
  ExprPtr value;
  ExprPtr left;
  ExprPtr right;
  ExprPtr test;
  ExprPtr index;
  ExprPtr func;
  std::vector<ExprPtr> items;
  std::vector<ExprPtr> keys;
  std::vector<std::string> ops;
  std::vector<Keyword> keywords;
  std::vector<Comprehension> generators;
};

struct ImportRecord {
  /// Module path as written, including leading dots for relative imports
  /// ("os", "numpy", ".util", "..").
  std::string module;
  /// Names pulled in by `from m import a, b`; {"*"} for a wildcard; empty for
  /// a plain `import m`.
  std::vector<std::string> names;
  /// alias -> original (`import numpy as np` gives np -> numpy).
  std::map<std::string, std::string> aliases;
  bool is_relative = false;
  int level = 0;
  int line = 0;

  bool operator==(const ImportRecord&) const = default;
};

enum class StmtKind {
  Expr,
  Assign,
  AugAssign,
  AnnAssign,
  Return,
  Delete,
  Pass,
  Break,
  Continue,
  Raise,
  Assert,
  Global,
  Nonlocal,
  Import,
  ImportFrom,
  If,
  For,
  While,
  With,
  Try,
  FunctionDef,
  ClassDef,
};

const char* to_string(StmtKind kind);

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

enum class ClauseKind { If, Elif, Else, For, While, With, Try, Except, Finally, Def, Class };

/// A header line ending in ':' plus the block it introduces.
struct Clause {
  ClauseKind kind = ClauseKind::If;
  Location start;       // first token of the header (keyword or decorator-free def)
  Location header_end;  // just past the ':'
  ExprPtr test;         // if/elif/while condition, except type
  std::string name;     // `except E as name`
  Location name_loc;
  std::vector<StmtPtr> body;
};

enum class ParamKind { PositionalOnly, Regular, VarArgs, KeywordOnly, VarKeywords };

struct Param {
  std::string name;
  Location loc;
  ParamKind kind = ParamKind::Regular;
  ExprPtr annotation;
  ExprPtr default_value;
};

struct WithItem {
  ExprPtr context;
  ExprPtr target;  // may be null
};

/// One statement. Simple statements use `targets`/`value`/`annotation`;
/// compound statements keep their header+block pairs in `clauses`.
///
///   Assign      targets (chained `a = b = v`), value
///   AugAssign   targets[0], op, value
///   AnnAssign   targets[0], annotation, value (may be null)
///   Expr/Return/Raise/Assert  value (Raise cause / Assert msg in `extra`)
///   Delete      targets
///   Global/Nonlocal  names
///   Import/ImportFrom  imports
///   For         targets[0], value (iterable), clauses {For, [Else]}
///   While/If    clauses; If chains elif/else as further clauses
///   With        with_items, clauses {With}
///   Try         clauses {Try, Except*, [Else], [Finally]}
///   FunctionDef name, params, returns, decorators, clauses {Def}
///   ClassDef    name, bases, keywords, decorators, clauses {Class}
struct Stmt {
  StmtKind kind = StmtKind::Pass;
  int id = -1;
  Location start;
  Location end;
  Location header_end;
  bool is_async = false;

  std::vector<ExprPtr> targets;
  ExprPtr value;
  ExprPtr extra;
  ExprPtr annotation;
  std::string op;
  std::vector<std::string> names;
  std::vector<ImportRecord> imports;

  std::vector<Clause> clauses;
  std::vector<WithItem> with_items;

  std::string name;
  Location name_loc;
  std::vector<Param> params;
  ExprPtr returns;
  /// Position of the return annotation, or of the closing parenthesis of the
  /// parameter list when there is none.
  Location returns_loc;
  std::vector<ExprPtr> decorators;
  std::vector<ExprPtr> bases;
  std::vector<Keyword> class_keywords;
};

struct ModuleAst {
  std::vector<StmtPtr> body;
};

/// Parses a whole file. Throws SyntaxError.
std::unique_ptr<ModuleAst> parse(std::string_view source);

}  // namespace typegen::py
