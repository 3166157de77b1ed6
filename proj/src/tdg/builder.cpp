#include <map>
#include <optional>
#include <set>

#include <spdlog/spdlog.h>

#include "typegen/error.hpp"
#include "typegen/tdg.hpp"

namespace typegen {
namespace {

using py::Expr;
using py::ExprKind;
using py::Stmt;
using py::StmtKind;

// Reaching definitions: variable name -> symbol nodes that may define it.
using Env = std::map<std::string, std::set<int>>;

void join(Env& into, const Env& other) {
  for (const auto& [name, defs] : other) {
    into[name].insert(defs.begin(), defs.end());
  }
}

const char* const_type(py::ConstKind k) {
  switch (k) {
    case py::ConstKind::Int: return "int";
    case py::ConstKind::Float: return "float";
    case py::ConstKind::Complex: return "complex";
    case py::ConstKind::Str: return "str";
    case py::ConstKind::Bytes: return "bytes";
    case py::ConstKind::Bool: return "bool";
    case py::ConstKind::None: return "None";
    case py::ConstKind::Ellipsis: return "ellipsis";
  }
  return "object";
}

// "a", "a.b.c" for pure name/attribute chains; nullopt otherwise.
std::optional<std::string> dotted(const Expr& e) {
  if (e.kind == ExprKind::Name) return e.name;
  if (e.kind == ExprKind::Attribute && e.value) {
    auto base = dotted(*e.value);
    if (base) return *base + "." + e.name;
  }
  return std::nullopt;
}

class Builder {
 public:
  explicit Builder(const SourceModule& m) : m_(m) {}

  TypeDependencyGraph build_function(const FunctionInfo& fn) {
    const Stmt& def = *fn.node;
    stmt_ = def.id;
    for (const auto& p : def.params) {
      int value = p.default_value ? eval(*p.default_value) : -1;
      define(p.name, p.loc, value);
    }
    TdgNode ret;
    ret.kind = NodeKind::Symbol;
    ret.name = def.name;
    ret.location = def.returns_loc;
    ret.statement_id = def.id;
    ret.is_return = true;
    ret.occurrences.push_back({def.returns_loc, def.id, true});
    return_node_ = g_.add_node(std::move(ret));
    walk(def.clauses[0].body);
    return std::move(g_);
  }

  TypeDependencyGraph build_module() {
    walk(m_.ast().body);
    return std::move(g_);
  }

 private:
  int add_symbol(const std::string& name, Location loc, bool is_def) {
    TdgNode n;
    n.kind = NodeKind::Symbol;
    n.name = name;
    n.location = loc;
    n.statement_id = stmt_;
    n.occurrences.push_back({loc, stmt_, is_def});
    return g_.add_node(std::move(n));
  }

  int add_op(OpKind op, Location loc, std::string detail = {}) {
    TdgNode n;
    n.kind = NodeKind::Operation;
    n.op = op;
    n.detail = std::move(detail);
    n.location = loc;
    n.statement_id = stmt_;
    return g_.add_node(std::move(n));
  }

  int add_type(std::string type, Location loc) {
    TdgNode n;
    n.kind = NodeKind::TypeLit;
    n.name = std::move(type);
    n.location = loc;
    n.statement_id = stmt_;
    return g_.add_node(std::move(n));
  }

  void link(int from, int to, EdgeRole role) {
    if (from < 0 || to < 0) return;
    g_.add_edge({from, to, role, stmt_});
  }

  int define(const std::string& name, Location loc, int value) {
    int def = add_symbol(name, loc, true);
    link(value, def, EdgeRole::Flow);
    env_[name] = {def};
    return def;
  }

  int use(const std::string& name, Location loc) {
    int node = add_symbol(name, loc, false);
    auto it = env_.find(name);
    if (it != env_.end()) {
      for (int def : it->second) link(def, node, EdgeRole::Flow);
    }
    uses_.push_back({node, name});
    return node;
  }

  void unsupported(const Expr& e, const char* what) {
    spdlog::debug("{}:{}: {} not modelled in the type dependency graph",
                  m_.path().string(), e.start.line, what);
  }

  int eval(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Name:
        return use(e.name, e.start);
      case ExprKind::Constant:
        return add_type(const_type(e.constant), e.start);
      case ExprKind::FString:
        return add_type("str", e.start);
      case ExprKind::Attribute: {
        auto name = dotted(e);
        if (name && env_.count(*name)) return use(*name, e.start);
        int op = add_op(OpKind::Attribute, e.start, e.name);
        link(eval(*e.value), op, EdgeRole::Operand);
        return op;
      }
      case ExprKind::Subscript: {
        int op = add_op(OpKind::SubscriptRead, e.start);
        link(eval(*e.value), op, EdgeRole::Operand);
        link(eval(*e.index), op, EdgeRole::Key);
        return op;
      }
      case ExprKind::Call:
        return eval_call(e);
      case ExprKind::BinOp: {
        int op = add_op(OpKind::BinOp, e.start, e.name);
        link(eval(*e.left), op, EdgeRole::Operand);
        link(eval(*e.right), op, EdgeRole::Operand);
        return op;
      }
      case ExprKind::UnaryOp: {
        int op = add_op(OpKind::UnaryOp, e.start, e.name);
        link(eval(*e.value), op, EdgeRole::Operand);
        return op;
      }
      case ExprKind::BoolOp: {
        int op = add_op(OpKind::BoolOp, e.start, e.name);
        for (const auto& item : e.items) link(eval(*item), op, EdgeRole::Operand);
        return op;
      }
      case ExprKind::Compare: {
        int op = add_op(OpKind::Compare, e.start,
                        e.ops.empty() ? "" : e.ops.front());
        link(eval(*e.left), op, EdgeRole::Operand);
        for (const auto& item : e.items) link(eval(*item), op, EdgeRole::Operand);
        return op;
      }
      case ExprKind::List:
      case ExprKind::Tuple:
      case ExprKind::Set: {
        OpKind kind = e.kind == ExprKind::List    ? OpKind::ListLit
                      : e.kind == ExprKind::Tuple ? OpKind::TupleLit
                                                  : OpKind::SetLit;
        int op = add_op(kind, e.start);
        for (const auto& item : e.items) link(eval(*item), op, EdgeRole::Operand);
        return op;
      }
      case ExprKind::Dict: {
        int op = add_op(OpKind::DictLit, e.start);
        for (size_t i = 0; i < e.items.size(); ++i) {
          if (e.keys[i]) link(eval(*e.keys[i]), op, EdgeRole::Key);
          link(eval(*e.items[i]), op, EdgeRole::Value);
        }
        return op;
      }
      case ExprKind::ListComp:
      case ExprKind::SetComp:
      case ExprKind::DictComp:
      case ExprKind::GeneratorExp:
        return eval_comprehension(e);
      case ExprKind::IfExp: {
        eval(*e.test);
        int op = add_op(OpKind::IfExp, e.start);
        link(eval(*e.left), op, EdgeRole::Operand);
        link(eval(*e.right), op, EdgeRole::Operand);
        return op;
      }
      case ExprKind::Starred:
        return eval(*e.value);
      case ExprKind::NamedExpr: {
        int value = eval(*e.value);
        return define(e.left->name, e.left->start, value);
      }
      case ExprKind::Slice:
        unsupported(e, "slice");
        return -1;
      case ExprKind::Lambda:
        unsupported(e, "lambda");
        return -1;
      case ExprKind::Await:
        unsupported(e, "await");
        return -1;
      case ExprKind::Yield:
      case ExprKind::YieldFrom:
        unsupported(e, "yield");
        return -1;
    }
    return -1;
  }

  int eval_call(const Expr& e) {
    const Expr& func = *e.func;
    std::string callee;
    if (auto name = dotted(func)) {
      callee = *name;
    } else if (func.kind == ExprKind::Attribute) {
      callee = func.name;
    } else {
      callee = "call";
    }
    int receiver = -1;
    if (func.kind == ExprKind::Attribute) {
      receiver = eval(*func.value);
    } else if (func.kind != ExprKind::Name) {
      receiver = eval(func);
    }
    int op = add_op(OpKind::Call, e.start, callee);
    link(receiver, op, EdgeRole::Operand);
    for (const auto& arg : e.items) link(eval(*arg), op, EdgeRole::Operand);
    for (const auto& kw : e.keywords) link(eval(*kw.value), op, EdgeRole::Operand);
    return op;
  }

  int eval_comprehension(const Expr& e) {
    Env saved = env_;
    for (const auto& gen : e.generators) {
      int iter = eval(*gen.iter);
      int it = add_op(OpKind::Iteration, gen.iter->start);
      link(iter, it, EdgeRole::Operand);
      bind(*gen.target, it);
      for (const auto& cond : gen.ifs) eval(*cond);
    }
    OpKind kind = e.kind == ExprKind::ListComp  ? OpKind::ListComp
                  : e.kind == ExprKind::SetComp ? OpKind::SetComp
                  : e.kind == ExprKind::DictComp ? OpKind::DictComp
                                                 : OpKind::GeneratorExp;
    int op = add_op(kind, e.start);
    if (kind == OpKind::DictComp) {
      link(eval(*e.left), op, EdgeRole::Key);
      link(eval(*e.value), op, EdgeRole::Value);
    } else {
      link(eval(*e.value), op, EdgeRole::Operand);
    }
    env_ = std::move(saved);
    return op;
  }

  // Binds an assignment target to the node producing its value.
  void bind(const Expr& target, int value) {
    switch (target.kind) {
      case ExprKind::Name:
        define(target.name, target.start, value);
        return;
      case ExprKind::Attribute: {
        auto name = dotted(target);
        if (name) {
          define(*name, target.start, value);
        } else {
          eval(*target.value);
        }
        return;
      }
      case ExprKind::Subscript: {
        int op = add_op(OpKind::SubscriptWrite, target.start);
        link(eval(*target.value), op, EdgeRole::Target);
        link(eval(*target.index), op, EdgeRole::Key);
        link(value, op, EdgeRole::Value);
        if (auto name = dotted(*target.value)) {
          define(*name, target.value->start, op);
        }
        return;
      }
      case ExprKind::Tuple:
      case ExprKind::List: {
        int op = add_op(OpKind::Assign, target.start);
        link(value, op, EdgeRole::Target);
        for (const auto& item : target.items) bind(*item, op);
        return;
      }
      case ExprKind::Starred:
        bind(*target.value, value);
        return;
      default:
        unsupported(target, "assignment target");
        return;
    }
  }

  void walk(const std::vector<py::StmtPtr>& body) {
    for (const auto& s : body) statement(*s);
  }

  void walk_from(const std::vector<py::StmtPtr>& body, const Env& start,
                 Env& out) {
    env_ = start;
    walk(body);
    join(out, env_);
  }

  // Runs a loop body once, then adds back edges from definitions made inside
  // the loop to uses that precede them in source order.
  template <typename Body>
  void loop(Body body) {
    size_t first_use = uses_.size();
    int first_node = g_.nodes().empty() ? 0 : g_.nodes().rbegin()->first + 1;
    Env before = env_;
    body();
    for (size_t i = first_use; i < uses_.size(); ++i) {
      const auto& [node, name] = uses_[i];
      auto it = env_.find(name);
      if (it == env_.end()) continue;
      for (int def : it->second) {
        if (def >= first_node && def > node) {
          g_.add_edge({def, node, EdgeRole::Flow, g_.node(node).statement_id});
        }
      }
    }
    join(env_, before);
  }

  void statement(const Stmt& s) {
    stmt_ = s.id;
    switch (s.kind) {
      case StmtKind::Expr:
      case StmtKind::Raise:
        if (s.value) eval(*s.value);
        if (s.extra) eval(*s.extra);
        break;
      case StmtKind::Assert:
        eval(*s.value);
        if (s.extra) eval(*s.extra);
        break;
      case StmtKind::Assign: {
        int value = eval(*s.value);
        for (const auto& t : s.targets) bind(*t, value);
        break;
      }
      case StmtKind::AnnAssign:
        bind(*s.targets[0], s.value ? eval(*s.value) : -1);
        break;
      case StmtKind::AugAssign: {
        int value = eval(*s.value);
        int current = eval(*s.targets[0]);
        int op = add_op(OpKind::AugAssign, s.targets[0]->start, s.op);
        link(current, op, EdgeRole::Operand);
        link(value, op, EdgeRole::Operand);
        bind(*s.targets[0], op);
        break;
      }
      case StmtKind::Return:
        if (return_node_ >= 0) {
          int value = s.value ? eval(*s.value) : add_type("None", s.start);
          link(value, return_node_, EdgeRole::Flow);
        }
        break;
      case StmtKind::If:
        statement_if(s);
        break;
      case StmtKind::While:
        loop([&] {
          stmt_ = s.id;
          eval(*s.clauses[0].test);
          walk(s.clauses[0].body);
        });
        if (s.clauses.size() > 1) walk(s.clauses[1].body);
        break;
      case StmtKind::For: {
        int iter = eval(*s.value);
        int it = add_op(OpKind::Iteration, s.value->start);
        link(iter, it, EdgeRole::Operand);
        loop([&] {
          stmt_ = s.id;
          bind(*s.targets[0], it);
          walk(s.clauses[0].body);
        });
        if (s.clauses.size() > 1) walk(s.clauses[1].body);
        break;
      }
      case StmtKind::With:
        for (const auto& item : s.with_items) {
          int ctx = eval(*item.context);
          if (item.target) bind(*item.target, ctx);
        }
        walk(s.clauses[0].body);
        break;
      case StmtKind::Try:
        statement_try(s);
        break;
      case StmtKind::Delete:
      case StmtKind::Pass:
      case StmtKind::Break:
      case StmtKind::Continue:
      case StmtKind::Global:
      case StmtKind::Nonlocal:
      case StmtKind::Import:
      case StmtKind::ImportFrom:
      case StmtKind::FunctionDef:
      case StmtKind::ClassDef:
        break;
    }
  }

  void statement_if(const Stmt& s) {
    Env start = env_;
    Env out;
    bool has_else = false;
    for (const auto& clause : s.clauses) {
      env_ = start;
      stmt_ = s.id;
      if (clause.test) {
        eval(*clause.test);
        start = env_;
      } else {
        has_else = true;
      }
      walk_from(clause.body, start, out);
    }
    if (!has_else) join(out, start);
    env_ = std::move(out);
  }

  void statement_try(const Stmt& s) {
    Env before = env_;
    walk(s.clauses[0].body);
    Env after_body = env_;
    Env handler_start = before;
    join(handler_start, after_body);

    Env out;
    const py::Clause* finally = nullptr;
    bool has_else = false;
    for (size_t i = 1; i < s.clauses.size(); ++i) {
      const py::Clause& c = s.clauses[i];
      if (c.kind == py::ClauseKind::Except) {
        env_ = handler_start;
        stmt_ = s.id;
        int type = c.test ? eval(*c.test) : -1;
        if (!c.name.empty()) define(c.name, c.name_loc, type);
        walk(c.body);
        join(out, env_);
      } else if (c.kind == py::ClauseKind::Else) {
        has_else = true;
        walk_from(c.body, after_body, out);
      } else if (c.kind == py::ClauseKind::Finally) {
        finally = &c;
      }
    }
    if (!has_else) join(out, after_body);
    env_ = std::move(out);
    if (finally != nullptr) walk(finally->body);
  }

  const SourceModule& m_;
  TypeDependencyGraph g_;
  Env env_;
  std::vector<std::pair<int, std::string>> uses_;
  int stmt_ = -1;
  int return_node_ = -1;
};

}  // namespace

TypeDependencyGraph build_tdg(const SourceModule& m, std::string_view function) {
  if (function.empty()) return Builder(m).build_module();
  const FunctionInfo* fn = m.find_function(function);
  if (fn == nullptr) {
    throw TargetNotFound("no function named " + std::string(function));
  }
  return Builder(m).build_function(*fn);
}

}  // namespace typegen
