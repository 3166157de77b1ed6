#include "typegen/frontend/source_module.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "typegen/error.hpp"

namespace typegen {

namespace {
constexpr int kModuleScope = -1;
constexpr int kClassScope = -2;
}  // namespace

SourceModule::SourceModule(std::filesystem::path path, std::string text,
                           std::unique_ptr<py::ModuleAst> ast)
    : path_(std::move(path)), text_(std::move(text)), ast_(std::move(ast)) {
  size_t begin = 0;
  while (begin <= text_.size()) {
    size_t nl = text_.find('\n', begin);
    size_t stop = nl == std::string::npos ? text_.size() : nl;
    size_t len = stop - begin;
    if (len > 0 && text_[stop - 1] == '\r') --len;
    line_offsets_.push_back(begin);
    line_lengths_.push_back(len);
    if (nl == std::string::npos) break;
    begin = nl + 1;
  }
  if (line_offsets_.size() > 1 && line_lengths_.back() == 0 &&
      text_.back() == '\n') {
    line_offsets_.pop_back();
    line_lengths_.pop_back();
  }
  index(ast_->body, -1, -1, 0, "", kModuleScope);
  for (size_t i = 0; i < statements_.size(); ++i) {
    int f = function_of_statement_[i];
    if (f >= 0) functions_[static_cast<size_t>(f)].body.push_back(static_cast<int>(i));
  }
  for (const auto& info : statements_) {
    for (const auto& rec : info.node->imports) imports_.push_back(rec);
  }
}

void SourceModule::index(std::vector<py::StmtPtr>& body, int parent,
                         int clause, int depth, const std::string& prefix,
                         int scope) {
  for (const auto& stmt : body) {
    int id = static_cast<int>(statements_.size());
    stmt->id = id;
    StatementInfo info;
    info.id = id;
    info.start_line = stmt->start.line;
    info.end_line = stmt->end.line;
    info.header_end_line = stmt->header_end.line;
    info.kind = stmt->kind;
    info.parent = parent;
    info.clause = clause;
    info.depth = depth;
    info.node = stmt.get();
    statements_.push_back(info);
    function_of_statement_.push_back(scope);

    if (stmt->kind == py::StmtKind::FunctionDef) {
      FunctionInfo fn;
      fn.qualified_name = prefix + stmt->name;
      for (const auto& p : stmt->params) fn.arguments.push_back(p.name);
      fn.statement_id = id;
      fn.node = stmt.get();
      int fn_index = static_cast<int>(functions_.size());
      functions_.push_back(std::move(fn));
      index(stmt->clauses[0].body, id, 0, depth + 1,
            prefix + stmt->name + ".", fn_index);
      continue;
    }
    if (stmt->kind == py::StmtKind::ClassDef) {
      classes_.push_back({stmt->name, prefix + stmt->name, id});
      index(stmt->clauses[0].body, id, 0, depth + 1,
            prefix + stmt->name + ".", kClassScope);
      continue;
    }
    for (size_t c = 0; c < stmt->clauses.size(); ++c) {
      index(stmt->clauses[c].body, id, static_cast<int>(c), depth + 1, prefix,
            scope);
    }
  }
}

const StatementInfo& SourceModule::statement(int id) const {
  if (id < 0 || id >= static_cast<int>(statements_.size())) {
    throw InputError("statement id out of range: " + std::to_string(id));
  }
  return statements_[static_cast<size_t>(id)];
}

const FunctionInfo* SourceModule::find_function(
    std::string_view qualified_name) const {
  for (const auto& fn : functions_) {
    if (fn.qualified_name == qualified_name) return &fn;
  }
  return nullptr;
}

const FunctionInfo* SourceModule::enclosing_function(int id) const {
  int f = function_of_statement_.at(static_cast<size_t>(id));
  return f >= 0 ? &functions_[static_cast<size_t>(f)] : nullptr;
}

std::vector<int> SourceModule::statements_at_line(int line) const {
  std::vector<int> out;
  for (const auto& s : statements_) {
    if (s.start_line <= line && line <= s.end_line) out.push_back(s.id);
  }
  return out;
}

std::string_view SourceModule::line(int n) const {
  if (n < 1 || n > line_count()) return {};
  auto i = static_cast<size_t>(n - 1);
  return std::string_view(text_).substr(line_offsets_[i], line_lengths_[i]);
}

std::string SourceModule::text_between(Location start, Location end) const {
  auto offset = [&](Location loc) {
    size_t li = static_cast<size_t>(std::max(loc.line, 1) - 1);
    if (li >= line_offsets_.size()) return text_.size();
    return std::min(line_offsets_[li] + static_cast<size_t>(loc.column),
                    text_.size());
  };
  size_t a = offset(start);
  size_t b = offset(end);
  if (b < a) return {};
  std::string out = text_.substr(a, b - a);
  out.erase(std::remove(out.begin(), out.end(), '\r'), out.end());
  return out;
}

std::string SourceModule::statement_text(int id) const {
  const py::Stmt& s = *statement(id).node;
  if (s.clauses.empty()) return text_between(s.start, s.end);
  return text_between(s.start, s.header_end);
}

std::string SourceModule::clause_header_text(int id, int clause) const {
  const py::Stmt& s = *statement(id).node;
  const py::Clause& c = s.clauses.at(static_cast<size_t>(clause));
  return text_between(c.start, c.header_end);
}

SourceModule parse_module(std::string text, std::filesystem::path path) {
  auto ast = py::parse(text);
  return SourceModule(std::move(path), std::move(text), std::move(ast));
}

SourceModule load_module(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_module(ss.str(), path);
}

std::vector<ImportRecord> collect_imports(const SourceModule& m) {
  return m.imports();
}

const char* to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::Argument: return "Argument";
    case TargetKind::ReturnValue: return "ReturnValue";
    case TargetKind::LocalVariable: return "LocalVariable";
    case TargetKind::GlobalVariable: return "GlobalVariable";
  }
  return "?";
}

const char* dataset_kind(TargetKind kind) {
  switch (kind) {
    case TargetKind::Argument: return "arg";
    case TargetKind::ReturnValue: return "ret";
    default: return "var";
  }
}

namespace {

void collect_assigned_names(const py::Expr& target,
                            std::vector<const py::Expr*>& out) {
  switch (target.kind) {
    case py::ExprKind::Name:
      out.push_back(&target);
      break;
    case py::ExprKind::Tuple:
    case py::ExprKind::List:
      for (const auto& item : target.items) collect_assigned_names(*item, out);
      break;
    case py::ExprKind::Starred:
      collect_assigned_names(*target.value, out);
      break;
    default:
      break;
  }
}

bool in_class_body(const SourceModule& m, const StatementInfo& info) {
  return info.parent >= 0 &&
         m.statement(info.parent).kind == py::StmtKind::ClassDef;
}

}  // namespace

std::vector<TargetVariable> enumerate_targets(const SourceModule& m,
                                              TargetMode mode) {
  const bool all = mode == TargetMode::All;
  std::vector<TargetVariable> out;
  auto annotation_of = [&](const py::ExprPtr& e) -> std::optional<std::string> {
    if (!e) return std::nullopt;
    return m.text_between(e->start, e->end);
  };

  for (const auto& fn : m.functions()) {
    const py::Stmt& def = *fn.node;
    bool method = in_class_body(m, m.statement(fn.statement_id));
    for (size_t i = 0; i < def.params.size(); ++i) {
      const py::Param& p = def.params[i];
      if (!p.annotation && !all) continue;
      if (!p.annotation && method && i == 0 &&
          (p.name == "self" || p.name == "cls")) {
        continue;
      }
      out.push_back({TargetKind::Argument, p.name, fn.qualified_name, p.loc,
                     annotation_of(p.annotation)});
    }
    if (def.returns || all) {
      out.push_back({TargetKind::ReturnValue, def.name, fn.qualified_name,
                     def.returns_loc, annotation_of(def.returns)});
    }
  }

  // Variables: every annotated assignment; with mode=All also the first
  // plain binding of each name per scope.
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& info : m.statements()) {
    const py::Stmt& s = *info.node;
    if (in_class_body(m, info)) continue;
    const FunctionInfo* fn = m.enclosing_function(info.id);
    std::string scope = fn != nullptr ? fn->qualified_name : "";
    TargetKind kind =
        fn != nullptr ? TargetKind::LocalVariable : TargetKind::GlobalVariable;
    auto add = [&](const py::Expr& name_expr, std::optional<std::string> ann) {
      bool first = seen.insert({scope, name_expr.name}).second;
      if (!ann && !(all && first)) return;
      TargetVariable t{kind, name_expr.name, std::nullopt, name_expr.start,
                       std::move(ann)};
      if (fn != nullptr) t.enclosing_function = fn->qualified_name;
      out.push_back(std::move(t));
    };
    std::vector<const py::Expr*> names;
    switch (s.kind) {
      case py::StmtKind::AnnAssign:
        if (s.targets[0]->kind == py::ExprKind::Name) {
          add(*s.targets[0], annotation_of(s.annotation));
        }
        break;
      case py::StmtKind::Assign:
        for (const auto& t : s.targets) collect_assigned_names(*t, names);
        break;
      case py::StmtKind::For:
        collect_assigned_names(*s.targets[0], names);
        break;
      case py::StmtKind::With:
        for (const auto& item : s.with_items) {
          if (item.target) collect_assigned_names(*item.target, names);
        }
        break;
      default:
        break;
    }
    for (const py::Expr* n : names) add(*n, std::nullopt);
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const TargetVariable& a, const TargetVariable& b) {
                     return a.location < b.location;
                   });
  return out;
}

}  // namespace typegen
