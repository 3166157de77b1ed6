#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "typegen/frontend/ast.hpp"

namespace typegen {

using py::ImportRecord;
using py::Location;

/// One row of the statement table. Ids are assigned in source pre-order, so
/// sorting by id is sorting by position.
struct StatementInfo {
  int id = -1;
  int start_line = 0;
  int end_line = 0;
  /// Last line of the header for compound statements; end_line otherwise.
  int header_end_line = 0;
  py::StmtKind kind = py::StmtKind::Pass;
  /// Enclosing compound statement (-1 at module level) and which of its
  /// clauses holds this statement.
  int parent = -1;
  int clause = -1;
  int depth = 0;
  const py::Stmt* node = nullptr;
};

struct FunctionInfo {
  std::string qualified_name;
  std::vector<std::string> arguments;
  /// Statements of the function's own scope: nested function and class
  /// bodies are excluded.
  std::vector<int> body;
  int statement_id = -1;
  const py::Stmt* node = nullptr;
};

struct ClassInfo {
  std::string name;
  std::string qualified_name;
  int statement_id = -1;
};

/// A parsed Python file. Immutable after construction and safe to share
/// between threads.
class SourceModule {
 public:
  SourceModule(std::filesystem::path path, std::string text,
               std::unique_ptr<py::ModuleAst> ast);

  const std::filesystem::path& path() const { return path_; }
  const std::string& text() const { return text_; }
  const py::ModuleAst& ast() const { return *ast_; }
  const std::vector<StatementInfo>& statements() const { return statements_; }
  const std::vector<FunctionInfo>& functions() const { return functions_; }
  const std::vector<ClassInfo>& classes() const { return classes_; }
  const std::vector<ImportRecord>& imports() const { return imports_; }

  const StatementInfo& statement(int id) const;
  const FunctionInfo* find_function(std::string_view qualified_name) const;
  /// The function whose own scope contains statement `id`, if any.
  const FunctionInfo* enclosing_function(int id) const;
  /// Ids of the statements whose span covers `line`, outermost first.
  std::vector<int> statements_at_line(int line) const;

  int line_count() const { return static_cast<int>(line_offsets_.size()); }
  /// 1-based physical line without its terminator.
  std::string_view line(int n) const;
  /// Exact source text between two positions (end exclusive).
  std::string text_between(Location start, Location end) const;
  /// Source of a statement from its first token to its last token. Compound
  /// statements yield only their first header (up to and including ':').
  std::string statement_text(int id) const;
  /// Source of one clause header of a compound statement.
  std::string clause_header_text(int id, int clause) const;

 private:
  void index(std::vector<py::StmtPtr>& body, int parent, int clause,
             int depth, const std::string& scope_prefix, int function_index);

  std::filesystem::path path_;
  std::string text_;
  std::vector<size_t> line_offsets_;
  std::vector<size_t> line_lengths_;
  std::shared_ptr<py::ModuleAst> ast_;
  std::vector<StatementInfo> statements_;
  std::vector<int> function_of_statement_;
  std::vector<FunctionInfo> functions_;
  std::vector<ClassInfo> classes_;
  std::vector<ImportRecord> imports_;
};

/// Parses source text. Throws SyntaxError with the offending line/column.
SourceModule parse_module(std::string text, std::filesystem::path path = {});

/// Reads and parses a file. Throws InputError when unreadable.
SourceModule load_module(const std::filesystem::path& path);

std::vector<ImportRecord> collect_imports(const SourceModule& m);

enum class TargetKind { Argument, ReturnValue, LocalVariable, GlobalVariable };

const char* to_string(TargetKind kind);
/// "arg" / "ret" / "var" as used by the dataset format.
const char* dataset_kind(TargetKind kind);

struct TargetVariable {
  TargetKind kind = TargetKind::LocalVariable;
  /// Identifier; for return values the function's (unqualified) name.
  std::string name;
  std::optional<std::string> enclosing_function;
  Location location;
  std::optional<std::string> annotation;

  bool operator==(const TargetVariable&) const = default;
};

enum class TargetMode { AnnotatedOnly, All };

/// Targets ordered by (line, column). In AnnotatedOnly mode every target
/// carries the annotation text as written in the source.
std::vector<TargetVariable> enumerate_targets(const SourceModule& m,
                                              TargetMode mode);

}  // namespace typegen
