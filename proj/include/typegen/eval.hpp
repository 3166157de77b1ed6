#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace typegen {

/// A parsed type annotation. Bracket lists inside a subscript (the parameter
/// list of `Callable[[int], str]`) use the constructor "[]"; the empty tuple
/// `()` uses "()". Anything the grammar rejects is kept as an opaque atom
/// holding the trimmed input.
struct TypeExpr {
  std::string constructor;
  std::vector<TypeExpr> args;
  bool opaque = false;

  std::string canonical_text() const;
  bool operator==(const TypeExpr& other) const = default;
};

struct TypeParseOptions {
  /// Strip `typing.`, lower the capitalized aliases, expand Optional and
  /// `|` into a sorted, flattened Union. Off means the text is only parsed.
  bool normalize = true;
};

TypeExpr parse_type(std::string_view text, TypeParseOptions options = {});

/// Canonical text of a type string; shorthand for parse_type(text).canonical_text().
std::string canonical_type(std::string_view text, TypeParseOptions options = {});

bool exact_match(const TypeExpr& pred, const TypeExpr& gt);
bool match_to_parametric(const TypeExpr& pred, const TypeExpr& gt);

enum class TypeCategory { Ele, Gen, Usr };
enum class VarCategory { Arg, Ret, Var };

const char* to_string(TypeCategory c);
const char* to_string(VarCategory c);

/// Gen when the type has arguments or is a bare generic container, Usr when
/// the constructor is outside the builtin and typing vocabulary, else Ele.
TypeCategory categorize_type(const TypeExpr& t);

/// One annotated target of an evaluation dataset.
struct DatasetRecord {
  std::string id;
  std::string file;
  VarCategory kind = VarCategory::Var;
  std::string name;
  std::string function;
  int line = 0;
  std::string annotation;

  bool operator==(const DatasetRecord& other) const = default;
};

/// Ranked type strings for one target, best first.
struct PredictionRecord {
  std::string id;
  std::vector<std::string> ranked;

  bool operator==(const PredictionRecord& other) const = default;
};

VarCategory parse_var_category(std::string_view s);  // "arg" | "ret" | "var"
const char* dataset_kind(VarCategory c);             // inverse of the above

std::vector<DatasetRecord> read_dataset(const std::string& path);
std::vector<DatasetRecord> parse_dataset(const std::string& jsonl);
std::string dataset_to_jsonl(const std::vector<DatasetRecord>& records);

std::vector<PredictionRecord> read_predictions(const std::string& path);
std::vector<PredictionRecord> parse_predictions(const std::string& jsonl);
std::string predictions_to_jsonl(const std::vector<PredictionRecord>& records);

inline constexpr std::array<int, 3> kTopK = {1, 3, 5};

struct EvalCell {
  std::array<int, 3> em{};   // indexed like kTopK
  std::array<int, 3> mtp{};
  int total = 0;

  bool operator==(const EvalCell& other) const = default;
};

/// Rows are variable categories (Arg, Ret, Var, All), columns type categories
/// (Ele, Gen, Usr, All). Index 3 is "All" on both axes.
struct EvalReport {
  std::array<std::array<EvalCell, 4>, 4> cells{};

  const EvalCell& cell(int var, int type) const { return cells[var][type]; }
  std::string to_text() const;
  std::string to_json() const;
  bool operator==(const EvalReport& other) const = default;
};

struct EvalOptions {
  /// Compare annotation text as written (after trimming) instead of the
  /// normalized form.
  bool strict_text = false;
};

/// Scores every dataset record against its predictions; records without
/// predictions count as misses. Throws UnknownTargetId for a prediction id
/// missing from the dataset.
EvalReport evaluate(const std::vector<DatasetRecord>& dataset,
                    const std::vector<PredictionRecord>& predictions,
                    EvalOptions options = {});

}  // namespace typegen
