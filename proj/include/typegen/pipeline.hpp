#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "typegen/eval.hpp"
#include "typegen/hints.hpp"
#include "typegen/llm.hpp"
#include "typegen/prompting.hpp"
#include "typegen/retrieval.hpp"
#include "typegen/slicer.hpp"

namespace typegen {

/// Settings for one end-to-end run. The defaults are the evaluation settings
/// the tool was designed around.
struct RunConfig {
  int max_hop = 3;
  int shots = 5;
  int n_samples = 50;
  double temperature = 1.0;
  int top_k = 5;
  int hint_cap = 50;
  long token_budget = 3584;
  int max_new_tokens = 256;
  bool flat_slices = false;
  bool qualified_hints = false;
  bool strict_text = false;
  /// Leave the target's own annotation in its code slice.
  bool keep_annotations = false;
  std::vector<std::string> fixed_examples;
  unsigned seed = 0;
  int workers = 4;
  BackendConfig backend;
  std::filesystem::path project_root;  // empty: the dataset's directory
};

/// Finds the target a dataset record describes: same kind, name and
/// enclosing function, on the recorded line. Arguments and return values
/// fall back to the only candidate when the line differs. Throws
/// TargetNotFound.
TargetVariable locate_target(const SourceModule& m, const DatasetRecord& record);

/// Target named by a `FILE:LINE:NAME` locator: the one defined on that line,
/// with `kind` choosing between e.g. an argument and a variable of the same
/// name. Throws TargetNotFound.
TargetVariable locate_target(const SourceModule& m, int line, const std::string& name,
                             std::optional<TargetKind> kind = std::nullopt);

/// Source text with the target's own annotation removed (": T" of a
/// parameter or variable, "-> T" of a function). Other annotations stay.
/// Multi-line annotations are left in place so line numbers do not move.
std::string mask_target_annotation(const SourceModule& m, const TargetVariable& target);

/// Everything computed from the source for one target.
struct PreparedTarget {
  TargetVariable target;
  SlicedTDG sliced;
  CodeSlice slice;
  std::string hint;
};

PreparedTarget prepare_target(const SourceModule& m, const TargetVariable& target,
                              const std::filesystem::path& project_root,
                              const TypeDatabase& db, const RunConfig& config);

/// Turns annotated training targets into worked examples. Files are resolved
/// against `base_dir`; records whose file or target cannot be processed are
/// logged and skipped.
std::vector<ExampleRecord> build_examples(const std::vector<DatasetRecord>& train,
                                          const std::filesystem::path& base_dir,
                                          const TypeDatabase& db, const RunConfig& config);

/// The prompt for one dataset target. `index` may be null (zero-shot).
InputPrompt build_prompt(const SourceModule& m, const DatasetRecord& record,
                         const std::filesystem::path& project_root, const Bm25Index* index,
                         const TypeDatabase& db, const RunConfig& config);

/// Runs every dataset target through prompting, the backend and ranking on
/// `config.workers` threads. Output follows dataset order. Targets whose
/// source cannot be processed get an empty ranking and a warning; backend
/// errors abort the run.
std::vector<PredictionRecord> run_inference(const std::vector<DatasetRecord>& dataset,
                                            const std::filesystem::path& base_dir,
                                            const Bm25Index* index, const TypeDatabase& db,
                                            CompletionBackend& backend, const RunConfig& config);

/// Echo backend entries for a dataset: mock key -> ground-truth annotation.
std::map<std::string, std::string> echo_entries(const std::vector<DatasetRecord>& dataset);

}  // namespace typegen
