#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "typegen/frontend/source_module.hpp"
#include "typegen/retrieval.hpp"

namespace typegen {

/// Wording shared by every prompt.
inline constexpr std::string_view kPreamble =
    "Infer the type of the target in the last Python code snippet, reasoning step by "
    "step like the worked examples.";
inline constexpr std::string_view kQuestionSuffix =
    "Provide your reasoning steps and conclude with the type in backquotes.";

/// "Q: What is the type of the variable x? Provide ..." without a newline.
std::string question_line(VarCategory kind, std::string_view name);
VarCategory var_category(TargetKind kind);

struct PromptSection {
  std::string slice;
  std::string hint;
  std::string question;
  std::string cot;  // empty for the target section
};

struct InputPrompt {
  std::string preamble;  // empty in zero-shot prompts
  std::vector<PromptSection> examples;
  std::vector<std::string> example_ids;
  PromptSection target;
  std::string rendered;
  long estimated_tokens = 0;
  int dropped_examples = 0;
};

/// Lays out `examples` (already ordered least similar first) followed by the
/// target. When the estimate exceeds `token_budget`, the least similar
/// examples are dropped one at a time, keeping at least one; ContextOverflow
/// if it still does not fit.
InputPrompt assemble_prompt(const std::vector<ScoredExample>& examples,
                            const std::string& target_slice, const std::string& target_hint,
                            VarCategory target_kind, const std::string& target_name,
                            long token_budget);

/// The predicted type of one generation: the last backtick span (after
/// cutting the text where a following "Python code:" section starts), else
/// the last single-quoted span, else whatever follows the final " is " of the
/// last line. Empty when nothing matches.
std::vector<std::string> extract_predictions(std::string_view generation);

struct PredictionSet {
  std::vector<std::pair<std::string, int>> ranked;  // (type, occurrences)
  int samples_used = 0;

  bool operator==(const PredictionSet& other) const = default;
};

/// Counts the canonical form of each sample's prediction and keeps the
/// `top_k` most frequent; ties go to the type seen first.
PredictionSet rank_samples(const std::vector<std::string>& samples, int top_k = 5,
                           bool normalize = true);

}  // namespace typegen
