#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "typegen/tdg.hpp"

namespace typegen {

/// Chain-of-thought text. Steps carry their ordinal ("1. ...") and, like the
/// conclusion, no final period; `rendered` adds the periods.
struct CotPrompt {
  std::vector<std::string> steps;
  std::string conclusion;
  std::string rendered;
};

/// Phrase standing for an operation inside a sentence: "a dict",
/// "a + operation", "open", "the attribute name".
std::string op_phrase(OpKind op, std::string_view detail);
std::string op_phrase(const TdgNode& op);

/// "variable x", "return value of f" or "argument p".
std::string target_noun(const TargetVariable& target);

/// "Therefore, the type of the <noun> is `T`" (without the final period).
std::string conclusion_sentence(const TargetVariable& target,
                                std::string_view type);

std::string render_cot(const std::vector<std::string>& steps,
                       const std::string& conclusion);

/// One sentence per sliced edge for variables and return values, ordered by
/// hop and then source position; a usage sentence and a naming sentence for
/// arguments. The conclusion quotes `annotated_type` in backticks.
CotPrompt generate_cot(const SlicedTDG& s, const TargetVariable& target,
                       const std::string& annotated_type);

}  // namespace typegen
