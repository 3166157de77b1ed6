#include "typegen/prompting.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

#include "typegen/error.hpp"
#include "typegen/eval.hpp"
#include "typegen/llm.hpp"

namespace typegen {

namespace {

std::string render_section(const PromptSection& s, bool is_target) {
  std::string out = "Python code:\n" + s.slice + "\n";
  if (!s.hint.empty()) out += s.hint + "\n";
  out += s.question + "\n";
  out += is_target ? "A:" : "A: " + s.cot;
  return out;
}

std::string render(const InputPrompt& p) {
  std::string out;
  if (!p.preamble.empty()) out += p.preamble + "\n\n";
  for (const auto& e : p.examples) out += render_section(e, false) + "\n\n";
  return out + render_section(p.target, true);
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Content of the last `quote ... quote` pair on a single line.
std::optional<std::string> last_span(std::string_view text, char quote) {
  std::optional<std::string> found;
  size_t pos = 0;
  while (true) {
    size_t open = text.find(quote, pos);
    if (open == std::string_view::npos) break;
    size_t close = text.find(quote, open + 1);
    if (close == std::string_view::npos) break;
    std::string_view inner = text.substr(open + 1, close - open - 1);
    if (inner.find('\n') == std::string_view::npos && !trim(inner).empty()) {
      found = trim(inner);
      pos = close + 1;
    } else {
      pos = open + 1;
    }
  }
  return found;
}

}  // namespace

VarCategory var_category(TargetKind kind) {
  switch (kind) {
    case TargetKind::Argument: return VarCategory::Arg;
    case TargetKind::ReturnValue: return VarCategory::Ret;
    case TargetKind::LocalVariable:
    case TargetKind::GlobalVariable:
      break;
  }
  return VarCategory::Var;
}

std::string question_line(VarCategory kind, std::string_view name) {
  std::string noun = kind == VarCategory::Arg   ? "argument "
                     : kind == VarCategory::Ret ? "return value of "
                                                : "variable ";
  return "Q: What is the type of the " + noun + std::string(name) + "? " +
         std::string(kQuestionSuffix);
}

InputPrompt assemble_prompt(const std::vector<ScoredExample>& examples,
                            const std::string& target_slice, const std::string& target_hint,
                            VarCategory target_kind, const std::string& target_name,
                            long token_budget) {
  InputPrompt p;
  p.target = {target_slice, target_hint, question_line(target_kind, target_name), ""};
  for (const auto& ex : examples) {
    const ExampleRecord& r = *ex.record;
    p.examples.push_back({r.slice, r.hint, question_line(r.kind, r.target_name), r.cot});
    p.example_ids.push_back(r.id);
  }
  while (true) {
    p.preamble = p.examples.empty() ? "" : std::string(kPreamble);
    p.rendered = render(p);
    p.estimated_tokens = estimate_tokens(p.rendered);
    if (p.estimated_tokens <= token_budget) return p;
    if (p.examples.size() <= 1) {
      throw ContextOverflow("prompt for " + target_name + " needs about " +
                                std::to_string(p.estimated_tokens) + " tokens, budget is " +
                                std::to_string(token_budget),
                            p.estimated_tokens, token_budget);
    }
    p.examples.erase(p.examples.begin());
    p.example_ids.erase(p.example_ids.begin());
    ++p.dropped_examples;
  }
}

std::vector<std::string> extract_predictions(std::string_view generation) {
  // A model that keeps going invents the next example; only the first answer counts.
  size_t cut = generation.find("Python code:");
  std::string_view text = generation.substr(0, cut);

  if (auto span = last_span(text, '`')) return {*span};
  if (auto span = last_span(text, '\'')) return {*span};

  std::string body = trim(text);
  size_t line_start = body.rfind('\n');
  std::string last = line_start == std::string::npos ? body : body.substr(line_start + 1);
  size_t is = last.rfind(" is ");
  if (is == std::string::npos) return {};
  std::string tail = trim(std::string_view(last).substr(is + 4));
  while (!tail.empty() && (tail.back() == '.' || tail.back() == ',')) tail.pop_back();
  tail = trim(tail);
  if (tail.empty()) return {};
  return {tail};
}

PredictionSet rank_samples(const std::vector<std::string>& samples, int top_k, bool normalize) {
  PredictionSet out;
  out.samples_used = static_cast<int>(samples.size());
  std::vector<std::pair<std::string, int>> counts;  // first-seen order
  std::map<std::string, size_t> position;
  for (const auto& s : samples) {
    auto preds = extract_predictions(s);
    if (preds.empty()) continue;
    std::string key = canonical_type(preds.back(), {normalize});
    auto [it, inserted] = position.emplace(key, counts.size());
    if (inserted) counts.emplace_back(key, 0);
    ++counts[it->second].second;
  }
  std::stable_sort(counts.begin(), counts.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (static_cast<int>(counts.size()) > top_k) counts.resize(static_cast<size_t>(std::max(0, top_k)));
  out.ranked = std::move(counts);
  return out;
}

}  // namespace typegen
