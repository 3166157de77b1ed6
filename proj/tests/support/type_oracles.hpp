#pragma once

// Random type-annotation strings and a naive report scorer shared by the unit
// tests and the acceptance suite.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "typegen/eval.hpp"

namespace typegen::testing {

// A well-formed annotation in one of several spellings: typing-prefixed or
// bare, capitalized aliases or builtins, Optional/Union/`|`, user classes.
inline std::string random_type(std::mt19937_64& rng, int depth = 0) {
  static const std::vector<std::string> kAtoms = {
      "int", "str", "float", "bool", "None", "bytes", "Any", "Foo", "pkg.Bar", "Path"};
  static const std::vector<std::pair<std::string, int>> kGenerics = {
      {"List", 1},  {"list", 1},     {"typing.List", 1}, {"Dict", 2},  {"dict", 2},
      {"Set", 1},   {"set", 1},      {"Tuple", 2},       {"tuple", 1}, {"Optional", 1},
      {"Union", 2}, {"Union", 3},    {"Iterable", 1},    {"Type", 1},  {"Box", 1},
      {"typing.Dict", 2}, {"FrozenSet", 1}};
  auto pick = [&](size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); };
  int roll = std::uniform_int_distribution<int>(0, 9)(rng);
  if (depth >= 3 || roll < 4) return kAtoms[pick(kAtoms.size())];
  if (roll == 4) return random_type(rng, depth + 1) + " | " + random_type(rng, depth + 1);
  if (roll == 5) {
    return "Callable[[" + random_type(rng, depth + 1) + "], " + random_type(rng, depth + 1) + "]";
  }
  if (roll == 6) return "Tuple[" + random_type(rng, depth + 1) + ", ...]";
  const auto& [name, arity] = kGenerics[pick(kGenerics.size())];
  std::string out = name + "[";
  for (int i = 0; i < arity; ++i) {
    if (i > 0) out += pick(2) ? ", " : ",";
    out += random_type(rng, depth + 1);
  }
  return out + "]";
}

// Straightforward per-cell recount: for every cell, walk the whole dataset,
// keep targets in that cell and ask whether any of the first k predictions
// matches.
inline EvalReport naive_report(const std::vector<DatasetRecord>& dataset,
                               const std::vector<PredictionRecord>& predictions,
                               bool strict_text = false) {
  TypeParseOptions parse{!strict_text};
  EvalReport report;
  for (int v = 0; v < 4; ++v) {
    for (int t = 0; t < 4; ++t) {
      EvalCell& cell = report.cells[v][t];
      for (const auto& r : dataset) {
        if (v != 3 && static_cast<int>(r.kind) != v) continue;
        if (t != 3 && static_cast<int>(categorize_type(parse_type(r.annotation))) != t) continue;
        ++cell.total;
        const std::vector<std::string>* ranked = nullptr;
        for (const auto& p : predictions) {
          if (p.id == r.id) ranked = &p.ranked;
        }
        for (size_t k = 0; k < kTopK.size(); ++k) {
          bool em = false, mtp = false;
          for (int i = 0; ranked && i < kTopK[k] && i < static_cast<int>(ranked->size()); ++i) {
            auto pred = parse_type((*ranked)[i], parse);
            auto gt = parse_type(r.annotation, parse);
            em = em || pred.canonical_text() == gt.canonical_text();
            mtp = mtp || pred.constructor == gt.constructor;
          }
          cell.em[k] += em;
          cell.mtp[k] += mtp;
        }
      }
    }
  }
  return report;
}

// Random dataset with random predictions drawn partly from the ground truth.
inline std::pair<std::vector<DatasetRecord>, std::vector<PredictionRecord>>
random_eval_set(std::mt19937_64& rng) {
  std::vector<DatasetRecord> dataset;
  std::vector<PredictionRecord> predictions;
  int n = std::uniform_int_distribution<int>(0, 40)(rng);
  for (int i = 0; i < n; ++i) {
    DatasetRecord r;
    r.id = "t" + std::to_string(i);
    r.file = "f.py";
    r.kind = static_cast<VarCategory>(std::uniform_int_distribution<int>(0, 2)(rng));
    r.name = "x";
    r.line = i + 1;
    r.annotation = random_type(rng);
    int roll = std::uniform_int_distribution<int>(0, 9)(rng);
    if (roll > 0) {
      PredictionRecord p{r.id, {}};
      int len = std::uniform_int_distribution<int>(0, 6)(rng);
      for (int j = 0; j < len; ++j) {
        p.ranked.push_back(std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? r.annotation
                                                                              : random_type(rng));
      }
      predictions.push_back(std::move(p));
    }
    dataset.push_back(std::move(r));
  }
  std::shuffle(predictions.begin(), predictions.end(), rng);
  return {dataset, predictions};
}

}  // namespace typegen::testing
