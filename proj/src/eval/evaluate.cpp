#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "typegen/error.hpp"
#include "typegen/eval.hpp"

namespace typegen {
namespace {

using nlohmann::json;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Calls fn(json, line_number) for each non-blank line.
template <typename Fn>
void for_each_json_line(const std::string& jsonl, Fn fn) {
  std::istringstream in(jsonl);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw InputError(fmt::format("line {}: invalid JSON: {}", number, e.what()));
    }
    if (!j.is_object()) throw InputError(fmt::format("line {}: expected an object", number));
    fn(j, number);
  }
}

std::string string_field(const json& j, const char* key, int line, bool required = true) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) throw InputError(fmt::format("line {}: missing field '{}'", line, key));
    return "";
  }
  if (!it->is_string()) {
    throw InputError(fmt::format("line {}: field '{}' must be a string", line, key));
  }
  return it->get<std::string>();
}

std::string percent(int count, int total) {
  if (total == 0) return "-";
  return fmt::format("{:.1f}", 100.0 * count / total);
}

// Index 3 on either axis is the "All" aggregate.
std::string var_label(int i) { return i == 3 ? "All" : to_string(static_cast<VarCategory>(i)); }
std::string type_label(int i) { return i == 3 ? "All" : to_string(static_cast<TypeCategory>(i)); }

}  // namespace

VarCategory parse_var_category(std::string_view s) {
  if (s == "arg") return VarCategory::Arg;
  if (s == "ret") return VarCategory::Ret;
  if (s == "var") return VarCategory::Var;
  throw InputError("unknown target kind '" + std::string(s) + "' (expected arg, ret or var)");
}

const char* dataset_kind(VarCategory c) {
  switch (c) {
    case VarCategory::Arg: return "arg";
    case VarCategory::Ret: return "ret";
    case VarCategory::Var: return "var";
  }
  return "var";
}

std::vector<DatasetRecord> parse_dataset(const std::string& jsonl) {
  std::vector<DatasetRecord> out;
  std::set<std::string> ids;
  for_each_json_line(jsonl, [&](const json& j, int line) {
    DatasetRecord r;
    r.id = string_field(j, "id", line);
    r.file = string_field(j, "file", line);
    try {
      r.kind = parse_var_category(string_field(j, "kind", line));
    } catch (const InputError& e) {
      throw InputError(fmt::format("line {}: {}", line, e.what()));
    }
    r.name = string_field(j, "name", line);
    r.function = string_field(j, "function", line, false);
    auto it = j.find("line");
    if (it == j.end() || !it->is_number_integer()) {
      throw InputError(fmt::format("line {}: field 'line' must be an integer", line));
    }
    r.line = it->get<int>();
    r.annotation = string_field(j, "annotation", line);
    if (!ids.insert(r.id).second) {
      throw InputError(fmt::format("line {}: duplicate id '{}'", line, r.id));
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<DatasetRecord> read_dataset(const std::string& path) {
  try {
    return parse_dataset(read_text(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string dataset_to_jsonl(const std::vector<DatasetRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json j = {{"id", r.id},     {"file", r.file},         {"kind", dataset_kind(r.kind)},
              {"name", r.name}, {"function", r.function}, {"line", r.line},
              {"annotation", r.annotation}};
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<PredictionRecord> parse_predictions(const std::string& jsonl) {
  std::vector<PredictionRecord> out;
  for_each_json_line(jsonl, [&](const json& j, int line) {
    PredictionRecord p;
    p.id = string_field(j, "id", line);
    auto it = j.find("ranked");
    if (it == j.end() || !it->is_array()) {
      throw InputError(fmt::format("line {}: field 'ranked' must be a list", line));
    }
    for (const auto& t : *it) {
      if (!t.is_string()) {
        throw InputError(fmt::format("line {}: 'ranked' must hold strings", line));
      }
      p.ranked.push_back(t.get<std::string>());
    }
    out.push_back(std::move(p));
  });
  return out;
}

std::vector<PredictionRecord> read_predictions(const std::string& path) {
  try {
    return parse_predictions(read_text(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string predictions_to_jsonl(const std::vector<PredictionRecord>& records) {
  std::string out;
  for (const auto& p : records) {
    out += json{{"id", p.id}, {"ranked", p.ranked}}.dump() + "\n";
  }
  return out;
}

EvalReport evaluate(const std::vector<DatasetRecord>& dataset,
                    const std::vector<PredictionRecord>& predictions,
                    EvalOptions options) {
  std::unordered_map<std::string, const PredictionRecord*> by_id;
  std::set<std::string> known;
  for (const auto& r : dataset) known.insert(r.id);
  for (const auto& p : predictions) {
    if (!known.count(p.id)) throw UnknownTargetId("prediction for unknown target id '" + p.id + "'");
    by_id[p.id] = &p;
  }

  TypeParseOptions parse{!options.strict_text};
  EvalReport report;
  for (const auto& r : dataset) {
    TypeExpr gt = parse_type(r.annotation, parse);
    // The category always comes from the normalized annotation so that
    // strict-text runs bucket targets the same way.
    int type_cat = static_cast<int>(categorize_type(parse_type(r.annotation)));
    int var_cat = static_cast<int>(r.kind);

    std::array<bool, 3> em{}, mtp{};
    if (auto it = by_id.find(r.id); it != by_id.end()) {
      const auto& ranked = it->second->ranked;
      for (size_t rank = 0; rank < ranked.size() && rank < 5; ++rank) {
        TypeExpr pred = parse_type(ranked[rank], parse);
        bool e = exact_match(pred, gt);
        bool m = match_to_parametric(pred, gt);
        for (size_t k = 0; k < kTopK.size(); ++k) {
          if (static_cast<int>(rank) < kTopK[k]) {
            em[k] = em[k] || e;
            mtp[k] = mtp[k] || m;
          }
        }
      }
    }
    for (int v : {var_cat, 3}) {
      for (int t : {type_cat, 3}) {
        EvalCell& cell = report.cells[v][t];
        ++cell.total;
        for (size_t k = 0; k < kTopK.size(); ++k) {
          cell.em[k] += em[k];
          cell.mtp[k] += mtp[k];
        }
      }
    }
  }
  return report;
}

std::string EvalReport::to_text() const {
  std::string out;
  auto header = [&] {
    std::string h = fmt::format("{:<20}", "");
    for (int k : kTopK) h += fmt::format("| {:<27}", fmt::format("Top-{}", k));
    out += h + "\n";
    std::string cols = fmt::format("{:<20}", "");
    for (size_t k = 0; k < kTopK.size(); ++k) {
      cols += "|";
      for (int v = 0; v < 4; ++v) cols += fmt::format(" {:>6}", var_label(v));
    }
    out += cols + "\n";
  };
  for (int metric = 0; metric < 2; ++metric) {
    out += metric == 0 ? "Exact Match (%)\n" : "Match to Parametric (%)\n";
    header();
    for (int t = 0; t < 4; ++t) {
      std::string row = fmt::format("  {:<18}", type_label(t));
      for (size_t k = 0; k < kTopK.size(); ++k) {
        row += "|";
        for (int v = 0; v < 4; ++v) {
          const EvalCell& c = cells[v][t];
          row += fmt::format(" {:>6}", percent(metric == 0 ? c.em[k] : c.mtp[k], c.total));
        }
      }
      out += row + "\n";
    }
    out += "\n";
  }
  out += "Targets:";
  for (int v = 0; v < 4; ++v) out += fmt::format(" {}={}", var_label(v), cells[v][3].total);
  out += " |";
  for (int t = 0; t < 3; ++t) out += fmt::format(" {}={}", type_label(t), cells[3][t].total);
  return out + "\n";
}

std::string EvalReport::to_json() const {
  json arr = json::array();
  for (int v = 0; v < 4; ++v) {
    for (int t = 0; t < 4; ++t) {
      const EvalCell& c = cells[v][t];
      json em = json::object(), mtp = json::object(), em_pct = json::object(),
           mtp_pct = json::object();
      for (size_t k = 0; k < kTopK.size(); ++k) {
        std::string key = std::to_string(kTopK[k]);
        em[key] = c.em[k];
        mtp[key] = c.mtp[k];
        em_pct[key] = c.total ? json(100.0 * c.em[k] / c.total) : json(nullptr);
        mtp_pct[key] = c.total ? json(100.0 * c.mtp[k] / c.total) : json(nullptr);
      }
      arr.push_back({{"variables", var_label(v)},
                     {"types", type_label(t)},
                     {"total", c.total},
                     {"em", em},
                     {"mtp", mtp},
                     {"em_percent", em_pct},
                     {"mtp_percent", mtp_pct}});
    }
  }
  return json{{"cells", arr}}.dump(2) + "\n";
}

}  // namespace typegen
