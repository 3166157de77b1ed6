#include "typegen/slicer.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace typegen {
namespace {

using Key = std::pair<int, int>;  // (statement id, clause or -1)

Location entry_start(const SourceModule& m, Key key) {
  const py::Stmt& s = *m.statement(key.first).node;
  if (key.second < 0) return s.start;
  return s.clauses.at(static_cast<size_t>(key.second)).start;
}

bool is_compound(const SourceModule& m, int id) {
  return !m.statement(id).node->clauses.empty();
}

// Shifts continuation lines by the same amount as the first line so that a
// multi-line statement keeps its internal layout.
std::string reindent(const std::string& text, int from_column, int to_column) {
  std::string out(static_cast<size_t>(to_column), ' ');
  int shift = from_column - to_column;
  size_t pos = 0;
  while (true) {
    size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? nl : nl - pos);
    if (pos > 0) {
      if (shift > 0) {
        size_t spaces = line.find_first_not_of(' ');
        if (spaces == std::string::npos) spaces = line.size();
        line.erase(0, std::min(spaces, static_cast<size_t>(shift)));
      } else if (shift < 0 && !line.empty()) {
        line.insert(0, static_cast<size_t>(-shift), ' ');
      }
    }
    out += line;
    if (nl == std::string::npos) break;
    out += '\n';
    pos = nl + 1;
  }
  return out;
}

}  // namespace

std::string render_slice(const std::vector<SliceEntry>& entries,
                         const SourceModule& m) {
  std::string out;
  for (size_t i = 0; i < entries.size(); ++i) {
    const SliceEntry& e = entries[i];
    if (!out.empty()) out += '\n';
    Location start = entry_start(m, {e.statement_id, e.clause});
    out += reindent(e.text, start.column, 4 * e.depth);
    // A header with nothing kept under it gets an ellipsis body.
    bool empty_block = i + 1 == entries.size() || entries[i + 1].depth <= e.depth;
    if (e.clause >= 0 && empty_block) out += '\n' + std::string(4 * (e.depth + 1), ' ') + "...";
  }
  return out;
}

CodeSlice slice_code(const SlicedTDG& s, const SourceModule& m,
                     const TargetVariable& target, SliceOptions options) {
  int def_id = -1;
  if (target.enclosing_function) {
    const FunctionInfo* fn = m.find_function(*target.enclosing_function);
    if (fn != nullptr) def_id = fn->statement_id;
  }

  std::set<int> chosen;
  for (const auto& [id, n] : s.graph.nodes()) {
    if (n.kind != NodeKind::Symbol) {
      chosen.insert(n.statement_id);
      continue;
    }
    bool any_def = false;
    for (const auto& o : n.occurrences) {
      if (o.is_def) {
        chosen.insert(o.statement_id);
        any_def = true;
      }
    }
    if (!any_def) chosen.insert(n.statement_id);
  }
  for (const auto& e : s.graph.edges()) chosen.insert(e.statement_id);
  if (def_id >= 0) chosen.insert(def_id);
  chosen.erase(-1);

  std::set<Key> keys;
  for (int id : chosen) {
    keys.insert({id, is_compound(m, id) ? 0 : -1});
    if (options.flat) continue;
    const StatementInfo* info = &m.statement(id);
    while (info->parent >= 0 && info->id != def_id) {
      int parent = info->parent;
      if (parent == def_id) break;
      keys.insert({parent, info->clause});
      if (info->clause > 0) keys.insert({parent, 0});
      info = &m.statement(parent);
    }
  }

  // A statement's depth counts the ancestors whose header made it into the
  // slice.
  auto depth_of = [&](int id) {
    int depth = 0;
    const StatementInfo* info = &m.statement(id);
    while (info->parent >= 0) {
      if (keys.count({info->parent, info->clause})) ++depth;
      info = &m.statement(info->parent);
    }
    return depth;
  };

  std::vector<Key> ordered(keys.begin(), keys.end());
  std::sort(ordered.begin(), ordered.end(), [&](Key a, Key b) {
    Location la = entry_start(m, a);
    Location lb = entry_start(m, b);
    if (la != lb) return la < lb;
    return a < b;
  });

  CodeSlice out;
  out.target = target;
  for (Key k : ordered) {
    SliceEntry e;
    e.statement_id = k.first;
    e.clause = k.second;
    e.start_line = entry_start(m, k).line;
    e.depth = depth_of(k.first);
    e.text = k.second < 0 ? m.statement_text(k.first)
                          : m.clause_header_text(k.first, k.second);
    out.entries.push_back(std::move(e));
  }
  out.rendered = render_slice(out.entries, m);
  return out;
}

}  // namespace typegen
