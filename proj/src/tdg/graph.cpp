#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

#include "typegen/error.hpp"
#include "typegen/tdg.hpp"

namespace typegen {

const TdgNode& TypeDependencyGraph::node(int id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw InputError("no TDG node with id " + std::to_string(id));
  }
  return it->second;
}

TdgNode& TypeDependencyGraph::mutable_node(int id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw InputError("no TDG node with id " + std::to_string(id));
  }
  return it->second;
}

int TypeDependencyGraph::add_node(TdgNode node) {
  node.id = next_id_++;
  int id = node.id;
  nodes_.emplace(id, std::move(node));
  return id;
}

void TypeDependencyGraph::insert_node(TdgNode node) {
  int id = node.id;
  if (!nodes_.emplace(id, std::move(node)).second) {
    throw InputError("duplicate TDG node id " + std::to_string(id));
  }
  next_id_ = std::max(next_id_, id + 1);
}

bool TypeDependencyGraph::add_edge(TdgEdge edge) {
  if (edge.from == edge.to) return false;
  if (!has_node(edge.from) || !has_node(edge.to)) {
    throw InputError("edge endpoint missing from graph");
  }
  auto key = [](const TdgEdge& e) { return std::pair(e.from, e.to); };
  auto it = std::lower_bound(
      edges_.begin(), edges_.end(), edge,
      [&](const TdgEdge& a, const TdgEdge& b) { return key(a) < key(b); });
  if (it != edges_.end() && key(*it) == key(edge)) return false;
  edges_.insert(it, edge);
  return true;
}

std::vector<TdgEdge> TypeDependencyGraph::in_edges(int id) const {
  std::vector<TdgEdge> out;
  for (const auto& e : edges_) {
    if (e.to == id) out.push_back(e);
  }
  return out;
}

std::vector<TdgEdge> TypeDependencyGraph::out_edges(int id) const {
  std::vector<TdgEdge> out;
  for (const auto& e : edges_) {
    if (e.from == id) out.push_back(e);
  }
  return out;
}

std::string tdg_scope(const TargetVariable& target) {
  return target.enclosing_function.value_or("");
}

namespace {

bool is_target_symbol(const TdgNode& n, const TargetVariable& target) {
  if (n.kind != NodeKind::Symbol) return false;
  if (target.kind == TargetKind::ReturnValue) {
    return n.is_return && n.name == target.name;
  }
  return !n.is_return && n.name == target.name;
}

TypeDependencyGraph induced(const TypeDependencyGraph& g,
                            const std::set<int>& keep) {
  TypeDependencyGraph out;
  for (int id : keep) out.insert_node(g.node(id));
  for (const auto& e : g.edges()) {
    if (keep.count(e.from) && keep.count(e.to)) out.add_edge(e);
  }
  return out;
}

std::string describe(const TargetVariable& t) {
  std::string s = std::string(to_string(t.kind)) + " " + t.name;
  if (t.enclosing_function) s += " in " + *t.enclosing_function;
  return s;
}

}  // namespace

TypeDependencyGraph prune(const TypeDependencyGraph& g,
                          const TargetVariable& target) {
  std::map<int, std::vector<int>> adjacent;
  for (const auto& e : g.edges()) {
    adjacent[e.from].push_back(e.to);
    adjacent[e.to].push_back(e.from);
  }
  std::set<int> keep;
  std::deque<int> queue;
  for (const auto& [id, n] : g.nodes()) {
    if (is_target_symbol(n, target)) {
      keep.insert(id);
      queue.push_back(id);
    }
  }
  if (keep.empty()) {
    throw TargetNotFound("no graph node for " + describe(target));
  }
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : adjacent[u]) {
      if (keep.insert(v).second) queue.push_back(v);
    }
  }
  return induced(g, keep);
}

TypeDependencyGraph merge_symbols(const TypeDependencyGraph& g) {
  std::map<int, int> parent;
  for (const auto& [id, n] : g.nodes()) parent[id] = id;
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& e : g.edges()) {
    const TdgNode& a = g.node(e.from);
    const TdgNode& b = g.node(e.to);
    if (a.kind != NodeKind::Symbol || b.kind != NodeKind::Symbol) continue;
    if (a.is_return || b.is_return || a.name != b.name) continue;
    int ra = find(e.from);
    int rb = find(e.to);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }

  TypeDependencyGraph out;
  std::map<int, TdgNode> merged;
  // Roots are the smallest id of their component, so ascending iteration
  // meets each root before the nodes folded into it.
  for (const auto& [id, n] : g.nodes()) {
    int root = find(id);
    if (root == id) {
      merged.emplace(id, n);
      continue;
    }
    auto& occ = merged.at(root).occurrences;
    occ.insert(occ.end(), n.occurrences.begin(), n.occurrences.end());
  }
  for (auto& [id, n] : merged) {
    auto& occ = n.occurrences;
    std::sort(occ.begin(), occ.end(),
              [](const Occurrence& a, const Occurrence& b) {
                if (a.location != b.location) return a.location < b.location;
                return a.is_def > b.is_def;
              });
    occ.erase(std::unique(occ.begin(), occ.end()), occ.end());
    out.insert_node(std::move(n));
  }
  for (const auto& e : g.edges()) {
    TdgEdge r = e;
    r.from = find(e.from);
    r.to = find(e.to);
    out.add_edge(r);
  }
  return out;
}

SlicedTDG slice_from(const TypeDependencyGraph& g, std::vector<int> anchors,
                     Direction direction, int max_hop) {
  if (max_hop < 0) throw InputError("max_hop must be non-negative");
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());

  std::map<int, std::vector<int>> next;
  for (const auto& e : g.edges()) {
    if (direction == Direction::Backward) {
      next[e.to].push_back(e.from);
    } else {
      next[e.from].push_back(e.to);
    }
  }
  std::map<int, int> hops;
  std::deque<int> queue;
  for (int a : anchors) {
    g.node(a);
    hops[a] = 0;
    queue.push_back(a);
  }
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    if (hops[u] >= max_hop) continue;
    for (int v : next[u]) {
      if (hops.count(v)) continue;
      hops[v] = hops[u] + 1;
      queue.push_back(v);
    }
  }

  SlicedTDG s;
  s.direction = direction;
  s.max_hop = max_hop;
  s.anchors = anchors;
  s.target_node = anchors.empty() ? -1 : anchors.front();
  s.hops = hops;
  for (const auto& [id, hop] : hops) s.graph.insert_node(g.node(id));
  for (const auto& e : g.edges()) {
    int near = direction == Direction::Backward ? e.to : e.from;
    auto it = hops.find(near);
    if (it == hops.end() || it->second >= max_hop) continue;
    s.graph.add_edge(e);
  }
  return s;
}

SlicedTDG slice_tdg(const TypeDependencyGraph& g, const TargetVariable& target,
                    int max_hop) {
  std::vector<int> anchors;
  int primary = -1;
  if (target.kind == TargetKind::Argument) {
    for (const auto& [id, n] : g.nodes()) {
      if (!is_target_symbol(n, target)) continue;
      anchors.push_back(id);
      for (const auto& o : n.occurrences) {
        if (o.is_def && o.location == target.location) primary = id;
      }
    }
    if (anchors.empty()) {
      throw TargetNotFound("no graph node for " + describe(target));
    }
    SlicedTDG s = slice_from(g, anchors, Direction::Forward, max_hop);
    if (primary >= 0) s.target_node = primary;
    return s;
  }
  if (target.kind == TargetKind::ReturnValue) {
    for (const auto& [id, n] : g.nodes()) {
      if (is_target_symbol(n, target)) anchors.push_back(id);
    }
  } else {
    // Prefer a definition at the target location, then any occurrence there.
    for (int pass = 0; pass < 2 && anchors.empty(); ++pass) {
      for (const auto& [id, n] : g.nodes()) {
        if (!is_target_symbol(n, target)) continue;
        for (const auto& o : n.occurrences) {
          if (o.location == target.location && (o.is_def || pass == 1)) {
            anchors.push_back(id);
            break;
          }
        }
        if (!anchors.empty()) break;
      }
    }
  }
  if (anchors.empty()) {
    throw TargetNotFound("no definition node for " + describe(target));
  }
  return slice_from(g, {anchors.front()}, Direction::Backward, max_hop);
}

SlicedTDG slice_target(const SourceModule& m, const TargetVariable& target,
                       int max_hop) {
  TypeDependencyGraph g = build_tdg(m, tdg_scope(target));
  return slice_tdg(merge_symbols(prune(g, target)), target, max_hop);
}

std::string op_name(OpKind op, std::string_view detail) {
  static const std::map<std::string, std::string, std::less<>> kOperators = {
      {"+", "add"},     {"-", "sub"},     {"*", "mul"},    {"/", "div"},
      {"//", "floordiv"}, {"%", "mod"},   {"**", "pow"},   {"@", "matmul"},
      {"<<", "lshift"}, {">>", "rshift"}, {"|", "bitor"},  {"^", "bitxor"},
      {"&", "bitand"},  {"~", "invert"},  {"not", "not"},  {"and", "and"},
      {"or", "or"}};
  auto suffix = [&](const char* base) {
    auto it = kOperators.find(detail);
    std::string s = base;
    if (op == OpKind::UnaryOp && detail == "-") return s + "_neg";
    if (op == OpKind::UnaryOp && detail == "+") return s + "_pos";
    return it == kOperators.end() ? s : s + "_" + it->second;
  };
  switch (op) {
    case OpKind::Assign: return "assignment";
    case OpKind::AugAssign: return suffix("augassign");
    case OpKind::BinOp: return suffix("binop");
    case OpKind::UnaryOp: return suffix("unaryop");
    case OpKind::BoolOp: return suffix("boolop");
    case OpKind::Compare: return "comparison";
    case OpKind::Call: return "call";
    case OpKind::Attribute: return "attribute";
    case OpKind::SubscriptRead: return "Subscript_Read";
    case OpKind::SubscriptWrite: return "Subscript_Write";
    case OpKind::ListLit: return "List_Read";
    case OpKind::TupleLit: return "Tuple_Read";
    case OpKind::SetLit: return "Set_Read";
    case OpKind::DictLit: return "Dict_Read";
    case OpKind::ListComp: return "listcomp";
    case OpKind::SetComp: return "setcomp";
    case OpKind::DictComp: return "dictcomp";
    case OpKind::GeneratorExp: return "genexp";
    case OpKind::IfExp: return "ifexp";
    case OpKind::Iteration: return "iteration";
  }
  return "op";
}

std::string node_label(const TdgNode& n) {
  switch (n.kind) {
    case NodeKind::Symbol:
      return n.is_return ? "return(" + n.name + ")" : n.name;
    case NodeKind::TypeLit:
      return n.name;
    case NodeKind::Operation: {
      std::string s = op_name(n.op, n.detail);
      if (n.op == OpKind::Call || n.op == OpKind::Attribute) {
        s += "(" + n.detail + ")";
      }
      return s;
    }
  }
  return "?";
}

const char* to_string(EdgeRole role) {
  switch (role) {
    case EdgeRole::Flow: return "flow";
    case EdgeRole::Operand: return "operand";
    case EdgeRole::Key: return "key";
    case EdgeRole::Value: return "value";
    case EdgeRole::Target: return "target";
  }
  return "?";
}

namespace {

const char* kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Symbol: return "symbol";
    case NodeKind::Operation: return "op";
    case NodeKind::TypeLit: return "type";
  }
  return "?";
}

std::string export_impl(const TypeDependencyGraph& g,
                        const std::map<int, int>* hops) {
  std::ostringstream out;
  out << "nodes:\n";
  for (const auto& [id, n] : g.nodes()) {
    out << "  " << id << " " << kind_name(n.kind) << " " << node_label(n)
        << " @" << n.location.line << ":" << n.location.column << " stmt "
        << n.statement_id;
    if (hops != nullptr) out << " hop " << hops->at(id);
    out << "\n";
  }
  out << "edges:\n";
  for (const auto& e : g.edges()) {
    out << "  " << e.from << " -> " << e.to << " " << to_string(e.role)
        << "\n";
  }
  return out.str();
}

}  // namespace

std::string export_text(const TypeDependencyGraph& g) {
  return export_impl(g, nullptr);
}

std::string export_text(const SlicedTDG& s) {
  return export_impl(s.graph, &s.hops);
}

}  // namespace typegen
