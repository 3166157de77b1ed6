#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "typegen/frontend/source_module.hpp"

namespace typegen {

enum class NodeKind { Symbol, Operation, TypeLit };

enum class OpKind {
  Assign,  // tuple/list unpacking
  AugAssign,
  BinOp,
  UnaryOp,
  BoolOp,
  Compare,
  Call,
  Attribute,
  SubscriptRead,
  SubscriptWrite,
  ListLit,
  TupleLit,
  SetLit,
  DictLit,
  ListComp,
  SetComp,
  DictComp,
  GeneratorExp,
  IfExp,
  Iteration,  // element of a `for` iterable or comprehension generator
};

/// Which slot of the output operation an edge feeds.
enum class EdgeRole { Flow, Operand, Key, Value, Target };

struct Occurrence {
  Location location;
  int statement_id = -1;
  bool is_def = false;

  bool operator==(const Occurrence&) const = default;
};

struct TdgNode {
  int id = -1;
  NodeKind kind = NodeKind::Symbol;
  /// Symbol: variable name ("x", "self.a"); TypeLit: type string.
  std::string name;
  OpKind op = OpKind::Assign;
  /// Operation detail: operator symbol for BinOp/UnaryOp/BoolOp/AugAssign,
  /// callee text for Call, attribute name for Attribute.
  std::string detail;
  Location location;
  int statement_id = -1;
  /// Symbol occurrences in source order. A fresh symbol node has exactly
  /// one; merged nodes accumulate those of every collapsed node.
  std::vector<Occurrence> occurrences;
  /// The per-function return value symbol (name = function name).
  bool is_return = false;

  bool operator==(const TdgNode&) const = default;
};

struct TdgEdge {
  int from = -1;  // input
  int to = -1;    // output: its type depends on `from`
  EdgeRole role = EdgeRole::Flow;
  int statement_id = -1;

  bool operator==(const TdgEdge&) const = default;
};

/// Directed graph of type dependencies. Edges are unique per (from, to)
/// and kept sorted by that pair.
class TypeDependencyGraph {
 public:
  const std::map<int, TdgNode>& nodes() const { return nodes_; }
  const std::vector<TdgEdge>& edges() const { return edges_; }

  bool has_node(int id) const { return nodes_.count(id) != 0; }
  const TdgNode& node(int id) const;

  /// Inserts a node with a fresh id (ignoring node.id) and returns the id.
  int add_node(TdgNode node);
  /// Inserts a node keeping its id. The id must be unused.
  void insert_node(TdgNode node);
  /// Adds an edge unless it is a self-loop or (from, to) already exists.
  /// Returns true when the edge was inserted.
  bool add_edge(TdgEdge edge);
  /// Mutable access used while building a graph.
  TdgNode& mutable_node(int id);

  std::vector<TdgEdge> in_edges(int id) const;
  std::vector<TdgEdge> out_edges(int id) const;

  bool operator==(const TypeDependencyGraph&) const = default;

 private:
  std::map<int, TdgNode> nodes_;
  std::vector<TdgEdge> edges_;
  int next_id_ = 0;
};

enum class Direction { Backward, Forward };

struct SlicedTDG {
  TypeDependencyGraph graph;
  /// Primary anchor: the definition node (backward) or the argument's
  /// parameter node (forward).
  int target_node = -1;
  /// Every node that starts the traversal at hop 0.
  std::vector<int> anchors;
  std::map<int, int> hops;
  Direction direction = Direction::Backward;
  int max_hop = 3;
};

/// Builds the graph of one function (qualified name) or, with an empty
/// `function`, of the module-level statements outside class and function
/// bodies. Throws TargetNotFound for an unknown function.
TypeDependencyGraph build_tdg(const SourceModule& m, std::string_view function);

/// Graph scope of a target: its enclosing function, or "" for globals.
std::string tdg_scope(const TargetVariable& target);

/// Keeps the nodes connected (ignoring edge direction) to any symbol node
/// of the target. Throws TargetNotFound when no node matches.
TypeDependencyGraph prune(const TypeDependencyGraph& g,
                          const TargetVariable& target);

/// Collapses directly connected symbol nodes of the same name, repeating
/// until no such pair remains. Return value symbols never merge.
TypeDependencyGraph merge_symbols(const TypeDependencyGraph& g);

/// Breadth-first slice around the target: against the edge direction for
/// variables and return values, along it for arguments. Nodes farther than
/// `max_hop` are dropped. Throws TargetNotFound.
SlicedTDG slice_tdg(const TypeDependencyGraph& g, const TargetVariable& target,
                    int max_hop = 3);

/// Generic slice from explicit anchors; used by slice_tdg and by tests.
SlicedTDG slice_from(const TypeDependencyGraph& g, std::vector<int> anchors,
                     Direction direction, int max_hop);

/// build_tdg + prune + merge_symbols + slice_tdg for one target.
SlicedTDG slice_target(const SourceModule& m, const TargetVariable& target,
                       int max_hop = 3);

/// Short kind name such as "Dict_Read", "binop_add" or "call".
std::string op_name(OpKind op, std::string_view detail);
/// Node label used by the text export: symbol name, op name or type.
std::string node_label(const TdgNode& n);
const char* to_string(EdgeRole role);

/// Debug dump: a node table followed by one `src -> dst` line per edge.
std::string export_text(const TypeDependencyGraph& g);
std::string export_text(const SlicedTDG& s);

}  // namespace typegen
