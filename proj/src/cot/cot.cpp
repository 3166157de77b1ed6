#include "typegen/cot.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace typegen {
namespace {

std::string with_article(const std::string& word) {
  bool vowel = !word.empty() && std::string_view("aeiouAEIOU").find(word[0]) !=
                                    std::string_view::npos;
  return (vowel ? "an " : "a ") + word;
}

// Callees spelled like a type would read as that type ("is assigned from
// str"), so they get an explicit "a call to" prefix.
bool reads_as_type(std::string_view callee) {
  static const std::set<std::string_view> kTypeNames = {
      "int",  "float", "complex", "str",       "bytes",     "bool",
      "dict", "list",  "tuple",   "set",       "frozenset", "bytearray",
      "type", "object", "None",   "ellipsis"};
  return kTypeNames.count(callee) != 0;
}

std::string role_word(EdgeRole role, bool plural) {
  switch (role) {
    case EdgeRole::Key: return plural ? "keys" : "key";
    case EdgeRole::Value: return plural ? "values" : "value";
    case EdgeRole::Target: return plural ? "targets" : "target";
    case EdgeRole::Flow:
    case EdgeRole::Operand:
      break;
  }
  return plural ? "operands" : "operand";
}

std::string subject(const TdgNode& symbol) {
  if (symbol.is_return) return "The return value of " + symbol.name;
  return "The variable " + symbol.name;
}

// How an input node is named after "is assigned from" / "is/are".
std::string source_phrase(const TdgNode& n) {
  switch (n.kind) {
    case NodeKind::Operation: return op_phrase(n);
    case NodeKind::Symbol:
      return n.is_return ? "the return value of " + n.name : "variable " + n.name;
    case NodeKind::TypeLit: return n.name;
  }
  return n.name;
}

// Where a node shows up in the statement an edge came from; used to order
// sentences by source position.
Location position_in(const TdgNode& n, int statement_id) {
  for (const auto& o : n.occurrences) {
    if (o.statement_id == statement_id) return o.location;
  }
  return n.location;
}

std::string join_phrases(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += i + 1 == parts.size() ? " and " : ", ";
    out += parts[i];
  }
  return out;
}

}  // namespace

std::string op_phrase(OpKind op, std::string_view detail) {
  std::string d(detail);
  switch (op) {
    case OpKind::DictLit: return "a dict";
    case OpKind::ListLit: return "a list";
    case OpKind::TupleLit: return "a tuple";
    case OpKind::SetLit: return "a set";
    case OpKind::BinOp:
    case OpKind::AugAssign:
    case OpKind::UnaryOp:
    case OpKind::BoolOp:
      return with_article(d) + " operation";
    case OpKind::Compare: return "a comparison";
    case OpKind::Call: return reads_as_type(d) ? "a call to " + d : d;
    case OpKind::Attribute: return "the attribute " + d;
    case OpKind::SubscriptRead: return "a subscript";
    case OpKind::SubscriptWrite: return "a subscript assignment";
    case OpKind::ListComp: return "a list comprehension";
    case OpKind::SetComp: return "a set comprehension";
    case OpKind::DictComp: return "a dict comprehension";
    case OpKind::GeneratorExp: return "a generator expression";
    case OpKind::IfExp: return "a conditional expression";
    case OpKind::Assign: return "an assignment";
    case OpKind::Iteration: return "an iteration";
  }
  return "an operation";
}

std::string op_phrase(const TdgNode& op) { return op_phrase(op.op, op.detail); }

std::string target_noun(const TargetVariable& target) {
  switch (target.kind) {
    case TargetKind::Argument: return "argument " + target.name;
    case TargetKind::ReturnValue: return "return value of " + target.name;
    case TargetKind::LocalVariable:
    case TargetKind::GlobalVariable:
      break;
  }
  return "variable " + target.name;
}

std::string conclusion_sentence(const TargetVariable& target, std::string_view type) {
  return "Therefore, the type of the " + target_noun(target) + " is `" +
         std::string(type) + "`";
}

std::string render_cot(const std::vector<std::string>& steps,
                       const std::string& conclusion) {
  std::string out;
  for (const auto& s : steps) out += s + ". ";
  return out + conclusion + ".";
}

CotPrompt generate_cot(const SlicedTDG& s, const TargetVariable& target,
                       const std::string& annotated_type) {
  CotPrompt cot;
  std::vector<std::string> sentences;
  const auto& g = s.graph;

  if (s.direction == Direction::Forward) {
    std::set<int> anchors(s.anchors.begin(), s.anchors.end());
    std::vector<std::tuple<int, Location, int>> users;
    for (const auto& [id, n] : g.nodes()) {
      if (anchors.count(id) || n.kind == NodeKind::TypeLit) continue;
      users.emplace_back(s.hops.at(id), n.location, id);
    }
    std::sort(users.begin(), users.end());
    std::vector<std::string> phrases;
    for (const auto& [hop, loc, id] : users) {
      const TdgNode& n = g.node(id);
      std::string p = n.kind == NodeKind::Operation ? op_phrase(n)
                      : n.is_return ? "the return value of " + n.name
                                    : n.name;
      if (std::find(phrases.begin(), phrases.end(), p) == phrases.end()) {
        phrases.push_back(std::move(p));
      }
    }
    std::string usage = phrases.empty() ? "no other operation" : join_phrases(phrases);
    sentences.push_back("The argument " + target.name + " is used in " + usage);
    sentences.push_back(
        "Based on the naming convention, it is reasonable to assume that the "
        "type of the argument " +
        target.name + " is `" + annotated_type + "`");
  } else {
    std::map<std::pair<int, EdgeRole>, int> role_counts;
    for (const auto& e : g.edges()) ++role_counts[{e.to, e.role}];

    std::vector<std::tuple<int, int, Location, int, int>> order;
    std::map<std::pair<int, int>, const TdgEdge*> by_pair;
    for (const auto& e : g.edges()) {
      const TdgNode& from = g.node(e.from);
      order.emplace_back(s.hops.at(e.to), s.hops.at(e.from),
                         position_in(from, e.statement_id), e.from, e.to);
      by_pair[{e.from, e.to}] = &e;
    }
    std::sort(order.begin(), order.end());
    for (const auto& [to_hop, from_hop, pos, from_id, to_id] : order) {
      const TdgEdge& e = *by_pair.at({from_id, to_id});
      const TdgNode& from = g.node(from_id);
      const TdgNode& to = g.node(to_id);
      if (to.kind == NodeKind::Symbol) {
        sentences.push_back(subject(to) + " is assigned from " + source_phrase(from));
      } else if (to.kind == NodeKind::Operation) {
        bool plural = role_counts[{to_id, e.role}] > 1;
        const std::string role = role_word(e.role, plural);
        sentences.push_back("The " + role + " of " + op_phrase(to) +
                            (plural ? " are " : " is ") + source_phrase(from));
      }
    }
  }

  for (size_t i = 0; i < sentences.size(); ++i) {
    cot.steps.push_back(std::to_string(i + 1) + ". " + sentences[i]);
  }
  cot.conclusion = conclusion_sentence(target, annotated_type);
  cot.rendered = render_cot(cot.steps, cot.conclusion);
  return cot;
}

}  // namespace typegen
