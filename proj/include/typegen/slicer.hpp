#pragma once

#include <string>
#include <vector>

#include "typegen/frontend/source_module.hpp"
#include "typegen/tdg.hpp"

namespace typegen {

struct SliceEntry {
  int statement_id = -1;
  /// Clause whose header this entry shows, or -1 for a whole simple
  /// statement.
  int clause = -1;
  int start_line = 0;
  /// Nesting level inside the slice; rendered as four spaces per level.
  int depth = 0;
  /// Exact source text of the statement or clause header.
  std::string text;

  bool operator==(const SliceEntry&) const = default;
};

struct CodeSlice {
  std::vector<SliceEntry> entries;
  TargetVariable target;
  std::string rendered;
};

struct SliceOptions {
  /// Drop the headers of enclosing if/for/while/with/try blocks.
  bool flat = false;
};

/// Collects the statements behind the nodes and edges of a sliced graph,
/// adds the enclosing `def` header for function targets and, unless `flat`,
/// the headers of enclosing control-flow blocks.
CodeSlice slice_code(const SlicedTDG& s, const SourceModule& m,
                     const TargetVariable& target, SliceOptions options = {});

/// Re-indents entries and joins them with newlines.
std::string render_slice(const std::vector<SliceEntry>& entries,
                         const SourceModule& m);

}  // namespace typegen
