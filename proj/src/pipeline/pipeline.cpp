#include "typegen/pipeline.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "typegen/cot.hpp"
#include "typegen/error.hpp"

namespace typegen {

namespace fs = std::filesystem;

namespace {

bool kind_matches(TargetKind kind, VarCategory category) {
  switch (category) {
    case VarCategory::Arg: return kind == TargetKind::Argument;
    case VarCategory::Ret: return kind == TargetKind::ReturnValue;
    case VarCategory::Var:
      return kind == TargetKind::LocalVariable || kind == TargetKind::GlobalVariable;
  }
  return false;
}

std::string describe(const DatasetRecord& r) {
  return r.id + " (" + r.file + ":" + std::to_string(r.line) + ":" + r.name + ")";
}

size_t offset_of(const SourceModule& m, Location loc) {
  std::string_view line = m.line(loc.line);
  return static_cast<size_t>(line.data() - m.text().data()) + static_cast<size_t>(loc.column);
}

// Removes the annotation expression together with the ':' or '->' in front
// of it and the whitespace before that separator.
std::string cut_annotation(const SourceModule& m, const py::Expr& annotation) {
  if (annotation.start.line != annotation.end.line) return m.text();
  const std::string& text = m.text();
  size_t begin = offset_of(m, annotation.start);
  size_t end = offset_of(m, annotation.end);
  size_t sep = begin;
  while (sep > 0 && (text[sep - 1] == ' ' || text[sep - 1] == '\t')) --sep;
  if (sep >= 2 && text.compare(sep - 2, 2, "->") == 0) {
    sep -= 2;
  } else if (sep >= 1 && text[sep - 1] == ':') {
    sep -= 1;
  } else {
    return text;
  }
  while (sep > 0 && (text[sep - 1] == ' ' || text[sep - 1] == '\t')) --sep;
  return text.substr(0, sep) + text.substr(end);
}

fs::path resolve(const fs::path& base, const std::string& file) {
  fs::path p(file);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

TargetVariable locate_target(const SourceModule& m, const DatasetRecord& record) {
  std::vector<TargetVariable> candidates;
  for (auto& t : enumerate_targets(m, TargetMode::All)) {
    if (!kind_matches(t.kind, record.kind) || t.name != record.name) continue;
    if (t.enclosing_function.value_or("") != record.function) continue;
    if (t.location.line == record.line) return t;
    candidates.push_back(std::move(t));
  }
  // enumerate_targets lists only the first plain binding of a variable, so
  // a later annotated-less rebinding is looked up by its defining statement.
  if (record.kind == VarCategory::Var) {
    for (int id : m.statements_at_line(record.line)) {
      const StatementInfo& info = m.statement(id);
      const FunctionInfo* fn = m.enclosing_function(id);
      std::string scope = fn != nullptr ? fn->qualified_name : "";
      if (scope != record.function) continue;
      const py::Stmt& s = *info.node;
      for (const auto& target : s.targets) {
        if (target->kind == py::ExprKind::Name && target->name == record.name &&
            target->start.line == record.line) {
          TargetVariable t{fn != nullptr ? TargetKind::LocalVariable : TargetKind::GlobalVariable,
                           record.name, std::nullopt, target->start, std::nullopt};
          if (fn != nullptr) t.enclosing_function = fn->qualified_name;
          return t;
        }
      }
    }
  }
  if (record.kind != VarCategory::Var && candidates.size() == 1) return candidates.front();
  throw TargetNotFound("no " + std::string(dataset_kind(record.kind)) + " target '" +
                       record.name + "' at line " + std::to_string(record.line) + " of " +
                       record.file);
}

TargetVariable locate_target(const SourceModule& m, int line, const std::string& name,
                             std::optional<TargetKind> kind) {
  std::vector<TargetVariable> found;
  for (auto& t : enumerate_targets(m, TargetMode::All)) {
    if (t.name != name || t.location.line != line) continue;
    if (kind && *kind != t.kind) continue;
    found.push_back(std::move(t));
  }
  if (found.empty()) {
    throw TargetNotFound("no target '" + name + "' defined at line " + std::to_string(line));
  }
  if (found.size() > 1 && !kind) {
    throw TargetNotFound("'" + name + "' at line " + std::to_string(line) +
                         " is ambiguous; pass --kind");
  }
  return found.front();
}

std::string mask_target_annotation(const SourceModule& m, const TargetVariable& target) {
  switch (target.kind) {
    case TargetKind::Argument:
    case TargetKind::ReturnValue: {
      const FunctionInfo* fn =
          target.enclosing_function ? m.find_function(*target.enclosing_function) : nullptr;
      if (fn == nullptr) return m.text();
      const py::Stmt& def = *fn->node;
      if (target.kind == TargetKind::ReturnValue) {
        return def.returns ? cut_annotation(m, *def.returns) : m.text();
      }
      for (const auto& p : def.params) {
        if (p.name == target.name && p.annotation) return cut_annotation(m, *p.annotation);
      }
      return m.text();
    }
    case TargetKind::LocalVariable:
    case TargetKind::GlobalVariable:
      for (int id : m.statements_at_line(target.location.line)) {
        const py::Stmt& s = *m.statement(id).node;
        // A bare declaration `x: T` has nothing left to bind once the
        // annotation goes, so it stays as written.
        if (s.kind == py::StmtKind::AnnAssign && s.targets[0]->start == target.location) {
          return s.value ? cut_annotation(m, *s.annotation) : m.text();
        }
      }
      return m.text();
  }
  return m.text();
}

PreparedTarget prepare_target(const SourceModule& m, const TargetVariable& target,
                              const fs::path& project_root, const TypeDatabase& db,
                              const RunConfig& config) {
  PreparedTarget p;
  p.target = target;
  p.sliced = slice_target(m, target, config.max_hop);
  p.slice = slice_code(p.sliced, m, target, {config.flat_slices});
  p.hint = render_hint(collect_hints(m, project_root, db, {config.hint_cap, config.qualified_hints}));
  return p;
}

namespace {

PreparedTarget prepare_record(const SourceModule& m, const DatasetRecord& record,
                              const fs::path& project_root, const TypeDatabase& db,
                              const RunConfig& config) {
  TargetVariable target = locate_target(m, record);
  if (config.keep_annotations) return prepare_target(m, target, project_root, db, config);
  std::string text = mask_target_annotation(m, target);
  if (text == m.text()) return prepare_target(m, target, project_root, db, config);
  SourceModule masked = parse_module(std::move(text), m.path());
  TargetVariable again = locate_target(masked, record);
  PreparedTarget p = prepare_target(masked, again, project_root, db, config);
  // Hints come from imports, which masking does not touch; the original
  // target keeps its annotation for reporting.
  p.target = target;
  return p;
}

class ModuleCache {
 public:
  explicit ModuleCache(fs::path base) : base_(std::move(base)) {}

  // Null when the file cannot be read or parsed (already logged).
  const SourceModule* get(const std::string& file) {
    auto it = modules_.find(file);
    if (it != modules_.end()) return it->second ? &*it->second : nullptr;
    std::optional<SourceModule> m;
    try {
      m.emplace(load_module(resolve(base_, file)));
    } catch (const Error& e) {
      spdlog::warn("skipping {}: {}", file, e.what());
    }
    auto [pos, _] = modules_.emplace(file, std::move(m));
    return pos->second ? &*pos->second : nullptr;
  }

 private:
  fs::path base_;
  std::map<std::string, std::optional<SourceModule>> modules_;
};

fs::path project_root_for(const fs::path& base_dir, const RunConfig& config) {
  return config.project_root.empty() ? base_dir : config.project_root;
}

}  // namespace

std::vector<ExampleRecord> build_examples(const std::vector<DatasetRecord>& train,
                                          const fs::path& base_dir, const TypeDatabase& db,
                                          const RunConfig& config) {
  ModuleCache cache(base_dir);
  fs::path root = project_root_for(base_dir, config);
  std::vector<ExampleRecord> out;
  for (const auto& record : train) {
    const SourceModule* m = cache.get(record.file);
    if (m == nullptr) continue;
    if (record.annotation.empty()) {
      spdlog::warn("skipping example {}: empty annotation", describe(record));
      continue;
    }
    try {
      PreparedTarget p = prepare_record(*m, record, root, db, config);
      CotPrompt cot = generate_cot(p.sliced, p.target, record.annotation);
      out.push_back({record.id, record.name, record.kind, p.slice.rendered, p.hint, cot.rendered,
                     record.annotation});
    } catch (const Error& e) {
      spdlog::warn("skipping example {}: {}", describe(record), e.what());
    }
  }
  return out;
}

InputPrompt build_prompt(const SourceModule& m, const DatasetRecord& record,
                         const fs::path& project_root, const Bm25Index* index,
                         const TypeDatabase& db, const RunConfig& config) {
  PreparedTarget p = prepare_record(m, record, project_root, db, config);
  std::vector<ScoredExample> examples;
  if (index != nullptr && index->size() > 0) {
    if (!config.fixed_examples.empty()) {
      examples = fixed_examples(*index, config.fixed_examples, p.slice.rendered);
    } else if (config.shots > 0) {
      examples = select_examples(*index, p.slice.rendered, config.shots);
    }
  }
  return assemble_prompt(examples, p.slice.rendered, p.hint, record.kind, record.name,
                         config.token_budget);
}

std::vector<PredictionRecord> run_inference(const std::vector<DatasetRecord>& dataset,
                                            const fs::path& base_dir, const Bm25Index* index,
                                            const TypeDatabase& db, CompletionBackend& backend,
                                            const RunConfig& config) {
  // Parse every file up front; workers then only read shared modules.
  ModuleCache cache(base_dir);
  std::vector<const SourceModule*> modules;
  for (const auto& r : dataset) modules.push_back(cache.get(r.file));
  fs::path root = project_root_for(base_dir, config);

  std::vector<PredictionRecord> out(dataset.size());
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;

  auto work = [&] {
    while (!failed) {
      size_t i = next++;
      if (i >= dataset.size()) return;
      const DatasetRecord& record = dataset[i];
      out[i].id = record.id;
      if (modules[i] == nullptr) continue;
      try {
        InputPrompt prompt = build_prompt(*modules[i], record, root, index, db, config);
        CompletionRequest req;
        req.prompt = prompt.rendered;
        req.n_samples = config.n_samples;
        req.temperature = config.temperature;
        req.max_new_tokens = config.max_new_tokens;
        req.model = config.backend.model;
        req.key = mock_key(record.file, record.id);
        auto samples = backend.complete(req);
        for (auto& [type, count] : rank_samples(samples, config.top_k, !config.strict_text).ranked) {
          out[i].ranked.push_back(type);
        }
      } catch (const BackendError&) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed = true;
      } catch (const Error& e) {
        spdlog::warn("no prediction for {}: {}", describe(record), e.what());
      }
    }
  };

  int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(dataset.size())));
  std::vector<std::thread> threads;
  for (int w = 1; w < workers; ++w) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

std::map<std::string, std::string> echo_entries(const std::vector<DatasetRecord>& dataset) {
  std::map<std::string, std::string> out;
  for (const auto& r : dataset) out[mock_key(r.file, r.id)] = r.annotation;
  return out;
}

}  // namespace typegen
