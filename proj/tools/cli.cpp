#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "typegen/cot.hpp"
#include "typegen/error.hpp"
#include "typegen/pipeline.hpp"

namespace typegen {

namespace fs = std::filesystem;

namespace {

struct Locator {
  fs::path file;
  int line = 0;
  std::string name;
};

// FILE:LINE:NAME, split from the right so the file may contain colons.
Locator parse_locator(const std::string& text) {
  size_t last = text.rfind(':');
  size_t mid = last == std::string::npos || last == 0 ? std::string::npos : text.rfind(':', last - 1);
  if (mid == std::string::npos) {
    throw InputError("target locator must look like FILE:LINE:NAME, got '" + text + "'");
  }
  Locator loc{text.substr(0, mid), 0, text.substr(last + 1)};
  std::string line = text.substr(mid + 1, last - mid - 1);
  if (line.empty() || !std::all_of(line.begin(), line.end(), ::isdigit) || loc.name.empty()) {
    throw InputError("target locator must look like FILE:LINE:NAME, got '" + text + "'");
  }
  loc.line = std::stoi(line);
  return loc;
}

TargetVariable find_target(const SourceModule& m, const Locator& loc, const std::string& kind) {
  if (kind.empty()) return locate_target(m, loc.line, loc.name);
  if (kind == "arg") return locate_target(m, loc.line, loc.name, TargetKind::Argument);
  if (kind == "ret") return locate_target(m, loc.line, loc.name, TargetKind::ReturnValue);
  try {
    return locate_target(m, loc.line, loc.name, TargetKind::LocalVariable);
  } catch (const TargetNotFound&) {
    return locate_target(m, loc.line, loc.name, TargetKind::GlobalVariable);
  }
}

TypeDatabase load_typedb(const std::string& path) {
  return path.empty() ? TypeDatabase() : TypeDatabase::load(path);
}

fs::path parent_dir(const fs::path& file) {
  fs::path dir = fs::absolute(file).parent_path();
  return dir.empty() ? fs::current_path() : dir;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << text;
  if (!f) throw InputError("failed writing " + path);
}

DatasetRecord record_for(const TargetVariable& t, const fs::path& file) {
  DatasetRecord r;
  r.id = file.filename().string() + ":" + std::to_string(t.location.line) + ":" + t.name;
  r.file = file.string();
  r.kind = var_category(t.kind);
  r.name = t.name;
  r.function = t.enclosing_function.value_or("");
  r.line = t.location.line;
  r.annotation = t.annotation.value_or("");
  return r;
}

struct Options {
  RunConfig run;
  std::string locator;
  std::string kind;
  std::string file;
  std::vector<std::string> files;
  std::string typedb;
  std::string index;
  std::string dataset;
  std::string predictions;
  std::string train;
  std::string annotation;
  std::string output;
  std::string backend = "mock";
  std::string mock_canned;
  std::string project_root;
  std::string fixed_examples;
  bool json = false;
  bool verbose = false;
};

void add_target_options(CLI::App* sub, Options& o) {
  sub->add_option("target", o.locator, "Target as FILE:LINE:NAME")->required();
  sub->add_option("--kind", o.kind, "Target kind when the locator is ambiguous")
      ->check(CLI::IsMember({"arg", "ret", "var"}));
}

void add_slice_options(CLI::App* sub, Options& o) {
  sub->add_option("--max-hop", o.run.max_hop, "Largest hop distance kept in a slice")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_flag("--flat-slices", o.run.flat_slices, "Drop enclosing block headers from slices");
}

void add_hint_options(CLI::App* sub, Options& o) {
  sub->add_option("--typedb", o.typedb, "Type database file");
  sub->add_option("--project-root", o.project_root,
                  "Directory imports are resolved against (default: the input's directory)");
  sub->add_option("--hint-cap", o.run.hint_cap, "Most type names in a hint line")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_flag("--qualified-hints", o.run.qualified_hints,
                "Prefix third-party names with their module");
}

void add_prompt_options(CLI::App* sub, Options& o) {
  add_slice_options(sub, o);
  add_hint_options(sub, o);
  sub->add_option("--index", o.index, "Example index built by `index build`");
  sub->add_option("--shots", o.run.shots, "Number of retrieved examples")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_option("--fixed-examples", o.fixed_examples,
                  "Comma-separated example ids to use instead of retrieval");
  sub->add_option("--token-budget", o.run.token_budget, "Largest prompt size in tokens")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_flag("--keep-annotations", o.run.keep_annotations,
                "Leave the target's own annotation in its slice");
}

std::vector<std::string> split_ids(const std::string& text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    std::string id = text.substr(start, comma - start);
    id.erase(0, id.find_first_not_of(" \t"));
    id.erase(id.find_last_not_of(" \t") + 1);
    if (!id.empty()) out.push_back(id);
    start = comma + 1;
  }
  return out;
}

int cmd_slice(const Options& o, std::ostream& out) {
  Locator loc = parse_locator(o.locator);
  SourceModule m = load_module(loc.file);
  TargetVariable t = find_target(m, loc, o.kind);
  SlicedTDG s = slice_target(m, t, o.run.max_hop);
  out << slice_code(s, m, t, {o.run.flat_slices}).rendered << "\n";
  return kExitOk;
}

int cmd_hints(const Options& o, std::ostream& out) {
  SourceModule m = load_module(o.file);
  fs::path root = o.project_root.empty() ? parent_dir(o.file) : fs::path(o.project_root);
  TypeHintSet hints =
      collect_hints(m, root, load_typedb(o.typedb), {o.run.hint_cap, o.run.qualified_hints});
  out << render_hint(hints) << "\n";
  return kExitOk;
}

int cmd_cot(const Options& o, std::ostream& out) {
  Locator loc = parse_locator(o.locator);
  SourceModule m = load_module(loc.file);
  TargetVariable t = find_target(m, loc, o.kind);
  std::string type = o.annotation.empty() ? t.annotation.value_or("") : o.annotation;
  if (type.empty()) {
    throw InputError("target '" + t.name + "' has no annotation; pass --annotation");
  }
  SlicedTDG s = slice_target(m, t, o.run.max_hop);
  out << generate_cot(s, t, type).rendered << "\n";
  return kExitOk;
}

int cmd_prompt(const Options& o, std::ostream& out) {
  Locator loc = parse_locator(o.locator);
  SourceModule m = load_module(loc.file);
  TargetVariable t = find_target(m, loc, o.kind);
  RunConfig run = o.run;
  run.fixed_examples = split_ids(o.fixed_examples);
  std::optional<Bm25Index> index;
  if (!o.index.empty()) index = Bm25Index::load(o.index);
  if (!index && !run.fixed_examples.empty()) {
    throw InputError("--fixed-examples needs --index");
  }
  fs::path root = o.project_root.empty() ? parent_dir(loc.file) : fs::path(o.project_root);
  InputPrompt p = build_prompt(m, record_for(t, loc.file), root, index ? &*index : nullptr,
                               load_typedb(o.typedb), run);
  if (p.dropped_examples > 0) {
    spdlog::warn("dropped {} example(s) to fit the token budget", p.dropped_examples);
  }
  out << p.rendered << "\n";
  return kExitOk;
}

int cmd_index_build(const Options& o) {
  auto train = read_dataset(o.train);
  RunConfig run = o.run;
  if (!o.project_root.empty()) run.project_root = o.project_root;
  auto examples = build_examples(train, parent_dir(o.train), load_typedb(o.typedb), run);
  Bm25Index index = Bm25Index::build(std::move(examples));
  index.save(o.output);
  spdlog::info("indexed {} of {} training targets", index.size(), train.size());
  return kExitOk;
}

int cmd_typedb_build(const Options& o) {
  TypeDatabase db;
  if (o.files.size() == 1 && fs::is_directory(o.files[0]) &&
      !fs::exists(fs::path(o.files[0]) / "__init__.py")) {
    db = build_typedb_from_site(o.files[0]);
  } else {
    db = build_typedb(std::vector<fs::path>(o.files.begin(), o.files.end()));
  }
  db.save(o.output);
  spdlog::info("indexed {} package(s)", db.packages().size());
  return kExitOk;
}

int cmd_dataset(const Options& o, std::ostream& out) {
  fs::path base = o.project_root.empty() ? fs::current_path() : fs::path(o.project_root);
  std::vector<DatasetRecord> records;
  for (const auto& file : o.files) {
    fs::path rel = fs::path(file).is_absolute() ? fs::path(file).lexically_relative(base)
                                                : fs::path(file);
    SourceModule m = load_module(base / rel);
    for (const auto& t : enumerate_targets(m, TargetMode::AnnotatedOnly)) {
      records.push_back(record_for(t, rel));
    }
  }
  for (size_t i = 0; i < records.size(); ++i) records[i].id = fmt::format("t{:03d}", i);
  write_output(o.output, dataset_to_jsonl(records), out);
  return kExitOk;
}

int cmd_infer(const Options& o, std::ostream& out) {
  auto dataset = read_dataset(o.dataset);
  RunConfig run = o.run;
  run.fixed_examples = split_ids(o.fixed_examples);
  if (!o.project_root.empty()) run.project_root = o.project_root;
  std::optional<Bm25Index> index;
  if (!o.index.empty()) index = Bm25Index::load(o.index);

  std::unique_ptr<CompletionBackend> backend;
  if (o.backend == "http") {
    run.backend.kind = BackendKind::HttpChat;
    backend = std::make_unique<HttpChatBackend>(run.backend);
  } else if (!o.mock_canned.empty()) {
    backend = std::make_unique<MockBackend>(MockBackend::canned_from_file(o.mock_canned));
  } else {
    backend = std::make_unique<MockBackend>(MockMode::Echo, echo_entries(dataset));
  }

  auto preds = run_inference(dataset, parent_dir(o.dataset), index ? &*index : nullptr,
                             load_typedb(o.typedb), *backend, run);
  write_output(o.output, predictions_to_jsonl(preds), out);
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  EvalReport report =
      evaluate(read_dataset(o.dataset), read_predictions(o.predictions), {o.run.strict_text});
  write_output(o.output, o.json ? report.to_json() + "\n" : report.to_text(), out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Few-shot type inference for Python with code slices and reasoning prompts",
               "typegen"};
  app.set_config("--config", "", "TOML file with option values; command-line flags win");
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", o.verbose, "Log progress");
  app.add_option("--seed", o.run.seed, "Seed for randomized stages (none are randomized locally)");

  auto* slice = app.add_subcommand("slice", "Print the code slice of a target");
  add_target_options(slice, o);
  add_slice_options(slice, o);

  auto* hints = app.add_subcommand("hints", "Print the type hint line of a file");
  hints->add_option("file", o.file, "Python file")->required()->check(CLI::ExistingFile);
  add_hint_options(hints, o);

  auto* cot = app.add_subcommand("cot", "Print the reasoning chain for an annotated target");
  add_target_options(cot, o);
  add_slice_options(cot, o);
  cot->add_option("--annotation", o.annotation, "Type to conclude with (default: the source's)");

  auto* prompt = app.add_subcommand("prompt", "Print the full prompt for a target");
  add_target_options(prompt, o);
  add_prompt_options(prompt, o);

  auto* index = app.add_subcommand("index", "Example index commands");
  index->require_subcommand(1);
  auto* index_build = index->add_subcommand("build", "Index training targets for retrieval");
  index_build->add_option("--train", o.train, "Training dataset JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  index_build->add_option("-o,--output", o.output, "Index file to write")->required();
  add_slice_options(index_build, o);
  add_hint_options(index_build, o);
  index_build->add_flag("--keep-annotations", o.run.keep_annotations,
                        "Leave each target's own annotation in its slice");

  auto* typedb = app.add_subcommand("typedb", "Type database commands");
  typedb->require_subcommand(1);
  auto* typedb_build = typedb->add_subcommand(
      "build", "Index classes of installed packages (a site-packages directory or package roots)");
  typedb_build->add_option("paths", o.files, "site-packages directory or package directories")
      ->required()
      ->check(CLI::ExistingPath);
  typedb_build->add_option("-o,--output", o.output, "Database file to write")->required();

  auto* dataset = app.add_subcommand("dataset", "List annotated targets of files as a dataset");
  dataset->add_option("files", o.files, "Python files")->required();
  dataset->add_option("--project-root", o.project_root,
                      "Directory the recorded file paths are relative to (default: cwd)");
  dataset->add_option("-o,--output", o.output, "Dataset JSONL to write (default: stdout)");

  auto* infer = app.add_subcommand("infer", "Predict types for every target of a dataset");
  infer->add_option("--dataset", o.dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  infer->add_option("-o,--output", o.output, "Predictions JSONL to write (default: stdout)");
  add_prompt_options(infer, o);
  infer->add_option("--samples", o.run.n_samples, "Generations per target")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  infer->add_option("--temperature", o.run.temperature, "Sampling temperature")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  infer->add_option("--top-k", o.run.top_k, "Ranked predictions kept per target")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  infer->add_option("--max-new-tokens", o.run.max_new_tokens, "Generation length limit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  infer->add_flag("--strict-text", o.run.strict_text, "Rank samples by raw text");
  infer->add_option("--workers", o.run.workers, "Targets processed in parallel")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  infer->add_option("--backend", o.backend, "mock or http")
      ->check(CLI::IsMember({"mock", "http"}))
      ->capture_default_str();
  infer->add_option("--mock-canned", o.mock_canned,
                    "JSONL of canned generations for the mock backend (default: echo the "
                    "dataset's annotations)")
      ->check(CLI::ExistingFile);
  infer->add_option("--base-url", o.run.backend.base_url, "Chat-completions endpoint base URL");
  infer->add_option("--model", o.run.backend.model, "Model name sent to the endpoint");
  infer->add_option("--api-key-env", o.run.backend.credential_env,
                    "Environment variable holding the API key")
      ->capture_default_str();

  auto* eval = app.add_subcommand("eval", "Score predictions against a dataset");
  eval->add_option("--dataset", o.dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  eval->add_option("--predictions", o.predictions, "Predictions JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_flag("--strict-text", o.run.strict_text, "Compare raw text without normalization");
  eval->add_flag("--json", o.json, "Print the report as JSON");
  eval->add_option("-o,--output", o.output, "Report file to write (default: stdout)");

  for (auto* sub : app.get_subcommands({})) sub->configurable();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  spdlog::set_level(o.verbose ? spdlog::level::info : spdlog::level::warn);

  try {
    if (slice->parsed()) return cmd_slice(o, out);
    if (hints->parsed()) return cmd_hints(o, out);
    if (cot->parsed()) return cmd_cot(o, out);
    if (prompt->parsed()) return cmd_prompt(o, out);
    if (index_build->parsed()) return cmd_index_build(o);
    if (typedb_build->parsed()) return cmd_typedb_build(o);
    if (dataset->parsed()) return cmd_dataset(o, out);
    if (infer->parsed()) return cmd_infer(o, out);
    if (eval->parsed()) return cmd_eval(o, out);
  } catch (const BackendError& e) {
    err << "typegen: backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const std::exception& e) {
    err << "typegen: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}

}  // namespace typegen
