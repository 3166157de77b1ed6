#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "typegen/error.hpp"
#include "typegen/pipeline.hpp"

using namespace typegen;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = fs::path(TYPEGEN_TEST_DATA) / "corpus";

std::vector<DatasetRecord> eval_set() { return read_dataset(kCorpus / "dataset.jsonl"); }
std::vector<DatasetRecord> train_set() { return read_dataset(kCorpus / "train.jsonl"); }

TypeDatabase corpus_db() { return build_typedb_from_site(kCorpus / "site"); }

DatasetRecord find(const std::vector<DatasetRecord>& set, const std::string& kind,
                   const std::string& name, const std::string& function) {
  for (const auto& r : set) {
    if (dataset_kind(r.kind) == kind && r.name == name && r.function == function) return r;
  }
  ADD_FAILURE() << "no record " << kind << " " << name << " in " << function;
  return {};
}

SourceModule module_of(const DatasetRecord& r) { return load_module(kCorpus / r.file); }

}  // namespace

// The dataset files were produced by a separate script over Python's own
// parser; every record must resolve to a target carrying the same annotation.
TEST(LocateTarget, EveryDatasetRecordResolves) {
  for (const auto* set : {"dataset.jsonl", "train.jsonl"}) {
    for (const auto& r : read_dataset(kCorpus / set)) {
      SourceModule m = module_of(r);
      TargetVariable t = locate_target(m, r);
      EXPECT_EQ(t.name, r.name) << r.id;
      EXPECT_EQ(t.annotation.value_or(""), r.annotation) << set << " " << r.id;
    }
  }
}

TEST(LocateTarget, LocatorAndKind) {
  SourceModule m = parse_module(
      "def f(n: int) -> int:\n"
      "    n = n + 1\n"
      "    return n\n",
      "f.py");
  EXPECT_EQ(locate_target(m, 1, "n").kind, TargetKind::Argument);
  EXPECT_EQ(locate_target(m, 2, "n").kind, TargetKind::LocalVariable);
  EXPECT_EQ(locate_target(m, 1, "f", TargetKind::ReturnValue).kind, TargetKind::ReturnValue);
  EXPECT_THROW(locate_target(m, 3, "n"), TargetNotFound);
  EXPECT_THROW(locate_target(m, 1, "n", TargetKind::LocalVariable), TargetNotFound);

  DatasetRecord missing{"x", "f.py", VarCategory::Var, "zzz", "f", 2, "int"};
  EXPECT_THROW(locate_target(m, missing), TargetNotFound);
}

TEST(MaskAnnotation, RemovesOnlyTheTargetsAnnotation) {
  const std::string src =
      "def scale(v: float, k: int = 2) -> float:\n"
      "    out: float = v * k\n"
      "    return out\n";
  SourceModule m = parse_module(src, "s.py");
  auto mask = [&](int line, const std::string& name, TargetKind kind) {
    return mask_target_annotation(m, locate_target(m, line, name, kind));
  };
  EXPECT_EQ(mask(1, "v", TargetKind::Argument),
            "def scale(v, k: int = 2) -> float:\n    out: float = v * k\n    return out\n");
  EXPECT_EQ(mask(1, "k", TargetKind::Argument),
            "def scale(v: float, k = 2) -> float:\n    out: float = v * k\n    return out\n");
  EXPECT_EQ(mask(1, "scale", TargetKind::ReturnValue),
            "def scale(v: float, k: int = 2):\n    out: float = v * k\n    return out\n");
  EXPECT_EQ(mask(2, "out", TargetKind::LocalVariable),
            "def scale(v: float, k: int = 2) -> float:\n    out = v * k\n    return out\n");
}

TEST(MaskAnnotation, LeavesBareDeclarationsAndUnannotatedTargets) {
  SourceModule m = parse_module("x: int\ny = 3\n", "d.py");
  EXPECT_EQ(mask_target_annotation(m, locate_target(m, 1, "x")), m.text());
  EXPECT_EQ(mask_target_annotation(m, locate_target(m, 2, "y")), m.text());
}

TEST(MaskAnnotation, EveryCorpusTargetStillParsesAndResolves) {
  for (const auto& r : eval_set()) {
    SourceModule m = module_of(r);
    std::string masked = mask_target_annotation(m, locate_target(m, r));
    SourceModule again = parse_module(masked, m.path());
    EXPECT_EQ(again.line_count(), m.line_count()) << r.id;
    TargetVariable t = locate_target(again, r);
    EXPECT_FALSE(t.annotation.has_value()) << r.id;
  }
}

TEST(BuildPrompt, TargetAnnotationIsHidden) {
  auto set = eval_set();
  DatasetRecord r = find(set, "var", "payload", "ApiClient.fetch_json");
  SourceModule m = module_of(r);
  RunConfig cfg;
  InputPrompt p = build_prompt(m, r, kCorpus, nullptr, TypeDatabase(), cfg);
  EXPECT_TRUE(p.examples.empty());
  EXPECT_EQ(p.target.slice.find("payload: dict"), std::string::npos) << p.target.slice;
  EXPECT_NE(p.target.slice.find("payload = json.loads(body)"), std::string::npos) << p.target.slice;
  // Other annotations in the slice stay.
  EXPECT_NE(p.target.slice.find("body: str"), std::string::npos) << p.target.slice;

  cfg.keep_annotations = true;
  InputPrompt kept = build_prompt(m, r, kCorpus, nullptr, TypeDatabase(), cfg);
  EXPECT_NE(kept.target.slice.find("payload: dict[str, Any]"), std::string::npos);
}

TEST(BuildPrompt, HintsComeFromImportsAndTheDatabase) {
  auto set = eval_set();
  DatasetRecord r = find(set, "ret", "fetch", "ApiClient.fetch");
  SourceModule m = module_of(r);
  InputPrompt p = build_prompt(m, r, kCorpus, nullptr, corpus_db(), RunConfig{});
  EXPECT_NE(p.target.hint.find("ApiClient"), std::string::npos) << p.target.hint;
  EXPECT_NE(p.target.hint.find("Session"), std::string::npos) << p.target.hint;
  EXPECT_NE(p.target.hint.find("Response"), std::string::npos) << p.target.hint;
}

TEST(BuildExamples, EveryTrainingTargetBecomesAnExample) {
  auto train = train_set();
  auto examples = build_examples(train, kCorpus, corpus_db(), RunConfig{});
  ASSERT_EQ(examples.size(), train.size());
  for (size_t i = 0; i < train.size(); ++i) {
    const auto& e = examples[i];
    EXPECT_EQ(e.id, train[i].id);
    EXPECT_EQ(e.annotation, train[i].annotation);
    EXPECT_FALSE(e.slice.empty());
    std::string tail = " is `" + train[i].annotation + "`.";
    ASSERT_GE(e.cot.size(), tail.size());
    EXPECT_EQ(e.cot.substr(e.cot.size() - tail.size()), tail) << e.cot;
  }
}

TEST(BuildPrompt, RetrievedExamplesComeLeastSimilarFirst) {
  auto examples = build_examples(train_set(), kCorpus, TypeDatabase(), RunConfig{});
  Bm25Index index = Bm25Index::build(examples);
  auto set = eval_set();
  DatasetRecord r = find(set, "var", "counts", "count_by_prefix");
  InputPrompt p = build_prompt(module_of(r), r, kCorpus, &index, TypeDatabase(), RunConfig{});
  ASSERT_EQ(p.examples.size(), 5u);
  auto scored = select_examples(index, p.target.slice, 5);
  for (size_t i = 0; i < scored.size(); ++i) EXPECT_EQ(p.example_ids[i], scored[i].record->id);
  EXPECT_EQ(p.rendered.substr(0, kPreamble.size()), kPreamble);
  EXPECT_EQ(p.rendered.substr(p.rendered.size() - 2), "A:");

  RunConfig fixed;
  fixed.fixed_examples = {examples[3].id, examples[0].id};
  InputPrompt q = build_prompt(module_of(r), r, kCorpus, &index, TypeDatabase(), fixed);
  EXPECT_EQ(q.example_ids, fixed.fixed_examples);
}

TEST(RunInference, EchoBackendReproducesAnnotations) {
  auto set = eval_set();
  auto examples = build_examples(train_set(), kCorpus, corpus_db(), RunConfig{});
  Bm25Index index = Bm25Index::build(examples);
  MockBackend echo(MockMode::Echo, echo_entries(set));
  RunConfig cfg;
  cfg.n_samples = 3;
  auto preds = run_inference(set, kCorpus, &index, corpus_db(), echo, cfg);
  ASSERT_EQ(preds.size(), set.size());
  for (size_t i = 0; i < set.size(); ++i) {
    EXPECT_EQ(preds[i].id, set[i].id);
    ASSERT_EQ(preds[i].ranked.size(), 1u) << set[i].id;
    EXPECT_EQ(preds[i].ranked[0], canonical_type(set[i].annotation)) << set[i].id;
  }

  cfg.workers = 1;
  EXPECT_EQ(run_inference(set, kCorpus, &index, corpus_db(), echo, cfg), preds);
}

TEST(RunInference, BackendErrorsAbortTheRun) {
  auto set = eval_set();
  MockBackend empty(MockMode::Canned, {});
  EXPECT_THROW(run_inference(set, kCorpus, nullptr, TypeDatabase(), empty, RunConfig{}),
               BackendError);
}

TEST(RunInference, UnreadableTargetsGetEmptyRankings) {
  std::vector<DatasetRecord> set = {
      {"a", "missing.py", VarCategory::Var, "x", "", 1, "int"},
      {"b", "eval/shapes.py", VarCategory::Var, "nope", "", 1, "int"},
  };
  auto good = eval_set();
  set.push_back(good.front());
  MockBackend echo(MockMode::Echo, echo_entries(set));
  auto preds = run_inference(set, kCorpus, nullptr, TypeDatabase(), echo, RunConfig{});
  ASSERT_EQ(preds.size(), 3u);
  EXPECT_TRUE(preds[0].ranked.empty());
  EXPECT_TRUE(preds[1].ranked.empty());
  EXPECT_EQ(preds[2].ranked.size(), 1u);
}
