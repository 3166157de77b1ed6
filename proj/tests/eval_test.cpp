#include <gtest/gtest.h>

#include <json.hpp>

#include "support/type_oracles.hpp"
#include "typegen/error.hpp"
#include "typegen/eval.hpp"

using namespace typegen;
using typegen::testing::naive_report;
using typegen::testing::random_eval_set;
using typegen::testing::random_type;

namespace {

bool em(const std::string& a, const std::string& b) {
  return exact_match(parse_type(a), parse_type(b));
}
bool mtp(const std::string& a, const std::string& b) {
  return match_to_parametric(parse_type(a), parse_type(b));
}

DatasetRecord record(const std::string& id, VarCategory kind, const std::string& annotation) {
  return DatasetRecord{id, "f.py", kind, "x", "", 1, annotation};
}

}  // namespace

TEST(ParseType, NestedGeneric) {
  auto t = parse_type("dict[str, dict[str, str]]");
  EXPECT_EQ(t.constructor, "dict");
  ASSERT_EQ(t.args.size(), 2u);
  EXPECT_EQ(t.args[1].constructor, "dict");
  EXPECT_FALSE(t.opaque);
  EXPECT_EQ(t.canonical_text(), "dict[str, dict[str, str]]");
}

TEST(ParseType, Normalization) {
  EXPECT_EQ(parse_type("typing.List[int]"), parse_type("list[int]"));
  EXPECT_EQ(canonical_type("Optional[str]"), "Union[str, None]");
  EXPECT_EQ(canonical_type("Optional[str]"), canonical_type("Union[str, None]"));
  EXPECT_EQ(canonical_type("Union[None, str]"), "Union[str, None]");
  EXPECT_EQ(canonical_type("Union[str, int]"), "Union[int, str]");
  EXPECT_EQ(canonical_type("str | None"), "Union[str, None]");
  EXPECT_EQ(canonical_type("Union[int, Union[str, int]]"), "Union[int, str]");
  EXPECT_EQ(canonical_type("Union[int]"), "int");
  EXPECT_EQ(canonical_type("Optional[Optional[int]]"), "Union[int, None]");
  EXPECT_EQ(canonical_type("Dict[str,List[ int ]]"), "dict[str, list[int]]");
  EXPECT_EQ(canonical_type("FrozenSet[Type[Foo]]"), "frozenset[type[Foo]]");
  EXPECT_EQ(canonical_type("Tuple[int, ...]"), "tuple[int, ...]");
  EXPECT_EQ(canonical_type("Tuple[()]"), "tuple[()]");
  EXPECT_EQ(canonical_type("Callable[[int, str], bool]"), "Callable[[int, str], bool]");
  EXPECT_EQ(canonical_type("'Foo'"), "Foo");
  EXPECT_EQ(canonical_type("Literal['a', 1]"), "Literal['a', 1]");
}

TEST(ParseType, StrictModeKeepsSpelling) {
  TypeParseOptions raw{false};
  EXPECT_EQ(canonical_type("typing.List[int]", raw), "typing.List[int]");
  EXPECT_EQ(canonical_type("Optional[ str ]", raw), "Optional[str]");
}

TEST(ParseType, OpaqueAtoms) {
  for (const char* bad : {"List[int", "int]", "", "  ", "dict[]", "a..b", "x`y", "List[int] extra"}) {
    auto t = parse_type(bad);
    EXPECT_TRUE(t.opaque) << bad;
    EXPECT_TRUE(t.args.empty());
  }
  EXPECT_EQ(parse_type("  List[int  ").canonical_text(), "List[int");
  EXPECT_TRUE(em("List[int", " List[int"));
}

TEST(ParseType, RenderThenParseIsStable) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    auto t = parse_type(random_type(rng));
    ASSERT_FALSE(t.opaque);
    ASSERT_EQ(parse_type(t.canonical_text()), t) << t.canonical_text();
  }
}

TEST(Metrics, ExactAndParametric) {
  EXPECT_TRUE(em("int", "int"));
  EXPECT_FALSE(em("List[int]", "List[str]"));
  EXPECT_TRUE(mtp("List[int]", "List[str]"));
  EXPECT_TRUE(em("list[int]", "typing.List[int]"));
  EXPECT_FALSE(mtp("dict[str,int]", "list[int]"));
  EXPECT_TRUE(mtp("Optional[int]", "Union[str, None]"));
  EXPECT_FALSE(mtp("int", "Foo"));
}

TEST(Metrics, ExactMatchIsAnEquivalenceAndImpliesParametric) {
  std::mt19937_64 rng(12);
  std::vector<TypeExpr> pool;
  for (int i = 0; i < 150; ++i) pool.push_back(parse_type(random_type(rng)));
  for (const auto& a : pool) {
    ASSERT_TRUE(exact_match(a, a));
    for (const auto& b : pool) {
      bool ab = exact_match(a, b);
      ASSERT_EQ(ab, exact_match(b, a));
      if (!ab) continue;
      ASSERT_TRUE(match_to_parametric(a, b));
      for (const auto& c : pool) {
        if (exact_match(b, c)) {
          ASSERT_TRUE(exact_match(a, c));
        }
      }
    }
  }
}

TEST(Categorize, Examples) {
  EXPECT_EQ(categorize_type(parse_type("int")), TypeCategory::Ele);
  EXPECT_EQ(categorize_type(parse_type("None")), TypeCategory::Ele);
  EXPECT_EQ(categorize_type(parse_type("dict[str, str]")), TypeCategory::Gen);
  EXPECT_EQ(categorize_type(parse_type("List")), TypeCategory::Gen);
  EXPECT_EQ(categorize_type(parse_type("Optional[int]")), TypeCategory::Gen);
  EXPECT_EQ(categorize_type(parse_type("Foo")), TypeCategory::Usr);
  EXPECT_EQ(categorize_type(parse_type("requests.Session")), TypeCategory::Usr);
  EXPECT_EQ(categorize_type(parse_type("Foo[int]")), TypeCategory::Gen);
  EXPECT_EQ(categorize_type(parse_type("typing.Any")), TypeCategory::Ele);
  EXPECT_EQ(categorize_type(parse_type("collections.OrderedDict")), TypeCategory::Gen);
}

TEST(Evaluate, RankCutoffs) {
  std::vector<DatasetRecord> ds = {record("a", VarCategory::Arg, "int")};
  auto r = evaluate(ds, {{"a", {"str", "int"}}});
  const auto& all = r.cell(3, 3);
  EXPECT_EQ(all.total, 1);
  EXPECT_EQ(all.em, (std::array<int, 3>{0, 1, 1}));
  EXPECT_EQ(r.cell(0, 0).em, (std::array<int, 3>{0, 1, 1}));
  EXPECT_EQ(r.cell(1, 3).total, 0);
}

TEST(Evaluate, MissingAndEmptyPredictionsAreMisses) {
  std::vector<DatasetRecord> ds = {record("a", VarCategory::Var, "int"),
                                   record("b", VarCategory::Ret, "Foo")};
  auto r = evaluate(ds, {{"a", {}}});
  EXPECT_EQ(r.cell(3, 3).total, 2);
  EXPECT_EQ(r.cell(3, 3).em, (std::array<int, 3>{0, 0, 0}));
  EXPECT_EQ(r.cell(3, 3).mtp, (std::array<int, 3>{0, 0, 0}));
}

TEST(Evaluate, EchoedGroundTruthScoresEverywhere) {
  std::vector<DatasetRecord> ds = {record("a", VarCategory::Arg, "int"),
                                   record("b", VarCategory::Ret, "List[str]"),
                                   record("c", VarCategory::Var, "Foo")};
  std::vector<PredictionRecord> preds;
  for (const auto& d : ds) preds.push_back({d.id, {d.annotation}});
  auto r = evaluate(ds, preds);
  for (int v = 0; v < 4; ++v) {
    for (int t = 0; t < 4; ++t) {
      const auto& c = r.cell(v, t);
      for (size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(c.em[k], c.total);
        EXPECT_EQ(c.mtp[k], c.total);
      }
    }
  }
}

TEST(Evaluate, UnknownIdIsRejected) {
  std::vector<DatasetRecord> ds = {record("a", VarCategory::Arg, "int")};
  EXPECT_THROW(evaluate(ds, {{"zzz", {"int"}}}), UnknownTargetId);
}

TEST(Evaluate, StrictTextDisablesNormalization) {
  std::vector<DatasetRecord> ds = {record("a", VarCategory::Arg, "List[int]")};
  std::vector<PredictionRecord> preds = {{"a", {"list[int]"}}};
  EXPECT_EQ(evaluate(ds, preds).cell(3, 3).em[0], 1);
  EXPECT_EQ(evaluate(ds, preds, {true}).cell(3, 3).em[0], 0);
  EXPECT_EQ(evaluate(ds, preds, {true}).cell(3, 1).total, 1);
}

TEST(Evaluate, MatchesNaiveScorerOnRandomSets) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 100; ++i) {
    auto [ds, preds] = random_eval_set(rng);
    bool strict = i % 4 == 0;
    auto report = evaluate(ds, preds, {strict});
    ASSERT_EQ(report, naive_report(ds, preds, strict));
    for (int v = 0; v < 4; ++v) {
      for (int t = 0; t < 4; ++t) {
        const auto& c = report.cell(v, t);
        for (size_t k = 0; k < 3; ++k) {
          ASSERT_LE(c.em[k], c.mtp[k]);
          ASSERT_LE(c.mtp[k], c.total);
          if (k > 0) {
            ASSERT_LE(c.em[k - 1], c.em[k]);
            ASSERT_LE(c.mtp[k - 1], c.mtp[k]);
          }
        }
      }
    }
  }
}

TEST(Report, TextAndJson) {
  std::vector<DatasetRecord> ds = {record("a", VarCategory::Arg, "int"),
                                   record("b", VarCategory::Var, "List[int]")};
  auto r = evaluate(ds, {{"a", {"int"}}, {"b", {"list[str]"}}});
  auto text = r.to_text();
  EXPECT_NE(text.find("Exact Match (%)"), std::string::npos);
  EXPECT_NE(text.find("Match to Parametric (%)"), std::string::npos);
  EXPECT_NE(text.find("Targets: Arg=1 Ret=0 Var=1 All=2 | Ele=1 Gen=1 Usr=0"), std::string::npos);
  auto j = nlohmann::json::parse(r.to_json());
  ASSERT_EQ(j["cells"].size(), 16u);
  const auto& all = j["cells"][15];
  EXPECT_EQ(all["variables"], "All");
  EXPECT_EQ(all["types"], "All");
  EXPECT_EQ(all["em"]["1"], 1);
  EXPECT_EQ(all["mtp"]["1"], 2);
  EXPECT_DOUBLE_EQ(all["em_percent"]["1"].get<double>(), 50.0);
}

TEST(DatasetIo, RoundTripAndErrors) {
  std::vector<DatasetRecord> ds = {
      {"p1", "app/x.py", VarCategory::Arg, "path", "load", 3, "str"},
      {"p2", "app/x.py", VarCategory::Var, "CONF", "", 10, "dict[str, int]"}};
  EXPECT_EQ(parse_dataset(dataset_to_jsonl(ds)), ds);
  EXPECT_THROW(parse_dataset("{\"id\": \"a\"}\n"), InputError);
  EXPECT_THROW(parse_dataset("not json\n"), InputError);
  auto line = dataset_to_jsonl({ds[0]});
  EXPECT_THROW(parse_dataset(line + line), InputError);
  std::string bad_kind = line;
  bad_kind.replace(bad_kind.find("\"arg\""), 5, "\"fn\"");
  EXPECT_THROW(parse_dataset(bad_kind), InputError);

  std::vector<PredictionRecord> preds = {{"p1", {"str", "bytes"}}, {"p2", {}}};
  EXPECT_EQ(parse_predictions(predictions_to_jsonl(preds)), preds);
  EXPECT_THROW(parse_predictions("{\"id\": \"a\", \"ranked\": [1]}"), InputError);
}
