#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "typegen/error.hpp"
#include "typegen/frontend/source_module.hpp"

using namespace typegen;

namespace {

std::string data_path(const std::string& name) {
  return std::string(TYPEGEN_TEST_DATA) + "/" + name;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Tokenizer, IndentAndDedent) {
  auto tokens = py::tokenize("if x:\n    y = 1\nz\n");
  std::vector<py::TokenKind> kinds;
  for (const auto& t : tokens) kinds.push_back(t.kind);
  using K = py::TokenKind;
  std::vector<K> expected = {K::Name, K::Name,    K::Op,     K::Newline,
                             K::Indent, K::Name,  K::Op,     K::Number,
                             K::Newline, K::Dedent, K::Name, K::Newline,
                             K::EndMarker};
  EXPECT_EQ(kinds, expected);
}

TEST(Tokenizer, StringPrefixesAndTripleQuotes) {
  auto tokens = py::tokenize("a = rb'x' + f\"\"\"multi\nline\"\"\"\n");
  ASSERT_GE(tokens.size(), 5u);
  EXPECT_EQ(tokens[2].kind, py::TokenKind::String);
  EXPECT_EQ(tokens[2].text, "rb'x'");
  EXPECT_EQ(tokens[4].text, "f\"\"\"multi\nline\"\"\"");
  EXPECT_EQ(tokens[4].end.line, 2);
}

TEST(Tokenizer, BracketsSuppressNewlines) {
  auto tokens = py::tokenize("f(1,\n  2)\n");
  int newlines = 0;
  for (const auto& t : tokens) newlines += t.kind == py::TokenKind::Newline;
  EXPECT_EQ(newlines, 1);
}

TEST(Tokenizer, UnterminatedStringFails) {
  EXPECT_THROW(py::tokenize("x = 'abc\n"), SyntaxError);
}

TEST(Parser, SingleFunction) {
  auto m = parse_module("def f(x):\n    return x\n");
  ASSERT_EQ(m.functions().size(), 1u);
  EXPECT_EQ(m.functions()[0].qualified_name, "f");
  EXPECT_EQ(m.functions()[0].arguments, std::vector<std::string>{"x"});
  EXPECT_EQ(m.functions()[0].body, std::vector<int>{1});
}

TEST(Parser, SyntaxErrorReportsLine) {
  try {
    parse_module("x = 1\ndef f(:\n    pass\n");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Parser, RejectsMatchStatement) {
  EXPECT_THROW(parse_module("match x:\n    case 1:\n        pass\n"),
               SyntaxError);
}

TEST(Parser, SoftKeywordMatchIsStillAName) {
  auto m = parse_module("match = re.match(p, s)\nmatch.group(0)\n");
  EXPECT_EQ(m.statements().size(), 2u);
}

TEST(Parser, RejectsInvalidAssignmentTarget) {
  EXPECT_THROW(parse_module("f() = 1\n"), SyntaxError);
  EXPECT_THROW(parse_module("1 + 2 = x\n"), SyntaxError);
}

TEST(Parser, StatementSpansMatchReferenceParser) {
  // Spans were produced once by CPython's ast module and frozen.
  auto m = load_module(data_path("frontend/syntax_tour.py"));
  auto expected = read_lines(data_path("frontend/syntax_tour.spans"));
  ASSERT_EQ(m.statements().size(), expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    const auto& s = *m.statements()[i].node;
    std::ostringstream got;
    got << s.start.line << ":" << s.start.column << "-" << s.end.line << ":"
        << s.end.column << " " << m.statements()[i].depth;
    EXPECT_EQ(got.str(), expected[i]) << "statement " << i;
  }
}

TEST(SourceModule, StatementTextOfCompoundIsHeaderOnly) {
  auto m = parse_module("if a and \\\n   b:\n    x = 1\nelse:\n    x = 2\n");
  EXPECT_EQ(m.statement_text(0), "if a and \\\n   b:");
  EXPECT_EQ(m.clause_header_text(0, 1), "else:");
  EXPECT_EQ(m.statement_text(2), "x = 2");
}

TEST(SourceModule, LinesIgnoreCarriageReturns) {
  auto m = parse_module("a = 1\r\nb = 2\r\n");
  EXPECT_EQ(m.line_count(), 2);
  EXPECT_EQ(m.line(2), "b = 2");
  EXPECT_EQ(m.statement_text(1), "b = 2");
}

TEST(SourceModule, ScopesOfNestedFunctions) {
  auto m = parse_module(
      "class C:\n"
      "    def m(self):\n"
      "        def inner():\n"
      "            return 1\n"
      "        return inner\n");
  ASSERT_EQ(m.functions().size(), 2u);
  EXPECT_EQ(m.functions()[0].qualified_name, "C.m");
  EXPECT_EQ(m.functions()[1].qualified_name, "C.m.inner");
  EXPECT_EQ(m.functions()[0].body, (std::vector<int>{2, 4}));
  EXPECT_EQ(m.enclosing_function(3)->qualified_name, "C.m.inner");
  EXPECT_EQ(m.enclosing_function(0), nullptr);
  ASSERT_EQ(m.classes().size(), 1u);
  EXPECT_EQ(m.classes()[0].name, "C");
}

TEST(Imports, PlainFromAndRelative) {
  auto m = parse_module(
      "import os, numpy as np\n"
      "from pkg.sub import A, B as Bee\n"
      "from . import sibling\n"
      "from ..up import *\n");
  const auto& imports = m.imports();
  ASSERT_EQ(imports.size(), 5u);
  EXPECT_EQ(imports[0].module, "os");
  EXPECT_TRUE(imports[0].names.empty());
  EXPECT_EQ(imports[1].module, "numpy");
  EXPECT_EQ(imports[1].aliases.at("np"), "numpy");
  EXPECT_EQ(imports[2].module, "pkg.sub");
  EXPECT_EQ(imports[2].names, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(imports[2].aliases.at("Bee"), "B");
  EXPECT_TRUE(imports[3].is_relative);
  EXPECT_EQ(imports[3].level, 1);
  EXPECT_EQ(imports[3].module, ".");
  EXPECT_EQ(imports[4].module, "..up");
  EXPECT_EQ(imports[4].level, 2);
  EXPECT_EQ(imports[4].names, std::vector<std::string>{"*"});
  EXPECT_EQ(collect_imports(m), imports);
}

TEST(Targets, AnnotatedFunction) {
  auto m = parse_module("def f(x: int) -> str: ...\n");
  auto targets = enumerate_targets(m, TargetMode::AnnotatedOnly);
  ASSERT_EQ(targets.size(), 2u);
  EXPECT_EQ(targets[0].kind, TargetKind::Argument);
  EXPECT_EQ(targets[0].name, "x");
  EXPECT_EQ(targets[0].annotation, "int");
  EXPECT_EQ(targets[0].enclosing_function, "f");
  EXPECT_EQ(targets[1].kind, TargetKind::ReturnValue);
  EXPECT_EQ(targets[1].name, "f");
  EXPECT_EQ(targets[1].annotation, "str");
}

TEST(Targets, AnnotatedOnlySkipsPlainBindings) {
  auto m = parse_module(
      "A: dict[str, int] = {}\n"
      "B = 1\n"
      "def g(self, y):\n"
      "    z: List[int] = []\n"
      "    w = 2\n");
  auto targets = enumerate_targets(m, TargetMode::AnnotatedOnly);
  ASSERT_EQ(targets.size(), 2u);
  EXPECT_EQ(targets[0].kind, TargetKind::GlobalVariable);
  EXPECT_EQ(targets[0].annotation, "dict[str, int]");
  EXPECT_EQ(targets[1].kind, TargetKind::LocalVariable);
  EXPECT_EQ(targets[1].name, "z");
  EXPECT_EQ(targets[1].location, (Location{4, 4}));
}

TEST(Targets, AllModeKeepsFirstBindingAndSkipsSelf) {
  auto m = parse_module(
      "class K:\n"
      "    attr = 0\n"
      "    def m(self, v):\n"
      "        n = v\n"
      "        n = n + 1\n"
      "        for i in range(n):\n"
      "            pass\n"
      "        return n\n");
  auto targets = enumerate_targets(m, TargetMode::All);
  std::vector<std::string> names;
  for (const auto& t : targets) names.push_back(t.name);
  EXPECT_EQ(names, (std::vector<std::string>{"v", "m", "n", "i"}));
  EXPECT_EQ(targets[1].kind, TargetKind::ReturnValue);
  EXPECT_FALSE(targets[1].annotation.has_value());
}
