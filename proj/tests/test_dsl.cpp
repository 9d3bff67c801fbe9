#include <doctest.h>

#include <random>

#include "smrlmt/dsl/checker.hpp"
#include "smrlmt/dsl/lexer.hpp"
#include "smrlmt/dsl/parser.hpp"

using namespace smrlmt::dsl;

namespace {

std::vector<Tok> kinds(std::string_view src) {
  std::vector<Tok> out;
  for (const auto& t : tokenize(src)) out.push_back(t.kind);
  return out;
}

std::vector<std::string> messages(std::string_view body) {
  auto rels = parseSource("MR T {\n" + std::string(body) + "\n}");
  std::vector<std::string> out;
  for (const auto& d : diagnose(rels.at(0))) out.push_back(d.message);
  return out;
}

bool hasMessage(std::string_view body, std::string_view needle) {
  for (const auto& m : messages(body))
    if (m.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("lexer: tokens, keywords and positions") {
  auto toks = tokenize("package a.b;\nMR X { for (var v : 1..3) v <= 2; }");
  CHECK((toks.front().kind == Tok::Package));
  CHECK((toks.back().kind == Tok::End));
  CHECK((kinds("..") == std::vector<Tok>{Tok::DotDot, Tok::End}));
  CHECK((kinds("== != <= >= < > = + -") ==
         std::vector<Tok>{Tok::EqEq, Tok::NotEq, Tok::Le, Tok::Ge, Tok::Lt, Tok::Gt, Tok::Assign, Tok::Plus,
                          Tok::Minus, Tok::End}));
  auto mr = toks[5];
  CHECK((mr.kind == Tok::Mr));
  CHECK(mr.pos == SourcePos{2, 1});
}

TEST_CASE("lexer: literals and comments") {
  auto toks = tokenize("// line\n\"a\\\"b\\n\" /* block\n */ 42 true");
  REQUIRE(toks.size() == 4);
  CHECK(toks[0].text == "a\"b\n");
  CHECK(toks[1].text == "42");
  CHECK((toks[2].kind == Tok::True));
  CHECK(toks[1].pos == SourcePos{3, 5});
}

TEST_CASE("lexer: errors carry positions") {
  CHECK_THROWS_AS(tokenize("\"open"), LexError);
  CHECK_THROWS_AS(tokenize("/* never closed"), LexError);
  CHECK_THROWS_AS(tokenize("\"bad \\q\""), LexError);
  CHECK_THROWS_AS(tokenize("99999999999999999999"), LexError);
  try {
    tokenize("x\n  #");
    FAIL("expected LexError");
  } catch (const LexError& e) {
    CHECK(e.pos == SourcePos{2, 3});
  }
}

TEST_CASE("parser: relation structure") {
  auto rels = parseSource(R"(
package owasp;
import util.x;
MR A {
  var u = User(2);
  for (var action : Input(1).actions) {
    IMPLIES(isLogin(action), EQUAL(Input(2), Input(1)));
  }
}
MR B { TRUE(); }
)");
  REQUIRE(rels.size() == 2);
  CHECK(rels[0].package == "owasp");
  CHECK(rels[0].imports == std::vector<std::string>{"util.x"});
  CHECK(rels[0].qualifiedName() == "owasp.A");
  CHECK(rels[1].qualifiedName() == "owasp.B");
  REQUIRE(rels[0].body.size() == 2);
  CHECK(std::holds_alternative<VarDecl>(rels[0].body[0].node));
  const auto& loop = std::get<ForLoop>(rels[0].body[1].node);
  CHECK(loop.var == "action");
  CHECK(std::holds_alternative<FieldAccess>(loop.iterable.node));
  const auto& stmt = std::get<ExprStmt>(loop.body.at(0).node);
  const auto& implies = std::get<MetaOpExpr>(stmt.expr.node);
  CHECK((implies.op == MetaOp::Implies));
  CHECK(std::holds_alternative<CallExpr>(implies.args[0].node));
  CHECK(std::holds_alternative<MetaOpExpr>(implies.args[1].node));
  CHECK(std::holds_alternative<DataFnExpr>(std::get<MetaOpExpr>(implies.args[1].node).args[0].node));
}

TEST_CASE("parser: precedence") {
  auto r = parseSource("MR P { 1..a + 2 == 3; }").at(0);
  const auto& e = std::get<ExprStmt>(r.body[0].node).expr;
  const auto& range = std::get<RangeExpr>(e.node);
  CHECK(std::holds_alternative<IntLit>(range.lo->node));
  const auto& cmp = std::get<CompareExpr>(range.hi->node);
  CHECK(std::holds_alternative<ArithExpr>(cmp.lhs->node));
}

TEST_CASE("parser: errors report the offending token") {
  try {
    parseSource("MR X { for (action : Input(1).actions) TRUE(); }");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.pos == SourcePos{1, 13});
    CHECK(std::string(e.what()).find("expected 'var', found 'action'") != std::string::npos);
  }
  CHECK_THROWS_AS(parseSource("MR X { TRUE() }"), ParseError);
  CHECK_THROWS_AS(parseSource("MR X { TRUE();"), ParseError);
  CHECK_THROWS_AS(parseSource("MR { }"), ParseError);
  CHECK_THROWS_AS(parseSource("package p; banana"), ParseError);
  CHECK_THROWS_AS(parseSource("MR X { f(1,); }"), ParseError);
  CHECK_THROWS_AS(parseSource("MR X { 1 < 2 < 3; }"), ParseError);
  CHECK(parseSource("").empty());
}

TEST_CASE("checker: valid relations") {
  CHECK(messages("for (var a : Input(1).actions) { IMPLIES(isLogin(a), TRUE()); }").empty());
  CHECK(messages("var i = Input(1); EQUAL(Input(2), changeCredentials(i, User(2)));").empty());
  CHECK(messages("for (var p : 1..parameterCount(Action(1))) { p > 0; }").empty());
  CHECK(messages("EQUAL(Output(Input(1)), Output(Input(2)));").empty());
  CHECK(messages("isError(Output(Input(1), 1 + 1));").empty());
  CHECK(messages("RandomValue(\"int\") == 3;").empty());
}

TEST_CASE("checker: diagnostics") {
  CHECK(hasMessage("x == 1;", "unresolved variable x"));
  CHECK(hasMessage("frobnicate(1);", "unresolved function frobnicate"));
  CHECK(hasMessage("EQUAL(changeCredentials(Input(1), User(1)), Input(2));",
                   "EQUAL target must be an input designator"));
  CHECK(hasMessage("var s = \"x\"; EQUAL(s, \"x\");", "EQUAL target must be an input designator"));
  CHECK(hasMessage("EQUAL(Input(1), User(1));", "EQUAL compares Input with User"));
  CHECK(hasMessage("Input(1);", "metamorphic expression must be boolean, got Input"));
  CHECK(hasMessage("isLogin(Action(1), Action(2));", "isLogin expects 1 argument, got 2"));
  CHECK(hasMessage("IMPLIES(TRUE());", "IMPLIES expects 2 arguments, got 1"));
  CHECK(hasMessage("AND(TRUE());", "AND expects"));
  CHECK(hasMessage("NOT(1);", "must be boolean"));
  CHECK(hasMessage("isLogin(User(1));", "argument 1 of isLogin must be"));
  CHECK(hasMessage("for (var a : 3) { TRUE(); }", "for loop needs a list or range"));
  CHECK(hasMessage("Input(1).nope == 1;", "unknown field .nope"));
  CHECK(hasMessage("RandomValue(\"float\") == 1;", "RandomValue expects one of"));
  CHECK(hasMessage("var a = 1; var a = 2;", "variable a already declared"));
  CHECK(hasMessage("\"a\" + 1 == 2;", "arithmetic needs int operands"));
  // loop variables are scoped to the loop
  CHECK(hasMessage("for (var a : 1..2) { a > 0; } a > 0;", "unresolved variable a"));
}

TEST_CASE("checker: check() throws with every diagnostic") {
  auto r = parseSource("MR T { x == 1; y == 2; }").at(0);
  try {
    check(r);
    FAIL("expected SemError");
  } catch (const SemError& e) {
    CHECK(e.diagnostics.size() == 2);
  }
  auto ok = parseSource("MR T { TRUE(); }").at(0);
  CHECK(sameStructure(check(ok), ok));
}

TEST_CASE("checker: duplicate names in a set") {
  auto a = parseSource("package p; MR T { TRUE(); } MR T { FALSE(); }");
  auto d = diagnoseAll(a);
  REQUIRE(d.size() == 1);
  CHECK(d[0].message == "duplicate relation p.T");
  auto b = parseSource("package p; MR T { TRUE(); }");
  auto c = parseSource("package q; MR T { TRUE(); }");
  b.push_back(c[0]);
  CHECK(diagnoseAll(b).empty());
}

TEST_CASE("diagnostic format") {
  Diagnostic d{{3, 7}, Severity::Error, "boom"};
  CHECK(format(d, "x.smrl") == "x.smrl:3:7: error: boom");
  d.severity = Severity::Warning;
  CHECK(format(d, "x.smrl") == "x.smrl:3:7: warning: boom");
}

namespace {

// Random source text that the grammar accepts; checked only for syntax.
struct Gen {
  std::mt19937 rng;
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  std::string primary(int depth) {
    switch (depth <= 0 ? pick(4) : pick(9)) {
      case 0: return std::to_string(pick(1000));
      case 1: {
        static const char* strs[] = {"\"\"", "\"HTTP\"", "\"a\\\"q\\\\\"", "\"tab\\t\""};
        return strs[pick(4)];
      }
      case 2: return pick(2) ? "true" : "false";
      case 3: {
        static const char* ids[] = {"a", "action", "par", "x1"};
        return ids[pick(4)];
      }
      case 4: return "Input(" + expr(depth - 1) + ")";
      case 5: {
        static const char* ops[] = {"AND", "OR", "IMPLIES", "EQUAL", "NOT", "TRUE", "FALSE"};
        std::string op = ops[pick(7)];
        int n = op == "TRUE" || op == "FALSE" ? 0 : op == "NOT" ? 1 : 2 + (op == "AND" || op == "OR" ? pick(2) : 0);
        return op + "(" + args(n, depth) + ")";
      }
      case 6: {
        static const char* fns[] = {"isLogin", "changeCredentials", "setChannel", "f"};
        return std::string(fns[pick(4)]) + "(" + args(pick(3), depth) + ")";
      }
      case 7: return "(" + expr(depth - 1) + ")";
      default: {
        static const char* fields[] = {"actions", "url", "position", "length"};
        return primary(depth - 1) + "." + fields[pick(4)];
      }
    }
  }
  std::string args(int n, int depth) {
    std::string s;
    for (int i = 0; i < n; ++i) s += (i ? ", " : "") + expr(depth - 1);
    return s;
  }
  std::string additive(int depth) {
    std::string s = primary(depth);
    for (int k = pick(3); k > 0 && depth > 0; --k) s += (pick(2) ? " + " : " - ") + primary(depth - 1);
    return s;
  }
  std::string compare(int depth) {
    static const char* ops[] = {" == ", " != ", " < ", " <= ", " > ", " >= "};
    return pick(3) ? additive(depth) : additive(depth) + ops[pick(6)] + additive(depth - 1);
  }
  std::string expr(int depth) { return pick(5) ? compare(depth) : compare(depth) + " .. " + compare(depth - 1); }

  std::string stmt(int depth) {
    switch (depth <= 0 ? 2 : pick(3)) {
      case 0: return "for (var a : " + expr(2) + ") {\n" + stmt(depth - 1) + stmt(depth - 1) + "}\n";
      case 1: return "var v" + std::to_string(pick(100)) + " = " + expr(2) + ";\n";
      default: return expr(3) + ";\n";
    }
  }
};

}  // namespace

TEST_CASE("print is a right inverse of parse") {
  Gen g{std::mt19937(2024)};
  for (int i = 0; i < 500; ++i) {
    std::string src = "package p.q;\nMR R" + std::to_string(i) + " {\n";
    for (int k = g.pick(4) + 1; k > 0; --k) src += g.stmt(2);
    src += "}\n";
    CAPTURE(src);
    auto parsed = parseSource(src);
    REQUIRE(parsed.size() == 1);
    auto printed = print(parsed[0]);
    CAPTURE(printed);
    auto again = parseSource(printed);
    REQUIRE(again.size() == 1);
    CHECK(sameStructure(parsed[0], again[0]));
    CHECK(print(again[0]) == printed);
  }
}
