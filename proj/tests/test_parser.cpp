#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pita/parser.hpp"
#include "pita/term.hpp"

using namespace pita;

TEST_CASE("annotated disjunction parses with exact rational annotations") {
  Program p = parse_program("s(0,1):1/3 ; s(0,2):1/3 ; s(0,3):1/3.");
  REQUIRE(p.clauses.size() == 1);
  const AnnotatedClause& c = p.clauses[0];
  CHECK(c.id == 1);
  REQUIRE(c.heads.size() == 3);
  for (const auto& h : c.heads) CHECK(h.ann == Rational(1, 3));
  CHECK(c.body.empty());
  CHECK(c.vc.empty());
  CHECK(c.null_mass == Rational::zero());
  CHECK(c.annotations().size() == 3);
}

TEST_CASE("definite clause gets the implicit annotation 1") {
  Program p = parse_program("path(X,Y) :- path(X,Z), edge(Z,Y).");
  REQUIRE(p.clauses.size() == 1);
  const AnnotatedClause& c = p.clauses[0];
  CHECK(c.deterministic());
  CHECK(c.heads[0].ann == Rational::one());
  CHECK(c.nvars == 3);
  CHECK(c.vc.size() == 3);
  REQUIRE(c.body.size() == 2);
  CHECK_FALSE(c.body[0].negated);
}

TEST_CASE("unaccounted probability mass becomes the implicit null head") {
  Program p = parse_program("a:0.3.");
  const AnnotatedClause& c = p.clauses[0];
  CHECK(c.heads.size() == 1);
  CHECK(c.null_mass == Rational(7, 10));
  auto anns = c.annotations();
  REQUIRE(anns.size() == 2);
  CHECK(anns[0] == Rational(3, 10));
  CHECK(anns[1] == Rational(7, 10));
}

TEST_CASE("dangling head separator is a syntax error") {
  CHECK_THROWS_AS(parse_program("a:0.3 ;"), ParseError);
  CHECK_THROWS_AS(parse_program("a:0.3 ; ."), ParseError);
}

TEST_CASE("annotations summing past one are rejected") {
  CHECK_THROWS_AS(parse_program("a:0.6 ; b:0.5."), ParseError);
  CHECK_THROWS_AS(parse_program("a:1.5."), ParseError);
  CHECK_THROWS_AS(parse_program("a:0."), ParseError);
  // exact rational thirds sum to exactly one
  CHECK_NOTHROW(parse_program("a:1/3 ; b:1/3 ; c:1/3."));
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_program("a:0.5.\nb :- .\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.col() > 0);
  }
}

TEST_CASE("list sugar desugars to cons pairs") {
  Program p = parse_program("p([a,b]).\nq([H|T]) :- p([H|T]).");
  const Term* lst = p.clauses[0].heads[0].atom->args[0];
  REQUIRE(lst->arity() == 2);
  CHECK(p.syms.name(lst->functor) == ".");
  CHECK(term_to_string(lst, p.syms) == "[a,b]");
  const Term* open = p.clauses[1].heads[0].atom->args[0];
  CHECK(p.syms.name(open->functor) == ".");
  CHECK(open->args[1]->is_var());
}

TEST_CASE("query parsing accepts one atom and rejects clause syntax") {
  Program p = parse_program("p(a).");
  const Term* q = parse_query(p, "hmm([a,c,g,t])");
  CHECK(term_to_string(q, p.syms) == "hmm([a,c,g,t])");
  CHECK(parse_query(p, "path(hgnc_620, hgnc_983).") != nullptr);
  CHECK_THROWS_AS(parse_query(p, "p :- q"), ParseError);
  CHECK_THROWS_AS(parse_query(p, "p, q"), ParseError);
  CHECK_THROWS_AS(parse_query(p, ""), ParseError);
}

TEST_CASE("query variables are numbered independently of clauses") {
  Program p = parse_program("p(X) :- q(X).");
  const Term* q = parse_query(p, "p(Y)");
  CHECK(q->args[0]->var == 0);
}

TEST_CASE("printing then reparsing is a fixed point") {
  std::string src =
      "s(0,1):1/3 ; s(0,2):1/3 ; s(0,3):1/3.\n"
      "a:0.3.\n"
      "path(X,Y) :- path(X,Z), edge(Z,Y).\n"
      "q :- \\+ a, b.\n"
      "p([H|T],3) :- r(H), p(T,2.5).\n"
      ":- table path/2.\n";
  Program p1 = parse_program(src);
  std::string printed = program_to_string(p1);
  Program p2 = parse_program(printed);
  CHECK(program_to_string(p2) == printed);
  CHECK(p2.clauses.size() == p1.clauses.size());
  // symbol ids depend on interning order, so compare directives by name
  CHECK(p2.table_directives.size() == p1.table_directives.size());
  CHECK(p2.table_directives.contains(Pred{p2.syms.lookup("path"), 2}));
}

TEST_CASE("table directives are collected") {
  Program p = parse_program(":- table path/2.\npath(a,b).");
  Pred pred{p.syms.lookup("path"), 2};
  CHECK(p.table_directives.contains(pred));
}

TEST_CASE("comments and layout are skipped") {
  Program p = parse_program("% leading comment\n  a:0.5. % trailing\n\n% end\n");
  CHECK(p.clauses.size() == 1);
}

TEST_CASE("negated literals parse into the body flags") {
  Program p = parse_program("q :- \\+ a, b.");
  REQUIRE(p.clauses[0].body.size() == 2);
  CHECK(p.clauses[0].body[0].negated);
  CHECK_FALSE(p.clauses[0].body[1].negated);
}

TEST_CASE("builtin comparisons parse inside bodies") {
  Program p = parse_program("p(X,Y) :- e(X), e(Y), X \\= Y.\nq :- a = a.");
  CHECK(p.is_builtin(p.clauses[0].body[2].atom));
  CHECK(p.is_builtin(p.clauses[1].body[0].atom));
}

TEST_CASE("poss mode accepts single annotated heads only") {
  Program p = parse_program("edge(a,b):0.3.\npath(X,X).", true);
  CHECK(p.clauses[0].heads.size() == 1);
  CHECK(p.clauses[0].heads[0].ann == Rational(3, 10));
  CHECK_THROWS_AS(parse_program("a:0.3 ; b:0.3.", true), ParseError);
}

TEST_CASE("clause ids are dense from one") {
  Program p = parse_program("a:0.5.\nb :- a.\nc :- b.");
  for (size_t i = 0; i < p.clauses.size(); ++i)
    CHECK(p.clauses[i].id == static_cast<int>(i) + 1);
}
