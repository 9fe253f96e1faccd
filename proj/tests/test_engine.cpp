#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pita/engine.hpp"
#include "pita/errors.hpp"
#include "pita/gen.hpp"
#include "pita/oracle.hpp"
#include "pita/parser.hpp"

using namespace pita;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string corpus(const char* name) {
  return read_file(std::string(PITA_PROGRAMS_DIR) + "/" + name);
}

double solve1(const char* src, const char* goal, Mode mode) {
  Program p = parse_program(src, mode == Mode::Poss);
  SolveResult r = solve(p, mode, parse_query(p, goal));
  REQUIRE(r.answers.size() == 1);
  return std::get<double>(r.answers[0].value);
}

ErrorKind solve_error(const char* src, const char* goal, Mode mode) {
  Program p = parse_program(src, mode == Mode::Poss);
  try {
    solve(p, mode, parse_query(p, goal));
  } catch (const PitaError& e) {
    return e.kind();
  }
  FAIL("expected an engine error");
  return ErrorKind::NonGroundKey;
}

}  // namespace

TEST_CASE("exclusive heads cannot fire together") {
  const char* src = "p :- a, b.\na:0.3 ; b:0.4.";
  CHECK(solve1(src, "p", Mode::Prob) == 0.0);
  CHECK(solve1(src, "p", Mode::IndExc) == doctest::Approx(0.12).epsilon(1e-9));
}

TEST_CASE("a shared ancestor is counted once by the BDD") {
  const char* src = "q :- a, b.\na :- c.\nb :- c.\nc:0.2.";
  CHECK(solve1(src, "q", Mode::Prob) == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(solve1(src, "q", Mode::IndExc) == doctest::Approx(0.04).epsilon(1e-9));
}

TEST_CASE("overlapping alternatives need inclusion-exclusion") {
  const char* src = "q :- a.\nq :- b.\na:0.2.\nb:0.4.";
  CHECK(solve1(src, "q", Mode::IndExc) == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(solve1(src, "q", Mode::Prob) == doctest::Approx(0.52).epsilon(1e-9));
}

TEST_CASE("two-step process marginal matches the enumeration oracle") {
  std::string src = corpus("markov.lpad");
  CHECK(solve1(src.c_str(), "s(1,1)", Mode::Prob) ==
        doctest::Approx(8.0 / 45.0).epsilon(1e-9));
  Program p = parse_program(src);
  CHECK(solve1(src.c_str(), "s(1,1)", Mode::Prob) ==
        doctest::Approx(oracle_query_prob(p, parse_query(p, "s(1,1)"))));
}

TEST_CASE("tables are shared between variant calls") {
  Program p = parse_program("p :- q(a), q(a).\nq(a):0.5.");
  SolveResult r = solve(p, Mode::Prob, parse_query(p, "p"));
  CHECK(r.stats.tables_created == 2);  // p and q(a)
  CHECK(r.stats.variant_hits == 1);
  CHECK(std::get<double>(r.answers[0].value) == doctest::Approx(0.5));
}

TEST_CASE("distinct instantiation patterns get distinct tables") {
  Program p = parse_program(
      "p :- r(a,b), s.\ns :- r(a,X), t(X).\nr(a,b).\nt(b).");
  SolveResult r = solve(p, Mode::Prob, parse_query(p, "p"));
  // p, r(a,b), s, r(a,X), t(b): the ground and open r-calls do not collide
  CHECK(r.stats.tables_created == 5);
}

TEST_CASE("variants under renaming share a table") {
  Program p = parse_program("p :- q(X,a).\np2 :- q(Y,a).\nq(b,a).\nr :- p, p2.");
  SolveResult r = solve(p, Mode::Prob, parse_query(p, "r"));
  // r, p, p2, and a single table for the renamed q call
  CHECK(r.stats.tables_created == 4);
  CHECK(r.stats.variant_hits == 1);
}

TEST_CASE("negation of an annotated fact complements it") {
  CHECK(solve1("q :- \\+ a.\na:0.2.", "q", Mode::Prob) ==
        doctest::Approx(0.8).epsilon(1e-9));
  CHECK(solve1("q :- \\+ a.\na:0.2.", "q", Mode::IndExc) ==
        doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("negation of an undefined predicate succeeds with one") {
  CHECK(solve1("q :- \\+ b.", "q", Mode::Prob) == 1.0);
}

TEST_CASE("negative self-dependency is rejected") {
  CHECK(solve_error("p :- \\+ p.", "p", Mode::Prob) == ErrorKind::NotStratified);
  CHECK(solve_error("p :- \\+ q.\nq :- p.", "p", Mode::Prob) ==
        ErrorKind::NotStratified);
}

TEST_CASE("negation needs ground arguments") {
  CHECK(solve_error("p :- \\+ q(X).\nq(a).", "p", Mode::Prob) ==
        ErrorKind::NonGroundNegation);
}

TEST_CASE("negation is refused by algebras without a complement") {
  CHECK(solve_error("p :- \\+ q.\nq:0.5.", "p", Mode::Count) ==
        ErrorKind::NegationUnsupported);
}

TEST_CASE("answers must come out ground") {
  CHECK(solve_error("p(X).", "p(Y)", Mode::Prob) == ErrorKind::NonGroundAnswer);
}

TEST_CASE("a ground goal without derivations reports the zero value") {
  Program p = parse_program("q :- a.");
  SolveResult r = solve(p, Mode::Prob, parse_query(p, "q"));
  REQUIRE(r.answers.size() == 1);
  CHECK(r.answers[0].atom == "q");
  CHECK(std::get<double>(r.answers[0].value) == 0.0);

  Program pc = parse_program("q :- a.");
  SolveResult rc = solve(pc, Mode::Count, parse_query(pc, "q"));
  CHECK(std::get<Count>(rc.answers[0].value) == 0);
}

TEST_CASE("open queries return one answer per ground instance") {
  Program p = parse_program("e(a):0.5.\ne(b):0.25.");
  SolveResult r = solve(p, Mode::Prob, parse_query(p, "e(X)"));
  REQUIRE(r.answers.size() == 2);
  CHECK(r.answers[0].atom == "e(a)");
  CHECK(std::get<double>(r.answers[0].value) == doctest::Approx(0.5));
  CHECK(r.answers[1].atom == "e(b)");
  CHECK(std::get<double>(r.answers[1].value) == doctest::Approx(0.25));
}

TEST_CASE("cyclic programs converge under idempotent joins") {
  std::string src = corpus("cyclic.lpad");
  CHECK(solve1(src.c_str(), "path(a,b)", Mode::Prob) ==
        doctest::Approx(0.5).epsilon(1e-9));
  Program p = parse_program(src);
  CHECK(oracle_query_prob(p, parse_query(p, "path(a,b)")) ==
        doctest::Approx(0.5).epsilon(1e-12));

  Program pp = parse_program(src, true);
  SolveResult r = solve(pp, Mode::Poss, parse_query(pp, "path(a,b)"));
  CHECK(std::get<double>(r.answers[0].value) == 0.5);
  CHECK(r.stats.fixpoint_rounds >= 1);
}

TEST_CASE("cyclic programs error out under non-idempotent joins") {
  std::string src = corpus("cyclic.lpad");
  CHECK(solve_error(src.c_str(), "path(a,b)", Mode::Count) ==
        ErrorKind::CyclicNonIdempotent);
  CHECK(solve_error(src.c_str(), "path(a,b)", Mode::IndExc) ==
        ErrorKind::CyclicNonIdempotent);
}

TEST_CASE("acyclic recursion needs no fixpoint rounds") {
  GeneratedProgram gp = gen_hmm(8, HmmSeqKind::Repeat, HmmEncoding::Reduced, 1);
  Program p = parse_program(gp.text);
  SolveResult r = solve(p, Mode::IndExc, parse_query(p, gp.goal));
  CHECK(r.stats.fixpoint_rounds == 0);
  CHECK(std::get<double>(r.answers[0].value) ==
        doctest::Approx(std::pow(2.0, 7) / std::pow(12.0, 8)).epsilon(1e-9));
}

TEST_CASE("one random variable per ground clause instance") {
  Program p1 = parse_program("p :- a, a.\na:0.5.");
  SolveResult r1 = solve(p1, Mode::Prob, parse_query(p1, "p"));
  CHECK(r1.stats.vars_created == 1);
  CHECK(std::get<double>(r1.answers[0].value) == doctest::Approx(0.5));

  Program p2 = parse_program("p :- q(a), q(b).\nq(a):0.5.\nq(b):0.5.");
  SolveResult r2 = solve(p2, Mode::Prob, parse_query(p2, "p"));
  CHECK(r2.stats.vars_created == 2);
  CHECK(std::get<double>(r2.answers[0].value) == doctest::Approx(0.25));

  // one annotated clause over two groundings makes two variables
  Program p3 = parse_program("p :- q(a), q(b).\nq(X):0.5 :- e(X).\ne(a).\ne(b).");
  SolveResult r3 = solve(p3, Mode::Prob, parse_query(p3, "p"));
  CHECK(r3.stats.vars_created == 2);
  CHECK(std::get<double>(r3.answers[0].value) == doctest::Approx(0.25));
}

TEST_CASE("clause order does not change the result") {
  std::vector<std::string> clauses = {
      "q :- a.", "q :- b, c.", "a:0.2.", "b:0.7.", "c :- a.",
  };
  std::sort(clauses.begin(), clauses.end());
  std::vector<double> seen;
  do {
    std::string src;
    for (const auto& c : clauses) src += c + "\n";
    seen.push_back(solve1(src.c_str(), "q", Mode::Prob));
  } while (std::next_permutation(clauses.begin(), clauses.end()));
  for (double v : seen) CHECK(v == doctest::Approx(seen[0]).epsilon(1e-9));
  // c is an alias of a, so q = a or (b and a) = a
  CHECK(seen[0] == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("builtin disequality filters ground pairs") {
  const char* src = "p(X,Y) :- e(X), e(Y), X \\= Y.\ne(a).\ne(b).";
  Program p = parse_program(src);
  SolveResult r = solve(p, Mode::Count, parse_query(p, "p(X,Y)"));
  REQUIRE(r.answers.size() == 2);
  CHECK(r.answers[0].atom == "p(a,b)");
  CHECK(r.answers[1].atom == "p(b,a)");
  CHECK(solve1(src, "p(a,a)", Mode::Prob) == 0.0);
  CHECK(solve1(src, "p(a,b)", Mode::Prob) == 1.0);
}

TEST_CASE("builtin unification binds inside bodies") {
  CHECK(solve1("q :- X = a, e(X).\ne(a):0.3.", "q", Mode::Prob) ==
        doctest::Approx(0.3));
  CHECK(solve1("q :- a = b.", "q", Mode::Prob) == 0.0);
}

TEST_CASE("step limit aborts runaway queries") {
  Program p = parse_program(corpus("markov.lpad"));
  SolveOptions opts;
  opts.step_limit = 3;
  try {
    solve(p, Mode::Prob, parse_query(p, "s(1,1)"), opts);
    FAIL("expected StepLimitExceeded");
  } catch (const PitaError& e) {
    CHECK(e.kind() == ErrorKind::StepLimitExceeded);
  }
}

TEST_CASE("concurrent solves on one program agree") {
  Program p = parse_program(corpus("markov.lpad"));
  const Term* goal = parse_query(p, "s(1,1)");
  std::vector<double> out(4, -1.0);
  {
    std::vector<std::thread> threads;
    for (auto& slot : out)
      threads.emplace_back([&p, goal, &slot] {
        SolveResult r = solve(p, Mode::Prob, goal);
        slot = std::get<double>(r.answers[0].value);
      });
    for (auto& t : threads) t.join();
  }
  for (double v : out) CHECK(v == doctest::Approx(8.0 / 45.0).epsilon(1e-9));
}

TEST_CASE("goals over builtins are not user atoms") {
  // the query parser already refuses "a = a", so build the term by hand
  Program p = parse_program("p(a).");
  CHECK_THROWS_AS(parse_query(p, "a = a"), ParseError);
  const Term* a = p.arena.atom(p.syms.intern("a"));
  const Term* goal = p.arena.compound(p.sym_eq, {a, a});
  try {
    solve(p, Mode::Prob, goal);
    FAIL("expected UnsupportedProgram");
  } catch (const PitaError& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedProgram);
  }
}

TEST_CASE("possibilistic necessity follows max-min through the chain") {
  std::string src = corpus("path_small.lpad");
  CHECK(solve1(src.c_str(), "path(a,c)", Mode::Poss) == 0.3);
  CHECK(solve1(src.c_str(), "path(a,b)", Mode::Poss) == 0.3);
  CHECK(solve1(src.c_str(), "path(a,a)", Mode::Poss) == 1.0);
  CHECK(solve1(src.c_str(), "path(c,a)", Mode::Poss) == 0.0);
}

TEST_CASE("viterbi explanations replay to their probability") {
  Program p = parse_program(corpus("markov.lpad"));
  SolveResult r = solve(p, Mode::Viterbi, parse_query(p, "s(1,1)"));
  const VitResult& v = std::get<VitResult>(r.answers[0].value);
  CHECK_FALSE(v.failed);
  CHECK(v.prob == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  REQUIRE(v.choices.size() == 2);
  double replay = 1.0;
  for (const VitChoice& c : v.choices) replay *= c.p;
  CHECK(replay == v.prob);
}

TEST_CASE("viterbi failure value survives to the result") {
  Program p = parse_program("q :- a.\na:0.5 :- b.");
  SolveResult r = solve(p, Mode::Viterbi, parse_query(p, "q"));
  CHECK(std::get<VitResult>(r.answers[0].value).failed);
}

TEST_CASE("oracle agreement on a negation ladder") {
  const char* src =
      "top :- \\+ mid, a.\nmid :- b, \\+ low.\nlow :- c.\n"
      "a:0.7.\nb:0.6.\nc:0.5.";
  Program p = parse_program(src);
  double oracle = oracle_query_prob(p, parse_query(p, "top"));
  CHECK(solve1(src, "top", Mode::Prob) == doctest::Approx(oracle).epsilon(1e-9));
}
