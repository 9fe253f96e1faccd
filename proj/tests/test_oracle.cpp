#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pita/errors.hpp"
#include "pita/oracle.hpp"
#include "pita/parser.hpp"

using namespace pita;

namespace {

const char* kMarkov =
    "s(0,1):1/3 ; s(0,2):1/3 ; s(0,3):1/3.\n"
    "s(1,1):1/3 ; s(1,2):1/3 ; s(1,3):1/3 :- s(0,1).\n"
    "s(1,1):0.2 ; s(1,2):0.2 ; s(1,3):0.6 :- s(0,2).\n";

double query(const char* src, const char* goal) {
  Program p = parse_program(src);
  return oracle_query_prob(p, parse_query(p, goal));
}

}  // namespace

TEST_CASE("three ternary choices enumerate to 27 worlds") {
  Program p = parse_program(kMarkov);
  auto worlds = enumerate_worlds(p);
  CHECK(worlds.size() == 27);
  double total = 0.0;
  for (const Selection& w : worlds) {
    CHECK(w.choices.size() == 3);
    double prod = 1.0;
    // head index 1..3 of a three-headed clause has annotation 1/3 or the
    // second transition row's 0.2/0.2/0.6
    for (const AtomicChoice& c : w.choices) {
      REQUIRE(c.rule >= 1);
      REQUIRE(c.rule <= 3);
      REQUIRE(c.head >= 1);
      REQUIRE(c.head <= 3);
      const auto& clause = p.clauses[static_cast<size_t>(c.rule - 1)];
      prod *= clause.heads[static_cast<size_t>(c.head - 1)].ann.to_double();
    }
    CHECK(w.prob == doctest::Approx(prod).epsilon(1e-12));
    total += w.prob;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a single annotated fact yields two worlds") {
  Program p = parse_program("a:0.3.");
  auto worlds = enumerate_worlds(p);
  REQUIRE(worlds.size() == 2);
  CHECK(worlds[0].prob + worlds[1].prob == doctest::Approx(1.0));
  CHECK(std::abs(worlds[0].prob - worlds[1].prob) == doctest::Approx(0.4));
}

TEST_CASE("a deterministic program has one world of probability one") {
  Program p = parse_program("a.\nb :- a.");
  auto worlds = enumerate_worlds(p);
  REQUIRE(worlds.size() == 1);
  CHECK(worlds[0].prob == 1.0);
}

TEST_CASE("marginal of the two-step process") {
  CHECK(query(kMarkov, "s(1,1)") ==
        doctest::Approx(8.0 / 45.0).epsilon(1e-12));
}

TEST_CASE("overlapping alternatives marginalize inclusively") {
  CHECK(query("q :- a.\nq :- b.\na:0.2.\nb:0.4.", "q") ==
        doctest::Approx(0.52).epsilon(1e-12));
}

TEST_CASE("exclusive heads never co-occur") {
  CHECK(query("p :- a, b.\na:0.3 ; b:0.4.", "p") == 0.0);
}

TEST_CASE("shared origin is not double-counted") {
  CHECK(query("q :- a, b.\na :- c.\nb :- c.\nc:0.2.", "q") ==
        doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("stratified negation evaluates the perfect model") {
  CHECK(query("q :- \\+ a.\na:0.2.", "q") == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(query("q :- \\+ b.", "q") == 1.0);
}

TEST_CASE("unstratified worlds are rejected") {
  Program p = parse_program("p :- \\+ p.");
  CHECK_THROWS_AS((void)oracle_query_prob(p, parse_query(p, "p")), PitaError);
  try {
    (void)oracle_query_prob(p, parse_query(p, "p"));
  } catch (const PitaError& e) {
    CHECK(e.kind() == ErrorKind::NotStratified);
  }
}

TEST_CASE("instantiation bound trips TooManyWorlds") {
  std::string src;
  for (int i = 0; i < 21; ++i)
    src += "a" + std::to_string(i) + ":0.5.\n";
  Program p = parse_program(src);
  try {
    (void)enumerate_worlds(p);
    FAIL("expected TooManyWorlds");
  } catch (const PitaError& e) {
    CHECK(e.kind() == ErrorKind::TooManyWorlds);
  }
}

TEST_CASE("adding a plain fact never lowers a query probability") {
  const char* bodies[] = {
      "q :- a.\na:0.5.",
      "q :- a, b.\na:0.3.\nb:0.4.",
      "q :- \\+ a.\na:0.7.",
  };
  for (const char* src : bodies) {
    double before = query(src, "q");
    double after = query((std::string(src) + "\nq.").c_str(), "q");
    CHECK(after >= before - 1e-12);
    CHECK(after == doctest::Approx(1.0));
  }
}

TEST_CASE("variables range over the program constants") {
  // grounding p(X) :- e(X) over both constants
  double v = query("p :- e(X), f(X).\ne(a):0.5.\ne(b):0.5.\nf(b).", "p");
  CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("function_free spots structured arguments") {
  Program flat = parse_program("p(a).\nq(X) :- p(X).");
  CHECK(function_free(flat));
  Program deep = parse_program("p(f(X)) :- q(X).\nq(a).");
  CHECK_FALSE(function_free(deep));
}

TEST_CASE("explanations carry their choice products") {
  Program p = parse_program("q :- a.\nq :- b.\na:0.2.\nb:0.4.");
  ExplanationSet es = enumerate_explanations(p, parse_query(p, "q"));
  REQUIRE(es.explanations.size() == 2);
  double best = 0.0;
  for (const Explanation& e : es.explanations) best = std::max(best, e.prob);
  CHECK(best == doctest::Approx(0.4));
  CHECK(es.inconsistent == 0);
}

TEST_CASE("cyclic positive programs still enumerate worlds") {
  // least-model evaluation per world, not derivation enumeration
  CHECK(query("path(a,b) :- edge(a,b).\npath(a,b) :- edge(a,b), path(b,b).\n"
              "edge(a,b):0.5.\nedge(b,a):0.5.",
              "path(a,b)") == doctest::Approx(0.5).epsilon(1e-12));
}
