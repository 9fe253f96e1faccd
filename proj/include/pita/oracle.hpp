#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pita/program.hpp"

namespace pita {

// One head pick for one ground clause instance. head runs 1..n over the
// explicit heads; n+1 denotes the implicit null head when the annotations
// leave mass unaccounted for.
struct AtomicChoice {
  int rule = 0;
  std::string key;
  int head = 0;

  auto operator<=>(const AtomicChoice&) const = default;
};

// A total choice: one pick per relevant annotated ground instance.
struct Selection {
  std::vector<AtomicChoice> choices;
  double prob = 1.0;
};

// A consistent composite choice collected along one derivation, with the
// product of its annotations. Repeated uses of the same pick stay in the
// list, mirroring how the engine threads values through conjunctions.
struct Explanation {
  std::vector<AtomicChoice> choices;
  double prob = 1.0;
};

struct ExplanationSet {
  std::vector<Explanation> explanations;  // consistent derivations only
  size_t derivations = 0;                 // all successful derivations
  size_t inconsistent = 0;
};

struct OracleLimits {
  size_t max_annotated_instances = 20;
  size_t max_worlds = 1u << 20;
  size_t max_instances = 100000;
  int max_depth = 512;
  size_t max_derivations = 1u << 20;
  uint64_t max_steps = 50'000'000;
};

// Exhaustive world enumeration by brute-force grounding. Requires a
// function-free program (no compound argument containing variables).
// Probabilities of the yielded selections sum to 1.
std::vector<Selection> enumerate_worlds(const Program& p, const OracleLimits& lim = {});

// P(q) = sum of P(w) over worlds whose model satisfies q. Function-free
// programs (stratified negation allowed) are fully grounded; programs with
// structured terms are grounded by exhaustive all-heads resolution from the
// query and must be negation-free.
double oracle_query_prob(const Program& p, const Term* ground_query,
                         const OracleLimits& lim = {});

// Every derivation of the query under the all-heads program, as composite
// choices. Positive programs only; the resolution tree must be finite.
ExplanationSet enumerate_explanations(const Program& p, const Term* query,
                                      const OracleLimits& lim = {});

// True when every argument of every atom is a variable or a ground term.
bool function_free(const Program& p);

}  // namespace pita
