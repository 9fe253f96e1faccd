#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pita/algebra.hpp"
#include "pita/program.hpp"

namespace pita {

struct SolveOptions {
  uint64_t step_limit = 0;   // 0 = unlimited
  double timeout_s = 0.0;    // 0 = no timeout
  uint64_t fixpoint_round_cap = 1000000;
  size_t stack_bytes = size_t(1) << 30;
  std::string dump_bdd_path;  // prob mode: write the final query BDD here
};

struct SolveStats {
  uint64_t tables_created = 0;
  uint64_t store_nodes = 0;  // subgoal-store trie nodes allocated
  uint64_t variant_hits = 0;
  uint64_t answers = 0;
  uint64_t joins = 0;
  uint64_t steps = 0;
  uint64_t fixpoint_rounds = 0;
  uint64_t vars_created = 0;
};

struct SolveAnswer {
  std::string atom;
  ResultValue value;
};

struct SolveResult {
  std::vector<SolveAnswer> answers;  // sorted by atom text
  SolveStats stats;
};

// Tabled evaluation of goal against p under the given mode. A ground goal
// with no derivation yields one answer carrying the algebra's zero. Runs on
// a dedicated thread with a large stack: deep programs recurse deeply.
SolveResult solve(const Program& p, Mode mode, const Term* goal,
                  const SolveOptions& opts = {});

}  // namespace pita
