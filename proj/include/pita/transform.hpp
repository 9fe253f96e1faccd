#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pita/algebra.hpp"
#include "pita/program.hpp"

namespace pita {

enum class StepKind {
  One,                 // out = one
  CallPos,             // out = or over the answers of atom
  CallNegConditional,  // out = not(answer value) if atom has an answer, else one
  And,                 // out = and(in1, in2)
  GetVar,              // var_slot = var id for (rule, key(vc)); general flavor
  EqualityVar,         // out = equality(var_slot, head_index)
  EqualityList,        // out = equality(anns, head_index) for (rule, key(vc))
  Builtin,             // =/2 or \=/2; succeeds or fails, writes no slot
};

struct Step {
  StepKind kind;
  int out = -1;
  int in1 = -1;
  int in2 = -1;
  const Term* atom = nullptr;  // CallPos / CallNegConditional / Builtin
  int rule = 0;                // GetVar / EqualityList
  std::vector<double> anns;    // GetVar / EqualityList
  int var_slot = -1;           // GetVar (written) / EqualityVar (read)
  int head_index = 0;          // EqualityVar / EqualityList, 1-based
};

// One executable clause of the transformed program: the source clause
// specialized to one explicit head. Slots are single-assignment; the engine
// runs the steps in order against a fresh slot array per resolution.
struct InstrumentedClause {
  int clause_id = 0;
  int head_index = 0;  // 1-based among the explicit heads
  const Term* head = nullptr;
  int32_t nvars = 0;
  std::vector<std::string> var_names;
  std::vector<int32_t> vc;
  int nslots = 0;
  int n_var_slots = 0;
  int result_slot = -1;
  std::vector<Step> steps;
};

struct TransformedProgram {
  Flavor flavor = Flavor::Simplified;
  std::vector<InstrumentedClause> clauses;
  std::map<Pred, std::vector<uint32_t>> by_pred;
};

TransformedProgram pita_transform(const Program& p, Flavor flavor);

// Same functor, arity + 1: the appended argument carries the clause's value.
const Term* add_d_arg(TermArena& arena, const Term* atom, const Term* d);

// Pseudo-Prolog rendering for --dump-transform.
std::string dump_transformed(const TransformedProgram& tp, const Program& p);

}  // namespace pita
