#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pita/rational.hpp"
#include "pita/symbols.hpp"
#include "pita/term.hpp"

namespace pita {

// (functor, arity) pair identifying a predicate.
struct Pred {
  Sym functor = 0;
  uint32_t arity = 0;
  auto operator<=>(const Pred&) const = default;
};

struct Literal {
  bool negated = false;
  const Term* atom = nullptr;
};

// One clause of an annotated-disjunction program. Variables are clause-local
// and numbered 0..nvars-1 in first-occurrence order (head first, then body).
// A plain definite clause is the special case of a single head annotated 1.
struct AnnotatedClause {
  struct Head {
    const Term* atom = nullptr;
    Rational ann = Rational::one();
  };

  int id = 0;  // 1-based position in the source program
  std::vector<Head> heads;
  std::vector<Literal> body;
  int32_t nvars = 0;
  std::vector<std::string> var_names;

  // all distinct clause variables in first-occurrence order (= 0..nvars-1
  // given the numbering scheme); a ground binding of vc identifies one
  // instance of the clause
  std::vector<int32_t> vc;

  // 1 - sum of head annotations; > 0 means the clause may select no head
  Rational null_mass = Rational::zero();

  bool deterministic() const {
    return heads.size() == 1 && heads[0].ann == Rational::one();
  }

  // head annotations, plus the null mass when the heads do not sum to 1
  std::vector<Rational> annotations() const {
    std::vector<Rational> out;
    out.reserve(heads.size() + 1);
    for (const Head& h : heads) out.push_back(h.ann);
    if (Rational::zero() < null_mass) out.push_back(null_mass);
    return out;
  }
};

struct Program {
  SymbolTable syms;
  TermArena arena;
  std::vector<AnnotatedClause> clauses;
  std::set<Pred> table_directives;
  std::map<Pred, std::vector<uint32_t>> by_pred;

  // interned on construction so hot paths never mutate the symbol table
  Sym sym_dot, sym_nil, sym_eq, sym_neq;

  Program() {
    sym_dot = syms.intern(".");
    sym_nil = syms.intern("[]");
    sym_eq = syms.intern("=");
    sym_neq = syms.intern("\\=");
  }

  Program(const Program&) = delete;
  Program& operator=(const Program&) = delete;
  Program(Program&&) = default;
  Program& operator=(Program&&) = default;

  static Pred pred_of(const Term* atom) {
    return Pred{atom->functor, static_cast<uint32_t>(atom->arity())};
  }

  bool is_builtin(const Term* atom) const {
    return atom->arity() == 2 && (atom->functor == sym_eq || atom->functor == sym_neq);
  }

  void index_clauses() {
    by_pred.clear();
    for (uint32_t i = 0; i < clauses.size(); ++i)
      for (const auto& h : clauses[i].heads) {
        auto& v = by_pred[pred_of(h.atom)];
        if (v.empty() || v.back() != i) v.push_back(i);
      }
  }

  std::string pred_name(Pred p) const {
    return syms.name(p.functor) + "/" + std::to_string(p.arity);
  }
};

}  // namespace pita
