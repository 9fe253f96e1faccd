#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pita/symbols.hpp"

namespace pita {

enum class TermKind : uint8_t { Var, Compound, Int, Float };

// Immutable term node. Terms are owned by a TermArena and passed around as
// raw pointers; args never own their children, so destruction is flat even
// for lists with 10^5 elements. `ground` and `hash` are computed once at
// construction (children are always built first).
struct Term {
  TermKind kind = TermKind::Var;
  bool ground = false;
  Sym functor = 0;
  int32_t var = -1;
  int64_t ival = 0;
  double fval = 0.0;
  uint64_t hash = 0;
  std::vector<const Term*> args;

  bool is_var() const { return kind == TermKind::Var; }
  bool is_compound() const { return kind == TermKind::Compound; }
  bool is_atom() const { return kind == TermKind::Compound && args.empty(); }
  size_t arity() const { return args.size(); }
};

class TermArena {
public:
  const Term* var(int32_t idx);
  const Term* atom(Sym f);
  const Term* compound(Sym f, std::vector<const Term*> args);
  const Term* integer(int64_t v);
  const Term* real(double v);
  size_t size() const { return pool_.size(); }

private:
  Term* fresh() { return &pool_.emplace_back(); }
  std::deque<Term> pool_;
};

bool equal_terms(const Term* a, const Term* b);
int32_t max_var(const Term* t);

// Mutable binding store used during resolution. Variables are identified by
// their integer id; bindings are trailed so they can be undone on backtrack.
struct Env {
  std::vector<const Term*> slots;
  std::vector<int32_t> trail;

  const Term* deref(const Term* t) const {
    while (t->kind == TermKind::Var) {
      size_t v = static_cast<size_t>(t->var);
      if (v >= slots.size() || slots[v] == nullptr) break;
      t = slots[v];
    }
    return t;
  }

  void bind(int32_t v, const Term* t) {
    if (static_cast<size_t>(v) >= slots.size()) slots.resize(v + 1, nullptr);
    slots[v] = t;
    trail.push_back(v);
  }

  size_t mark() const { return trail.size(); }

  void undo_to(size_t m) {
    while (trail.size() > m) {
      slots[trail.back()] = nullptr;
      trail.pop_back();
    }
  }
};

bool unify(const Term* a, const Term* b, Env& env, bool occurs_check = true);

// One-shot unification of two terms sharing a variable id space. On success
// returns the most general unifier with every binding fully dereferenced.
std::optional<std::map<int32_t, const Term*>> unify_terms(const Term* a, const Term* b,
                                                          TermArena& arena);

// Resolves t under env, sharing unchanged subtrees. Unbound variables stay.
const Term* instantiate(const Term* t, const Env& env, TermArena& arena);

// Single-pass substitution: replaced variables are not substituted again.
const Term* apply_subst(const Term* t, const std::map<int32_t, const Term*>& s,
                        TermArena& arena);

// Renames the variables of a tuple to 0,1,2,... in first-occurrence order.
struct CanonicalResult {
  std::vector<const Term*> args;
  int32_t nvars = 0;
};
CanonicalResult canonicalize(std::span<const Term* const> args, TermArena& arena);

// Hash/equality over structural term identity, for pointer-keyed containers.
struct TermPtrHash {
  size_t operator()(const Term* t) const { return static_cast<size_t>(t->hash); }
};
struct TermPtrEq {
  bool operator()(const Term* a, const Term* b) const { return equal_terms(a, b); }
};

std::string float_repr(double v);
std::string term_to_string(const Term* t, const SymbolTable& syms,
                           const std::vector<std::string>* var_names = nullptr);

// Canonical textual form of a ground argument tuple, arguments joined by
// commas. The empty tuple maps to "". Raises NonGroundKey on variables.
std::string grounding_key(std::span<const Term* const> args, const SymbolTable& syms);

}  // namespace pita
