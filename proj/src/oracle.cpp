#include "pita/oracle.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "pita/errors.hpp"

namespace pita {

namespace {

struct GroundInstance {
  const AnnotatedClause* clause = nullptr;
  std::string key;
  std::vector<const Term*> head_atoms;
  std::vector<Literal> body;  // ground; satisfied built-ins already removed
};

bool is_annotated(const AnnotatedClause& c) { return !c.deterministic(); }

// options per annotated instance: explicit heads plus the implicit null head
int option_count(const AnnotatedClause& c) {
  return static_cast<int>(c.heads.size()) + (Rational::zero() < c.null_mass ? 1 : 0);
}

double option_prob(const AnnotatedClause& c, int opt) {
  if (opt < static_cast<int>(c.heads.size())) return c.heads[opt].ann.to_double();
  return c.null_mass.to_double();
}

// ---------------------------------------------------------------------------
// full grounding (function-free programs, stratified negation allowed)
// ---------------------------------------------------------------------------

struct FullGrounding {
  TermArena arena;
  std::vector<GroundInstance> instances;
  std::vector<size_t> annotated_idx;
  std::vector<size_t> det_idx;

  // atom-level stratification over every possible head choice
  std::unordered_map<const Term*, int, TermPtrHash, TermPtrEq> atom_ids;
  std::vector<int> scc_of_atom;  // topological stratum, dependencies first
  std::vector<int> ann_pos;      // instance index -> position in annotated_idx, -1 otherwise

  int atom_id(const Term* t) {
    auto it = atom_ids.find(t);
    if (it != atom_ids.end()) return it->second;
    int id = static_cast<int>(atom_ids.size());
    atom_ids.emplace(t, id);
    return id;
  }
};

void collect_universe(const Program& p, const Term* query,
                      std::vector<const Term*>& universe) {
  std::unordered_set<const Term*, TermPtrHash, TermPtrEq> seen;
  auto add_args = [&](const Term* atom) {
    for (const Term* a : atom->args)
      if (a->ground && seen.insert(a).second) universe.push_back(a);
  };
  for (const auto& c : p.clauses) {
    for (const auto& h : c.heads) add_args(h.atom);
    for (const auto& l : c.body) add_args(l.atom);
  }
  if (query) add_args(query);
}

// evaluates ground built-ins; false means the instance is impossible
bool reduce_builtins(const Program& p, std::vector<Literal>& body) {
  std::vector<Literal> out;
  for (const Literal& l : body) {
    if (p.is_builtin(l.atom)) {
      bool eq = equal_terms(l.atom->args[0], l.atom->args[1]);
      bool want_eq = l.atom->functor == p.sym_eq;
      if (eq != want_eq) return false;
    } else {
      out.push_back(l);
    }
  }
  body = std::move(out);
  return true;
}

FullGrounding ground_fully(const Program& p, const Term* query, const OracleLimits& lim) {
  FullGrounding g;
  std::vector<const Term*> universe;
  collect_universe(p, query, universe);

  for (const auto& c : p.clauses) {
    size_t n = universe.size();
    if (c.nvars > 0 && n == 0) continue;
    double count = 1;
    for (int32_t i = 0; i < c.nvars; ++i) count *= static_cast<double>(n);
    if (count + g.instances.size() > static_cast<double>(lim.max_instances))
      raise(ErrorKind::TooManyWorlds,
            "grounding of clause " + std::to_string(c.id) + " is too large");

    std::vector<size_t> odo(c.nvars, 0);
    Env env;
    env.slots.assign(c.nvars, nullptr);
    for (;;) {
      for (int32_t i = 0; i < c.nvars; ++i) env.slots[i] = universe[odo[i]];
      GroundInstance inst;
      inst.clause = &c;
      for (const auto& h : c.heads)
        inst.head_atoms.push_back(instantiate(h.atom, env, g.arena));
      bool ok = true;
      for (const auto& l : c.body) {
        const Term* a = instantiate(l.atom, env, g.arena);
        if (!a->ground) { ok = false; break; }  // var never occurs: impossible here
        inst.body.push_back({l.negated, a});
      }
      for (const auto& h : inst.head_atoms)
        if (!h->ground) ok = false;
      if (ok && reduce_builtins(p, inst.body)) {
        std::vector<const Term*> vc_terms;
        vc_terms.reserve(c.nvars);
        for (int32_t i = 0; i < c.nvars; ++i) vc_terms.push_back(env.slots[i]);
        inst.key = grounding_key(vc_terms, p.syms);
        if (is_annotated(c))
          g.annotated_idx.push_back(g.instances.size());
        else
          g.det_idx.push_back(g.instances.size());
        g.instances.push_back(std::move(inst));
      }
      // odometer
      int32_t i = 0;
      for (; i < c.nvars; ++i) {
        if (++odo[i] < n) break;
        odo[i] = 0;
      }
      if (i == c.nvars) break;
    }
  }

  if (g.annotated_idx.size() > lim.max_annotated_instances)
    raise(ErrorKind::TooManyWorlds,
          std::to_string(g.annotated_idx.size()) + " annotated ground instances exceed the bound of " +
              std::to_string(lim.max_annotated_instances));
  double worlds = 1;
  for (size_t i : g.annotated_idx) worlds *= option_count(*g.instances[i].clause);
  if (worlds > static_cast<double>(lim.max_worlds))
    raise(ErrorKind::TooManyWorlds, "world count exceeds the enumeration bound");
  g.ann_pos.assign(g.instances.size(), -1);
  for (size_t i = 0; i < g.annotated_idx.size(); ++i)
    g.ann_pos[g.annotated_idx[i]] = static_cast<int>(i);
  return g;
}

// Tarjan over the atom dependency graph of the full grounding. Emits SCCs
// dependencies-first; a negative edge inside one SCC is not stratified.
void stratify(FullGrounding& g, const Program& p) {
  for (const auto& inst : g.instances) {
    for (const Term* h : inst.head_atoms) g.atom_id(h);
    for (const auto& l : inst.body) g.atom_id(l.atom);
  }
  int n = static_cast<int>(g.atom_ids.size());
  std::vector<std::vector<std::pair<int, bool>>> edges(n);  // (target, negated)
  bool any_neg = false;
  for (const auto& inst : g.instances)
    for (const Term* h : inst.head_atoms) {
      int hid = g.atom_id(h);
      for (const auto& l : inst.body) {
        edges[hid].push_back({g.atom_id(l.atom), l.negated});
        any_neg = any_neg || l.negated;
      }
    }

  g.scc_of_atom.assign(n, -1);
  if (n == 0) return;

  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<bool> on_stack(n, false);
  int counter = 0, scc_count = 0;

  // iterative Tarjan
  struct Frame { int v; size_t ei; };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.ei < edges[f.v].size()) {
        int w = edges[f.v][f.ei++].first;
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        int v = f.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        if (low[v] == index[v]) {
          for (;;) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            g.scc_of_atom[w] = scc_count;
            if (w == v) break;
          }
          scc_count++;
        }
      }
    }
  }

  if (any_neg) {
    for (const auto& inst : g.instances)
      for (const Term* h : inst.head_atoms) {
        int hs = g.scc_of_atom[g.atom_id(h)];
        for (const auto& l : inst.body)
          if (l.negated && g.scc_of_atom[g.atom_id(l.atom)] == hs)
            raise(ErrorKind::NotStratified,
                  "negative dependency inside a recursive component (" +
                      term_to_string(h, p.syms) + ")");
      }
  }
}

// model of one world of a fully grounded program, by strata
bool world_satisfies(FullGrounding& g, const std::vector<int>& choice, const Term* query) {
  int nstrata = 0;
  for (int s : g.scc_of_atom) nstrata = std::max(nstrata, s + 1);
  std::vector<bool> derived(g.atom_ids.size(), false);

  // chosen head atom per instance (nullptr for the null choice)
  std::vector<const Term*> head_of(g.instances.size(), nullptr);
  std::vector<std::pair<int, size_t>> by_stratum;  // (stratum, instance)
  for (size_t i = 0; i < g.instances.size(); ++i) {
    const GroundInstance& inst = g.instances[i];
    const Term* h = nullptr;
    if (is_annotated(*inst.clause)) {
      int opt = choice[g.ann_pos[i]];
      if (opt < static_cast<int>(inst.head_atoms.size())) h = inst.head_atoms[opt];
    } else {
      h = inst.head_atoms[0];
    }
    if (h) {
      head_of[i] = h;
      by_stratum.push_back({g.scc_of_atom[g.atom_id(h)], i});
    }
  }
  std::sort(by_stratum.begin(), by_stratum.end());

  size_t lo = 0;
  while (lo < by_stratum.size()) {
    size_t hi = lo;
    while (hi < by_stratum.size() && by_stratum[hi].first == by_stratum[lo].first) hi++;
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t k = lo; k < hi; ++k) {
        size_t i = by_stratum[k].second;
        int hid = g.atom_id(head_of[i]);
        if (derived[hid]) continue;
        bool sat = true;
        for (const auto& l : g.instances[i].body) {
          bool holds = derived[g.atom_id(l.atom)];
          if (l.negated ? holds : !holds) { sat = false; break; }
        }
        if (sat) {
          derived[hid] = true;
          changed = true;
        }
      }
    }
    lo = hi;
  }

  auto it = g.atom_ids.find(query);
  return it != g.atom_ids.end() && derived[it->second];
}

// iterate every total selection of the annotated instances
void for_each_world(FullGrounding& g, const std::function<void(const std::vector<int>&, double)>& cb) {
  std::vector<int> choice(g.annotated_idx.size(), 0);
  for (;;) {
    double prob = 1.0;
    for (size_t i = 0; i < choice.size(); ++i)
      prob *= option_prob(*g.instances[g.annotated_idx[i]].clause, choice[i]);
    cb(choice, prob);
    size_t i = 0;
    for (; i < choice.size(); ++i) {
      if (++choice[i] < option_count(*g.instances[g.annotated_idx[i]].clause)) break;
      choice[i] = 0;
    }
    if (i == choice.size()) break;
  }
}

// ---------------------------------------------------------------------------
// all-heads resolution (programs with structured terms; positive only)
// ---------------------------------------------------------------------------

struct Sld {
  const Program& p;
  const OracleLimits& lim;
  TermArena arena;
  Env env;
  int32_t next_var = 0;
  uint64_t steps = 0;
  size_t derivations = 0;
  int rename_budget_hit = 0;

  bool record_instances = false;
  bool record_choices = false;
  std::unordered_map<std::string, GroundInstance> instances;  // "<id>\x01<key>"
  std::vector<AtomicChoice> current;
  std::function<void()> on_success;

  struct Goal {
    const Term* atom = nullptr;  // clause-shifted body atom (builtins included)
    int marker_clause = -1;      // >= 0: instance/choice finalization marker
    int marker_head = 0;
    int32_t var_base = 0;
  };
  struct GoalNode {
    Goal g;
    const GoalNode* next = nullptr;
  };

  Sld(const Program& prog, const OracleLimits& l) : p(prog), lim(l) {}

  const Term* shift(const Term* t, int32_t base) {
    if (t->ground) return t;
    if (t->is_var()) return arena.var(t->var + base);
    std::vector<const Term*> na;
    na.reserve(t->args.size());
    for (const Term* a : t->args) na.push_back(shift(a, base));
    return arena.compound(t->functor, std::move(na));
  }

  void bump() {
    if (++steps > lim.max_steps)
      raise(ErrorKind::TooManyWorlds, "resolution step budget exhausted");
  }

  void success() {
    if (++derivations > lim.max_derivations)
      raise(ErrorKind::TooManyWorlds, "derivation count exceeds the enumeration bound");
    if (on_success) on_success();
  }

  void finalize_marker(const Goal& m, const GoalNode* rest, int depth) {
    const AnnotatedClause& c = p.clauses[m.marker_clause];
    std::vector<const Term*> vc_terms;
    vc_terms.reserve(c.nvars);
    for (int32_t i = 0; i < c.nvars; ++i) {
      const Term* v = instantiate(arena.var(m.var_base + i), env, arena);
      if (!v->ground)
        raise(ErrorKind::UnsupportedProgram,
              "derivation leaves clause " + std::to_string(c.id) + " partially ground");
      vc_terms.push_back(v);
    }
    std::string key = grounding_key(vc_terms, p.syms);

    if (record_instances) {
      std::string mk = std::to_string(c.id) + '\x01' + key;
      if (!instances.count(mk)) {
        GroundInstance inst;
        inst.clause = &c;
        Env sub;
        sub.slots.assign(c.nvars, nullptr);
        for (int32_t i = 0; i < c.nvars; ++i) sub.slots[i] = vc_terms[i];
        for (const auto& h : c.heads) inst.head_atoms.push_back(instantiate(h.atom, sub, arena));
        std::vector<Literal> body;
        for (const auto& l : c.body)
          body.push_back({l.negated, instantiate(l.atom, sub, arena)});
        if (reduce_builtins(p, body)) {
          inst.body = std::move(body);
          inst.key = key;
          instances.emplace(std::move(mk), std::move(inst));
        }
      }
    }
    bool pushed = false;
    if (record_choices && is_annotated(c)) {
      current.push_back({c.id, key, m.marker_head});
      pushed = true;
    }
    solve(rest, depth);
    if (pushed) current.pop_back();
  }

  void solve(const GoalNode* node, int depth) {
    bump();
    if (depth > lim.max_depth)
      raise(ErrorKind::TooManyWorlds, "resolution depth limit reached");
    if (!node) {
      success();
      return;
    }
    const Goal& g = node->g;
    if (g.marker_clause >= 0) {
      finalize_marker(g, node->next, depth);
      return;
    }
    const Term* atom = env.deref(g.atom);
    if (p.is_builtin(atom)) {
      const Term* a = instantiate(atom->args[0], env, arena);
      const Term* b = instantiate(atom->args[1], env, arena);
      if (atom->functor == p.sym_eq) {
        size_t mark = env.mark();
        if (unify(a, b, env)) solve(node->next, depth);
        env.undo_to(mark);
      } else {
        if (!a->ground || !b->ground)
          raise(ErrorKind::UnsupportedProgram, "\\= on non-ground operands");
        if (!equal_terms(a, b)) solve(node->next, depth);
      }
      return;
    }

    Pred pr = Program::pred_of(atom);
    auto it = p.by_pred.find(pr);
    if (it == p.by_pred.end()) return;
    for (uint32_t ci : it->second) {
      const AnnotatedClause& c = p.clauses[ci];
      for (size_t hi = 0; hi < c.heads.size(); ++hi) {
        if (Program::pred_of(c.heads[hi].atom) != pr) continue;
        int32_t base = next_var;
        next_var += c.nvars;
        if (static_cast<size_t>(next_var) > env.slots.size())
          env.slots.resize(next_var, nullptr);
        size_t mark = env.mark();
        const Term* head = shift(c.heads[hi].atom, base);
        if (unify(atom, head, env)) {
          std::vector<GoalNode> nodes(c.body.size() + 1);
          for (size_t b = 0; b < c.body.size(); ++b) {
            if (c.body[b].negated)
              raise(ErrorKind::UnsupportedProgram,
                    "negation requires a function-free program");
            nodes[b].g.atom = shift(c.body[b].atom, base);
            nodes[b].next = &nodes[b + 1];
          }
          nodes[c.body.size()].g.marker_clause = static_cast<int>(ci);
          nodes[c.body.size()].g.marker_head = static_cast<int>(hi) + 1;
          nodes[c.body.size()].g.var_base = base;
          nodes[c.body.size()].next = node->next;
          solve(&nodes[0], depth + 1);
        }
        env.undo_to(mark);
        next_var = base;
      }
    }
  }

  void run(const Term* query) {
    int32_t qbase = max_var(query) + 1;
    next_var = qbase;
    env.slots.assign(qbase, nullptr);
    GoalNode root{{query, -1, 0, 0}, nullptr};
    solve(&root, 0);
  }
};

bool has_negation(const Program& p) {
  for (const auto& c : p.clauses)
    for (const auto& l : c.body)
      if (l.negated) return true;
  return false;
}

// worlds over the instances collected by all-heads resolution
double query_prob_sld(const Program& p, const Term* query, const OracleLimits& lim) {
  Sld sld(p, lim);
  sld.record_instances = true;
  sld.run(query);

  std::vector<GroundInstance> annotated, det;
  for (auto& [k, inst] : sld.instances)
    (is_annotated(*inst.clause) ? annotated : det).push_back(inst);
  if (annotated.size() > lim.max_annotated_instances)
    raise(ErrorKind::TooManyWorlds,
          std::to_string(annotated.size()) + " annotated ground instances exceed the bound of " +
              std::to_string(lim.max_annotated_instances));
  double worlds = 1;
  for (const auto& inst : annotated) worlds *= option_count(*inst.clause);
  if (worlds > static_cast<double>(lim.max_worlds))
    raise(ErrorKind::TooManyWorlds, "world count exceeds the enumeration bound");

  double total = 0.0;
  std::vector<int> choice(annotated.size(), 0);
  for (;;) {
    double prob = 1.0;
    for (size_t i = 0; i < choice.size(); ++i) prob *= option_prob(*annotated[i].clause, choice[i]);

    // least model of this world
    std::unordered_set<const Term*, TermPtrHash, TermPtrEq> derived;
    bool changed = true;
    while (changed) {
      changed = false;
      auto try_clause = [&](const Term* head, const std::vector<Literal>& body) {
        if (derived.count(head)) return;
        for (const auto& l : body)
          if (!derived.count(l.atom)) return;
        derived.insert(head);
        changed = true;
      };
      for (size_t i = 0; i < annotated.size(); ++i)
        if (choice[i] < static_cast<int>(annotated[i].head_atoms.size()))
          try_clause(annotated[i].head_atoms[choice[i]], annotated[i].body);
      for (const auto& inst : det) try_clause(inst.head_atoms[0], inst.body);
    }
    if (derived.count(query)) total += prob;

    size_t i = 0;
    for (; i < choice.size(); ++i) {
      if (++choice[i] < option_count(*annotated[i].clause)) break;
      choice[i] = 0;
    }
    if (i == choice.size()) break;
  }
  return total;
}

}  // namespace

bool function_free(const Program& p) {
  auto ok = [](const Term* atom) {
    for (const Term* a : atom->args)
      if (!a->is_var() && !a->ground) return false;
    return true;
  };
  for (const auto& c : p.clauses) {
    for (const auto& h : c.heads)
      if (!ok(h.atom)) return false;
    for (const auto& l : c.body)
      if (!ok(l.atom)) return false;
  }
  return true;
}

std::vector<Selection> enumerate_worlds(const Program& p, const OracleLimits& lim) {
  if (!function_free(p))
    raise(ErrorKind::UnsupportedProgram,
          "world enumeration requires a function-free program");
  FullGrounding g = ground_fully(p, nullptr, lim);
  std::vector<Selection> out;
  for_each_world(g, [&](const std::vector<int>& choice, double prob) {
    Selection s;
    s.prob = prob;
    for (size_t i = 0; i < choice.size(); ++i) {
      const GroundInstance& inst = g.instances[g.annotated_idx[i]];
      s.choices.push_back({inst.clause->id, inst.key, choice[i] + 1});
    }
    out.push_back(std::move(s));
  });
  return out;
}

double oracle_query_prob(const Program& p, const Term* ground_query, const OracleLimits& lim) {
  if (!ground_query->ground)
    raise(ErrorKind::UnsupportedProgram, "oracle queries must be ground");
  if (!function_free(p)) {
    if (has_negation(p))
      raise(ErrorKind::UnsupportedProgram,
            "negation requires a function-free program");
    return query_prob_sld(p, ground_query, lim);
  }
  FullGrounding g = ground_fully(p, ground_query, lim);
  stratify(g, p);
  double total = 0.0;
  for_each_world(g, [&](const std::vector<int>& choice, double prob) {
    if (world_satisfies(g, choice, ground_query)) total += prob;
  });
  return total;
}

ExplanationSet enumerate_explanations(const Program& p, const Term* query,
                                      const OracleLimits& lim) {
  if (has_negation(p))
    raise(ErrorKind::UnsupportedProgram, "explanations are defined for positive programs");
  Sld sld(p, lim);
  sld.record_choices = true;
  ExplanationSet out;
  sld.on_success = [&]() {
    out.derivations++;
    std::unordered_map<std::string, int> picked;
    for (const AtomicChoice& ch : sld.current) {
      std::string k = std::to_string(ch.rule) + '\x01' + ch.key;
      auto [it, fresh] = picked.emplace(k, ch.head);
      if (!fresh && it->second != ch.head) {
        out.inconsistent++;
        return;
      }
    }
    Explanation e;
    e.choices = sld.current;
    e.prob = 1.0;
    for (const AtomicChoice& ch : e.choices)
      e.prob *= p.clauses[ch.rule - 1].heads[ch.head - 1].ann.to_double();
    out.explanations.push_back(std::move(e));
  };
  sld.run(query);
  return out;
}

}  // namespace pita
