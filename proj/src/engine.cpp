#include "pita/engine.hpp"

#include <pthread.h>

#include <algorithm>
#include <climits>
#include <bit>
#include <chrono>
#include <cstring>
#include <deque>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "pita/bdd.hpp"
#include "pita/errors.hpp"
#include "pita/transform.hpp"

namespace pita {

namespace {

// Subgoal-store tokens are packed into one u64: a 2-bit tag plus a 62-bit
// payload. Integers outside 62 bits and all floats go through a side table
// so that distinct values always get distinct tokens.
constexpr uint64_t kTagVar = 0;
constexpr uint64_t kTagCompound = 1;
constexpr uint64_t kTagSmallInt = 2;
constexpr uint64_t kTagSide = 3;
constexpr uint64_t kPayloadMask = (uint64_t{1} << 62) - 1;

// Subgoal store node. Children form a sibling-linked list, hottest first.
struct TrieNode {
  uint64_t tok = 0;
  int32_t first_child = -1;
  int32_t next_sibling = -1;
};

struct FastKey {
  Sym functor = 0;
  std::vector<const Term*> args;
  bool operator==(const FastKey&) const = default;
};

struct FastKeyHash {
  size_t operator()(const FastKey& k) const noexcept {
    uint64_t h = 1469598103934665603ull ^ k.functor;
    for (const Term* t : k.args) {
      h ^= reinterpret_cast<uintptr_t>(t);
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

struct VecU64Hash {
  size_t operator()(const std::vector<uint64_t>& v) const noexcept {
    uint64_t h = 1469598103934665603ull;
    for (uint64_t x : v) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

struct AnswerEntry {
  const Term* atom = nullptr;
  Value value;
  uint32_t version = 0;
};

struct Table {
  int32_t id = 0;
  Pred pred;
  std::vector<const Term*> shifted_args;  // canonical vars moved past clause vars
  int32_t n_call_vars = 0;
  static uint64_t pred_key(Pred p) {
    return (static_cast<uint64_t>(p.functor) << 32) | p.arity;
  }

  enum class St : uint8_t { Fresh, Evaluating, Complete };
  St status = St::Fresh;
  bool self_dep = false;
  uint32_t index = 0;
  uint32_t lowlink = 0;

  std::vector<AnswerEntry> answers;
  std::unordered_map<const Term*, uint32_t, TermPtrHash, TermPtrEq> answer_index;
};

class Engine {
 public:
  Engine(const Program& p, Mode mode, const SolveOptions& opt)
      : p_(p),
        opt_(opt),
        mode_(mode),
        alg_(make_algebra(mode)),
        tp_(pita_transform(p, alg_->flavor())),
        start_(std::chrono::steady_clock::now()) {
    for (const auto& c : p_.clauses) max_nvars_ = std::max(max_nvars_, c.nvars);
    trie_.push_back({});  // root
    if (opt_.timeout_s > 0.0)
      if (BddManager* m = alg_->bdd_manager())
        m->set_deadline(start_ + std::chrono::duration_cast<
                                     std::chrono::steady_clock::duration>(
                                     std::chrono::duration<double>(
                                         opt_.timeout_s)));
  }

  SolveResult run(const Term* goal) {
    if (p_.is_builtin(goal))
      raise(ErrorKind::UnsupportedProgram, "goal must be a user-defined atom");
    Table* root = table_for(goal);
    evaluate(root);

    if (mode_ == Mode::Prob && !opt_.dump_bdd_path.empty()) {
      Value acc = alg_->zero();
      for (const AnswerEntry& e : root->answers) acc = alg_->or_op(acc, e.value);
      std::ofstream f(opt_.dump_bdd_path);
      alg_->bdd_manager()->dump_dot(f, std::get<BddRef>(acc));
    }

    SolveResult out;
    for (const AnswerEntry& e : root->answers)
      out.answers.push_back({term_to_string(e.atom, p_.syms), alg_->ret(e.value)});
    if (out.answers.empty() && goal->ground)
      out.answers.push_back({term_to_string(goal, p_.syms), alg_->ret(alg_->zero())});
    std::sort(out.answers.begin(), out.answers.end(),
              [](const SolveAnswer& a, const SolveAnswer& b) { return a.atom < b.atom; });
    out.stats = stats_;
    return out;
  }

 private:
  struct ResCtx {
    Table* table;
    const InstrumentedClause& ic;
    uint32_t ic_idx;
    Env& env;
    std::vector<Value>& slots;
    std::vector<int>& var_slots;
    std::vector<uint64_t>& fp;  // consumed (child table, answer, version) trail
  };

  void bump() {
    ++stats_.steps;
    if (opt_.step_limit && stats_.steps > opt_.step_limit)
      raise(ErrorKind::StepLimitExceeded,
            "step limit of " + std::to_string(opt_.step_limit) + " exceeded");
    if (opt_.timeout_s > 0.0 && (stats_.steps & 4095) == 0) {
      double el = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start_).count();
      if (el > opt_.timeout_s)
        raise(ErrorKind::TimedOut,
              "query exceeded " + float_repr(opt_.timeout_s) + " s");
    }
  }

  // --- subgoal store ---------------------------------------------------

  uint64_t tok_side(std::unordered_map<uint64_t, uint64_t>& m, uint64_t bits,
                    uint64_t kind) {
    auto [it, fresh] = m.try_emplace(bits, m.size());
    return (kTagSide << 62) | (it->second << 1) | kind;
  }

  uint64_t tok_int(int64_t v) {
    if (v >= -(int64_t{1} << 61) && v < (int64_t{1} << 61))
      return (kTagSmallInt << 62) | (static_cast<uint64_t>(v) & kPayloadMask);
    return tok_side(side_ints_, static_cast<uint64_t>(v), 0);
  }

  uint64_t tok_real(double v) {
    return tok_side(side_reals_, std::bit_cast<uint64_t>(v), 1);
  }

  static uint64_t tok_compound(Sym f, size_t arity) {
    return (kTagCompound << 62) | (static_cast<uint64_t>(f) << 30) | arity;
  }

  int32_t advance(int32_t cur, uint64_t tok) {
    int32_t c = trie_[static_cast<size_t>(cur)].first_child;
    int32_t prev = -1;
    while (c >= 0 && trie_[static_cast<size_t>(c)].tok != tok) {
      prev = c;
      c = trie_[static_cast<size_t>(c)].next_sibling;
    }
    if (c < 0) {
      c = static_cast<int32_t>(trie_.size());
      trie_.push_back({tok, -1, trie_[static_cast<size_t>(cur)].first_child});
      trie_[static_cast<size_t>(cur)].first_child = c;
      ++stats_.store_nodes;
    } else if (prev >= 0) {
      TrieNode& hit = trie_[static_cast<size_t>(c)];
      trie_[static_cast<size_t>(prev)].next_sibling = hit.next_sibling;
      hit.next_sibling = trie_[static_cast<size_t>(cur)].first_child;
      trie_[static_cast<size_t>(cur)].first_child = c;
    }
    return c;
  }

  // Walks a ground compound argument into the trie. The first walk of a term
  // flattens its token stream into a reusable buffer and records where each
  // right-spine subterm starts, so that walking the tail of an already-walked
  // list streams plain u64s instead of chasing term pointers again.
  int32_t walk_ground(const Term* t) {
    if (auto it = slice_memo_.find(t); it != slice_memo_.end()) {
      const std::vector<uint64_t>& buf = *it->second.buf;
      int32_t cur = 0;
      for (size_t i = it->second.off; i < buf.size(); ++i) cur = advance(cur, buf[i]);
      return cur;
    }

    flat_bufs_.emplace_back();
    std::vector<uint64_t>& buf = flat_bufs_.back();
    walk_stack_.clear();
    walk_stack_.push_back({t, true});
    while (!walk_stack_.empty()) {
      auto [u, spine] = walk_stack_.back();
      walk_stack_.pop_back();
      switch (u->kind) {
        case TermKind::Var:
          break;  // unreachable: t is ground
        case TermKind::Int:
          buf.push_back(tok_int(u->ival));
          break;
        case TermKind::Float:
          buf.push_back(tok_real(u->fval));
          break;
        case TermKind::Compound: {
          size_t n = u->args.size();
          if (spine && u != t && n > 0)
            slice_memo_.emplace(u, Slice{&buf, buf.size()});
          buf.push_back(tok_compound(u->functor, n));
          for (size_t i = n; i-- > 0;)
            walk_stack_.push_back({u->args[i], spine && i + 1 == n});
          break;
        }
      }
    }

    int32_t cur = 0;
    for (uint64_t tk : buf) cur = advance(cur, tk);
    return cur;
  }

  // Walks a canonicalized argument that may contain variables.
  int32_t walk_open(const Term* t) {
    int32_t cur = 0;
    walk_stack_.clear();
    walk_stack_.push_back({t, false});
    while (!walk_stack_.empty()) {
      const Term* u = walk_stack_.back().first;
      walk_stack_.pop_back();
      switch (u->kind) {
        case TermKind::Var:
          cur = advance(cur, (kTagVar << 62) | static_cast<uint32_t>(u->var));
          break;
        case TermKind::Int:
          cur = advance(cur, tok_int(u->ival));
          break;
        case TermKind::Float:
          cur = advance(cur, tok_real(u->fval));
          break;
        case TermKind::Compound:
          cur = advance(cur, tok_compound(u->functor, u->args.size()));
          for (size_t i = u->args.size(); i-- > 0;)
            walk_stack_.push_back({u->args[i], false});
          break;
      }
    }
    return cur;
  }

  const Term* shift_vars(const Term* t, int32_t off) {
    if (t->ground) return t;
    if (t->is_var()) return arena_.var(t->var + off);
    std::vector<const Term*> as;
    as.reserve(t->args.size());
    for (const Term* a : t->args) as.push_back(shift_vars(a, off));
    return arena_.compound(t->functor, std::move(as));
  }

  Table* table_for(const Term* atom) {
    bump();
    FastKey fk{atom->functor, atom->args};
    if (auto it = fastmap_.find(fk); it != fastmap_.end()) {
      ++stats_.variant_hits;
      return &tables_[static_cast<size_t>(it->second)];
    }

    Pred pred = Program::pred_of(atom);
    CanonicalResult canon = canonicalize(atom->args, arena_);
    key_buf_.clear();
    key_buf_.push_back(Table::pred_key(pred));
    for (const Term* a : canon.args) {
      int32_t node;
      if (a->ground && a->is_compound() && !a->args.empty()) {
        if (auto it = arg_node_memo_.find(a); it != arg_node_memo_.end()) {
          node = it->second;
        } else {
          node = walk_ground(a);
          arg_node_memo_.emplace(a, node);
        }
      } else {
        node = walk_open(a);
      }
      key_buf_.push_back(static_cast<uint64_t>(node));
    }

    auto [tit, fresh] = table_map_.try_emplace(key_buf_, -1);
    if (!fresh) {
      ++stats_.variant_hits;
      fastmap_.emplace(std::move(fk), tit->second);
      return &tables_[static_cast<size_t>(tit->second)];
    }

    int32_t slot = static_cast<int32_t>(tables_.size());
    tit->second = slot;
    ++stats_.tables_created;
    tables_.emplace_back();
    Table& t = tables_.back();
    t.id = slot;
    t.pred = pred;
    t.n_call_vars = canon.nvars;
    t.shifted_args.reserve(canon.args.size());
    for (const Term* a : canon.args) t.shifted_args.push_back(shift_vars(a, max_nvars_));
    fastmap_.emplace(std::move(fk), slot);
    return &t;
  }

  // --- evaluation ------------------------------------------------------

  void evaluate(Table* t) {
    if (t->status != Table::St::Fresh) return;
    t->status = Table::St::Evaluating;
    t->index = t->lowlink = next_index_++;
    scc_stack_.push_back(t);
    resolve_table(t);
    if (t->lowlink == t->index) complete_scc(t);
  }

  void complete_scc(Table* root) {
    size_t base = scc_stack_.size();
    while (base > 0 && scc_stack_[base - 1]->index >= root->index) --base;

    bool cyclic = root->self_dep || scc_stack_.size() - base > 1;
    if (!cyclic) {
      root->status = Table::St::Complete;
      scc_stack_.resize(base);
      return;
    }

    if (!alg_->idempotent_or())
      raise(ErrorKind::CyclicNonIdempotent,
            "recursive subgoal cycle through " + p_.pred_name(root->pred) +
                "; " + mode_name(mode_) + " mode requires an acyclic call graph");

    uint64_t rounds = 0;
    for (;;) {
      bool changed = false;
      // the segment can grow while a round runs: newly reached tables that
      // fall into this SCC stay on the stack above base
      for (size_t i = base; i < scc_stack_.size(); ++i)
        changed = resolve_table(scc_stack_[i]) || changed;
      ++stats_.fixpoint_rounds;
      if (++rounds > opt_.fixpoint_round_cap)
        raise(ErrorKind::NonConvergent,
              "fixpoint did not converge within " +
                  std::to_string(opt_.fixpoint_round_cap) + " rounds");
      if (!changed) break;
    }

    uint32_t minlow = root->lowlink;
    for (size_t i = base; i < scc_stack_.size(); ++i)
      minlow = std::min(minlow, scc_stack_[i]->lowlink);
    if (minlow < root->index) {
      // a round reached back below this SCC's root: the real root is further
      // down; leave everything on the stack for it to complete
      root->lowlink = minlow;
      return;
    }

    for (size_t i = base; i < scc_stack_.size(); ++i)
      scc_stack_[i]->status = Table::St::Complete;
    scc_stack_.resize(base);
  }

  bool resolve_table(Table* t) {
    auto it = tp_.by_pred.find(t->pred);
    if (it == tp_.by_pred.end()) return false;
    bool changed = false;
    Env env;
    for (uint32_t idx : it->second) {
      const InstrumentedClause& ic = tp_.clauses[idx];
      env.undo_to(0);
      bool ok = true;
      for (size_t i = 0; i < t->shifted_args.size() && ok; ++i)
        ok = unify(ic.head->args[i], t->shifted_args[i], env);
      if (!ok) continue;
      std::vector<Value> slots(static_cast<size_t>(ic.nslots));
      std::vector<int> var_slots(static_cast<size_t>(ic.n_var_slots), -1);
      std::vector<uint64_t> fp;
      ResCtx rc{t, ic, idx, env, slots, var_slots, fp};
      changed = exec(rc, 0) || changed;
    }
    return changed;
  }

  std::string instance_key(ResCtx& rc) {
    key_terms_.clear();
    for (int32_t v : rc.ic.vc) {
      while (var_terms_.size() <= static_cast<size_t>(v))
        var_terms_.push_back(arena_.var(static_cast<int32_t>(var_terms_.size())));
      key_terms_.push_back(
          instantiate(var_terms_[static_cast<size_t>(v)], rc.env, arena_));
    }
    return grounding_key(key_terms_, p_.syms);
  }

  bool exec(ResCtx& rc, size_t step_i) {
    for (size_t i = step_i; i < rc.ic.steps.size(); ++i) {
      const Step& st = rc.ic.steps[i];
      bump();
      switch (st.kind) {
        case StepKind::One:
          rc.slots[static_cast<size_t>(st.out)] = alg_->one();
          break;
        case StepKind::And: {
          Value v = alg_->and_op(rc.slots[static_cast<size_t>(st.in1)],
                                 rc.slots[static_cast<size_t>(st.in2)]);
          // a zero conjunct can never contribute: or(x, zero) = x
          if (alg_->is_zero(v)) return false;
          rc.slots[static_cast<size_t>(st.out)] = std::move(v);
          break;
        }
        case StepKind::GetVar: {
          std::string key =
              std::to_string(st.rule) + '\x01' + instance_key(rc);
          auto [vit, inserted] = var_store_.try_emplace(std::move(key), -1);
          if (inserted) {
            vit->second = alg_->add_var(st.anns);
            ++stats_.vars_created;
          }
          rc.var_slots[static_cast<size_t>(st.var_slot)] = vit->second;
          break;
        }
        case StepKind::EqualityVar:
          rc.slots[static_cast<size_t>(st.out)] = alg_->equality_var(
              rc.var_slots[static_cast<size_t>(st.var_slot)], st.head_index);
          break;
        case StepKind::EqualityList: {
          std::string key =
              mode_ == Mode::Viterbi ? instance_key(rc) : std::string();
          rc.slots[static_cast<size_t>(st.out)] =
              alg_->equality_list(st.anns, st.head_index, st.rule, key);
          break;
        }
        case StepKind::Builtin: {
          const Term* a = st.atom->args[0];
          const Term* b = st.atom->args[1];
          if (st.atom->functor == p_.sym_eq) {
            size_t m = rc.env.mark();
            if (!unify(a, b, rc.env)) {
              rc.env.undo_to(m);
              return false;
            }
          } else {
            const Term* ia = instantiate(a, rc.env, arena_);
            const Term* ib = instantiate(b, rc.env, arena_);
            if (!ia->ground || !ib->ground)
              raise(ErrorKind::UnsupportedProgram,
                    "\\= requires ground operands: " +
                        term_to_string(st.atom, p_.syms, &rc.ic.var_names));
            if (equal_terms(ia, ib)) return false;
          }
          break;
        }
        case StepKind::CallPos:
          return call_pos(rc, i);
        case StepKind::CallNegConditional:
          call_neg(rc, st);
          break;
      }
    }
    return finish(rc);
  }

  bool call_pos(ResCtx& rc, size_t step_i) {
    const Step& st = rc.ic.steps[step_i];
    const Term* inst = instantiate(st.atom, rc.env, arena_);
    Table* child = table_for(inst);

    if (child->status == Table::St::Fresh) {
      evaluate(child);
      if (child->status == Table::St::Evaluating)
        rc.table->lowlink = std::min(rc.table->lowlink, child->lowlink);
    } else if (child->status == Table::St::Evaluating) {
      rc.table->lowlink = std::min(rc.table->lowlink, child->index);
      if (child == rc.table) rc.table->self_dep = true;
    }

    bool changed = false;
    for (size_t ai = 0; ai < child->answers.size(); ++ai) {
      bump();
      const Term* a_atom = child->answers[ai].atom;
      Value a_val = child->answers[ai].value;  // copy: the vector may grow
      uint64_t ver = child->answers[ai].version;
      size_t m = rc.env.mark();
      if (unify(st.atom, a_atom, rc.env)) {
        rc.slots[static_cast<size_t>(st.out)] = std::move(a_val);
        rc.fp.push_back(static_cast<uint64_t>(child->id));
        rc.fp.push_back((static_cast<uint64_t>(ai) << 32) | ver);
        changed = exec(rc, step_i + 1) || changed;
        rc.fp.pop_back();
        rc.fp.pop_back();
      }
      rc.env.undo_to(m);
    }
    return changed;
  }

  void call_neg(ResCtx& rc, const Step& st) {
    if (!alg_->supports_negation()) alg_->not_op(alg_->one());
    const Term* inst = instantiate(st.atom, rc.env, arena_);
    if (!inst->ground)
      raise(ErrorKind::NonGroundNegation,
            "\\+ " + term_to_string(inst, p_.syms) + " is not ground");
    Table* child = table_for(inst);
    if (child->status == Table::St::Fresh) evaluate(child);
    if (child->status != Table::St::Complete)
      raise(ErrorKind::NotStratified,
            "negative call into incomplete subgoal " +
                term_to_string(inst, p_.syms));
    rc.slots[static_cast<size_t>(st.out)] =
        child->answers.empty() ? alg_->one()
                               : alg_->not_op(child->answers.front().value);
  }

  bool finish(ResCtx& rc) {
    const Term* ans = instantiate(rc.ic.head, rc.env, arena_);
    if (!ans->ground)
      raise(ErrorKind::NonGroundAnswer,
            "answer " + term_to_string(ans, p_.syms) +
                " is not ground; program is not range-restricted");
    const Value& v = rc.slots[static_cast<size_t>(rc.ic.result_slot)];
    if (alg_->is_zero(v)) return false;

    contrib_key_.clear();
    contrib_key_.reserve(2 + rc.fp.size());
    contrib_key_.push_back(static_cast<uint64_t>(rc.table->id));
    contrib_key_.push_back(rc.ic_idx);
    contrib_key_.insert(contrib_key_.end(), rc.fp.begin(), rc.fp.end());
    if (contrib_log_.contains(contrib_key_)) return false;
    return join_answer(rc.table, ans, v, contrib_key_);
  }

  bool join_answer(Table* t, const Term* atom, const Value& delta,
                   const std::vector<uint64_t>& contrib) {
    if (!contrib_log_.insert(contrib).second)
      raise(ErrorKind::DuplicateContribution,
            "contribution joined twice into " + p_.pred_name(t->pred));
    ++stats_.joins;
    auto it = t->answer_index.find(atom);
    if (it == t->answer_index.end()) {
      t->answer_index.emplace(atom, static_cast<uint32_t>(t->answers.size()));
      t->answers.push_back({atom, delta, 0});
      ++stats_.answers;
      return true;
    }
    AnswerEntry& e = t->answers[it->second];
    Value nv = alg_->or_op(e.value, delta);
    if (alg_->value_equal(nv, e.value)) return false;
    e.value = std::move(nv);
    ++e.version;
    return true;
  }

  const Program& p_;
  SolveOptions opt_;
  Mode mode_;
  std::unique_ptr<Algebra> alg_;
  TransformedProgram tp_;
  std::chrono::steady_clock::time_point start_;

  TermArena arena_;
  int32_t max_nvars_ = 0;
  SolveStats stats_;

  struct Slice {
    const std::vector<uint64_t>* buf;
    size_t off;
  };

  std::deque<Table> tables_;
  std::vector<TrieNode> trie_;
  std::unordered_map<uint64_t, uint64_t> side_ints_;
  std::unordered_map<uint64_t, uint64_t> side_reals_;
  std::unordered_map<const Term*, int32_t> arg_node_memo_;
  std::unordered_map<const Term*, Slice> slice_memo_;
  std::deque<std::vector<uint64_t>> flat_bufs_;
  std::unordered_map<std::vector<uint64_t>, int32_t, VecU64Hash> table_map_;
  std::unordered_map<FastKey, int32_t, FastKeyHash> fastmap_;
  std::unordered_set<std::vector<uint64_t>, VecU64Hash> contrib_log_;
  std::unordered_map<std::string, int> var_store_;

  uint32_t next_index_ = 0;
  std::vector<Table*> scc_stack_;

  std::vector<std::pair<const Term*, bool>> walk_stack_;
  std::vector<const Term*> key_terms_;
  std::vector<const Term*> var_terms_;
  std::vector<uint64_t> key_buf_;
  std::vector<uint64_t> contrib_key_;
};

struct ThreadCtx {
  std::function<void()> fn;
};

extern "C" void* engine_thread_main(void* arg) {
  static_cast<ThreadCtx*>(arg)->fn();
  return nullptr;
}

}  // namespace

SolveResult solve(const Program& p, Mode mode, const Term* goal,
                  const SolveOptions& opts) {
  SolveResult result;
  std::exception_ptr err;
  ThreadCtx ctx;
  ctx.fn = [&] {
    try {
      Engine e(p, mode, opts);
      result = e.run(goal);
    } catch (...) {
      err = std::current_exception();
    }
  };

  pthread_attr_t attr;
  pthread_attr_init(&attr);
  size_t stack = std::max(opts.stack_bytes, size_t(PTHREAD_STACK_MIN));
  pthread_attr_setstacksize(&attr, stack);
  pthread_t th;
  if (pthread_create(&th, &attr, engine_thread_main, &ctx) != 0) {
    pthread_attr_destroy(&attr);
    throw std::runtime_error("failed to start evaluation thread");
  }
  pthread_attr_destroy(&attr);
  pthread_join(th, nullptr);
  if (err) std::rethrow_exception(err);
  return result;
}

}  // namespace pita
