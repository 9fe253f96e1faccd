#include "pita/term.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "pita/errors.hpp"

namespace pita {

namespace {

uint64_t mix(uint64_t h, uint64_t v) {
  v *= 0x9E3779B97F4A7C15ull;
  v ^= v >> 32;
  h ^= v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
  return h;
}

uint64_t leaf_hash(uint64_t tag, uint64_t payload) {
  return mix(mix(0x5bf03635ull, tag), payload);
}

}  // namespace

const Term* TermArena::var(int32_t idx) {
  Term* t = fresh();
  t->kind = TermKind::Var;
  t->ground = false;
  t->var = idx;
  t->hash = leaf_hash(1, static_cast<uint64_t>(idx));
  return t;
}

const Term* TermArena::atom(Sym f) { return compound(f, {}); }

const Term* TermArena::compound(Sym f, std::vector<const Term*> args) {
  Term* t = fresh();
  t->kind = TermKind::Compound;
  t->functor = f;
  uint64_t h = mix(leaf_hash(2, f), args.size());
  bool g = true;
  for (const Term* a : args) {
    h = mix(h, a->hash);
    g = g && a->ground;
  }
  t->ground = g;
  t->hash = h;
  t->args = std::move(args);
  return t;
}

const Term* TermArena::integer(int64_t v) {
  Term* t = fresh();
  t->kind = TermKind::Int;
  t->ground = true;
  t->ival = v;
  t->hash = leaf_hash(3, static_cast<uint64_t>(v));
  return t;
}

const Term* TermArena::real(double v) {
  Term* t = fresh();
  t->kind = TermKind::Float;
  t->ground = true;
  t->fval = v;
  t->hash = leaf_hash(4, std::bit_cast<uint64_t>(v));
  return t;
}

bool equal_terms(const Term* a, const Term* b) {
  for (;;) {
    if (a == b) return true;
    if (a->hash != b->hash || a->kind != b->kind) return false;
    switch (a->kind) {
      case TermKind::Var:
        return a->var == b->var;
      case TermKind::Int:
        return a->ival == b->ival;
      case TermKind::Float:
        return std::bit_cast<uint64_t>(a->fval) == std::bit_cast<uint64_t>(b->fval);
      case TermKind::Compound: {
        if (a->functor != b->functor || a->args.size() != b->args.size()) return false;
        size_t n = a->args.size();
        if (n == 0) return true;
        for (size_t i = 0; i + 1 < n; ++i)
          if (!equal_terms(a->args[i], b->args[i])) return false;
        // iterate into the last argument so that long lists do not recurse
        a = a->args[n - 1];
        b = b->args[n - 1];
        break;
      }
    }
  }
}

int32_t max_var(const Term* t) {
  if (t->ground) return -1;
  if (t->is_var()) return t->var;
  int32_t m = -1;
  for (const Term* a : t->args) m = std::max(m, max_var(a));
  return m;
}

namespace {

bool occurs(int32_t v, const Term* t, const Env& env) {
  t = env.deref(t);
  for (;;) {
    if (t->is_var()) return t->var == v;
    if (t->ground || t->kind != TermKind::Compound || t->args.empty()) return false;
    size_t n = t->args.size();
    for (size_t i = 0; i + 1 < n; ++i)
      if (occurs(v, t->args[i], env)) return true;
    t = env.deref(t->args[n - 1]);
  }
}

}  // namespace

bool unify(const Term* a, const Term* b, Env& env, bool occurs_check) {
  a = env.deref(a);
  b = env.deref(b);
  for (;;) {
    if (a == b) return true;
    if (a->ground && b->ground) return equal_terms(a, b);
    if (a->is_var()) {
      if (b->is_var() && b->var == a->var) return true;
      if (occurs_check && occurs(a->var, b, env)) return false;
      env.bind(a->var, b);
      return true;
    }
    if (b->is_var()) {
      if (occurs_check && occurs(b->var, a, env)) return false;
      env.bind(b->var, a);
      return true;
    }
    if (a->kind != b->kind) return false;
    switch (a->kind) {
      case TermKind::Int:
        return a->ival == b->ival;
      case TermKind::Float:
        return std::bit_cast<uint64_t>(a->fval) == std::bit_cast<uint64_t>(b->fval);
      case TermKind::Compound: {
        if (a->functor != b->functor || a->args.size() != b->args.size()) return false;
        size_t n = a->args.size();
        if (n == 0) return true;
        for (size_t i = 0; i + 1 < n; ++i)
          if (!unify(a->args[i], b->args[i], env, occurs_check)) return false;
        a = env.deref(a->args[n - 1]);
        b = env.deref(b->args[n - 1]);
        break;
      }
      default:
        return false;
    }
  }
}

std::optional<std::map<int32_t, const Term*>> unify_terms(const Term* a, const Term* b,
                                                          TermArena& arena) {
  Env env;
  int32_t top = std::max(max_var(a), max_var(b));
  env.slots.assign(static_cast<size_t>(top + 1), nullptr);
  if (!unify(a, b, env)) return std::nullopt;
  std::map<int32_t, const Term*> out;
  for (size_t v = 0; v < env.slots.size(); ++v)
    if (env.slots[v] != nullptr)
      out.emplace(static_cast<int32_t>(v), instantiate(env.slots[v], env, arena));
  return out;
}

const Term* instantiate(const Term* t, const Env& env, TermArena& arena) {
  t = env.deref(t);
  if (t->ground || t->kind != TermKind::Compound || t->args.empty()) return t;
  bool changed = false;
  std::vector<const Term*> na;
  na.reserve(t->args.size());
  for (const Term* a : t->args) {
    const Term* n = instantiate(a, env, arena);
    changed = changed || n != a;
    na.push_back(n);
  }
  if (!changed) return t;
  return arena.compound(t->functor, std::move(na));
}

const Term* apply_subst(const Term* t, const std::map<int32_t, const Term*>& s,
                        TermArena& arena) {
  switch (t->kind) {
    case TermKind::Var: {
      auto it = s.find(t->var);
      return it == s.end() ? t : it->second;
    }
    case TermKind::Compound: {
      if (t->ground || t->args.empty()) return t;
      bool changed = false;
      std::vector<const Term*> na;
      na.reserve(t->args.size());
      for (const Term* a : t->args) {
        const Term* n = apply_subst(a, s, arena);
        changed = changed || n != a;
        na.push_back(n);
      }
      if (!changed) return t;
      return arena.compound(t->functor, std::move(na));
    }
    default:
      return t;
  }
}

namespace {

const Term* canon_walk(const Term* t, TermArena& arena, std::map<int32_t, int32_t>& ren,
                       int32_t& next) {
  if (t->ground) return t;
  if (t->is_var()) {
    auto it = ren.find(t->var);
    int32_t id;
    if (it == ren.end()) {
      id = next++;
      ren.emplace(t->var, id);
    } else {
      id = it->second;
    }
    return t->var == id ? t : arena.var(id);
  }
  bool changed = false;
  std::vector<const Term*> na;
  na.reserve(t->args.size());
  for (const Term* a : t->args) {
    const Term* n = canon_walk(a, arena, ren, next);
    changed = changed || n != a;
    na.push_back(n);
  }
  if (!changed) return t;
  return arena.compound(t->functor, std::move(na));
}

}  // namespace

CanonicalResult canonicalize(std::span<const Term* const> args, TermArena& arena) {
  CanonicalResult r;
  std::map<int32_t, int32_t> ren;
  r.args.reserve(args.size());
  for (const Term* a : args) r.args.push_back(canon_walk(a, arena, ren, r.nvars));
  return r;
}

std::string float_repr(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (strtod(buf, nullptr) == v) break;
  }
  std::string s = buf;
  if (s.find_first_of(".eEninf") == std::string::npos) s += ".0";
  return s;
}

namespace {

bool plain_atom_name(const std::string& n) {
  if (n.empty()) return false;
  if (!(n[0] >= 'a' && n[0] <= 'z')) return false;
  for (char c : n)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

void print_atom_name(std::string& out, const std::string& n) {
  if (plain_atom_name(n)) {
    out += n;
    return;
  }
  out += '\'';
  for (char c : n) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  out += '\'';
}

struct Printer {
  const SymbolTable& syms;
  const std::vector<std::string>* names;
  Sym dot, nil;

  void print(std::string& out, const Term* t) {
    switch (t->kind) {
      case TermKind::Var: {
        size_t v = static_cast<size_t>(t->var);
        if (names && v < names->size() && !(*names)[v].empty())
          out += (*names)[v];
        else
          out += "_" + std::to_string(t->var);
        return;
      }
      case TermKind::Int:
        out += std::to_string(t->ival);
        return;
      case TermKind::Float:
        out += float_repr(t->fval);
        return;
      case TermKind::Compound:
        break;
    }
    if (t->functor == nil && t->args.empty()) {
      out += "[]";
      return;
    }
    if (t->functor == dot && t->args.size() == 2) {
      out += '[';
      print(out, t->args[0]);
      const Term* tail = t->args[1];
      while (tail->kind == TermKind::Compound && tail->functor == dot &&
             tail->args.size() == 2) {
        out += ',';
        print(out, tail->args[0]);
        tail = tail->args[1];
      }
      if (!(tail->kind == TermKind::Compound && tail->functor == nil && tail->args.empty())) {
        out += '|';
        print(out, tail);
      }
      out += ']';
      return;
    }
    const std::string& name = syms.name(t->functor);
    if (t->args.size() == 2 && (name == "=" || name == "\\=")) {
      print(out, t->args[0]);
      out += name;
      print(out, t->args[1]);
      return;
    }
    print_atom_name(out, name);
    if (!t->args.empty()) {
      out += '(';
      for (size_t i = 0; i < t->args.size(); ++i) {
        if (i) out += ',';
        print(out, t->args[i]);
      }
      out += ')';
    }
  }
};

}  // namespace

std::string term_to_string(const Term* t, const SymbolTable& syms,
                           const std::vector<std::string>* var_names) {
  Printer p{syms, var_names, syms.lookup("."), syms.lookup("[]")};
  std::string out;
  p.print(out, t);
  return out;
}

std::string grounding_key(std::span<const Term* const> args, const SymbolTable& syms) {
  Printer p{syms, nullptr, syms.lookup("."), syms.lookup("[]")};
  std::string out;
  for (size_t i = 0; i < args.size(); ++i) {
    if (!args[i]->ground)
      raise(ErrorKind::NonGroundKey,
            "instance key over non-ground argument " + std::to_string(i + 1));
    if (i) out += ',';
    p.print(out, args[i]);
  }
  return out;
}

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonGroundKey: return "NonGroundKey";
    case ErrorKind::NonGroundAnswer: return "NonGroundAnswer";
    case ErrorKind::NonGroundNegation: return "NonGroundNegation";
    case ErrorKind::NegationUnsupported: return "NegationUnsupported";
    case ErrorKind::NegationInPossMode: return "NegationInPossMode";
    case ErrorKind::NotStratified: return "NotStratified";
    case ErrorKind::CyclicNonIdempotent: return "CyclicNonIdempotent";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::TooManyWorlds: return "TooManyWorlds";
    case ErrorKind::UnsupportedProgram: return "UnsupportedProgram";
    case ErrorKind::BadDistribution: return "BadDistribution";
    case ErrorKind::UnknownVar: return "UnknownVar";
    case ErrorKind::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorKind::ManagerMismatch: return "ManagerMismatch";
    case ErrorKind::DuplicateContribution: return "DuplicateContribution";
    case ErrorKind::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorKind::TimedOut: return "TimedOut";
  }
  return "UnknownError";
}

}  // namespace pita
