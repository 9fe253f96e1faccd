#include "pita/transform.hpp"

#include <sstream>

namespace pita {

const Term* add_d_arg(TermArena& arena, const Term* atom, const Term* d) {
  std::vector<const Term*> args(atom->args.begin(), atom->args.end());
  args.push_back(d);
  return arena.compound(atom->functor, args);
}

namespace {

std::vector<double> ann_doubles(const AnnotatedClause& c) {
  std::vector<double> out;
  for (const Rational& r : c.annotations()) out.push_back(r.to_double());
  return out;
}

InstrumentedClause transform_head(const Program& p, const AnnotatedClause& c,
                                  int head_index, Flavor flavor) {
  InstrumentedClause ic;
  ic.clause_id = c.id;
  ic.head_index = head_index;
  ic.head = c.heads[static_cast<size_t>(head_index) - 1].atom;
  ic.nvars = c.nvars;
  ic.var_names = c.var_names;
  ic.vc = c.vc;

  int next = 0;
  auto slot = [&next] { return next++; };

  int cur = slot();
  ic.steps.push_back({StepKind::One, cur, -1, -1, nullptr, 0, {}, -1, 0});

  for (const Literal& lit : c.body) {
    if (p.is_builtin(lit.atom)) {
      ic.steps.push_back(
          {StepKind::Builtin, -1, -1, -1, lit.atom, 0, {}, -1, 0});
      continue;
    }
    int d = slot();
    ic.steps.push_back({lit.negated ? StepKind::CallNegConditional
                                    : StepKind::CallPos,
                        d, -1, -1, lit.atom, 0, {}, -1, 0});
    int conj = slot();
    ic.steps.push_back({StepKind::And, conj, cur, d, nullptr, 0, {}, -1, 0});
    cur = conj;
  }

  if (!c.deterministic()) {
    std::vector<double> anns = ann_doubles(c);
    int eq = slot();
    if (flavor == Flavor::General) {
      ic.n_var_slots = 1;
      ic.steps.push_back(
          {StepKind::GetVar, -1, -1, -1, nullptr, c.id, anns, 0, 0});
      ic.steps.push_back(
          {StepKind::EqualityVar, eq, -1, -1, nullptr, 0, {}, 0, head_index});
    } else {
      ic.steps.push_back({StepKind::EqualityList, eq, -1, -1, nullptr, c.id,
                          anns, -1, head_index});
    }
    int conj = slot();
    ic.steps.push_back({StepKind::And, conj, cur, eq, nullptr, 0, {}, -1, 0});
    cur = conj;
  }

  ic.nslots = next;
  ic.result_slot = cur;
  return ic;
}

}  // namespace

TransformedProgram pita_transform(const Program& p, Flavor flavor) {
  TransformedProgram tp;
  tp.flavor = flavor;
  for (const AnnotatedClause& c : p.clauses)
    for (size_t k = 1; k <= c.heads.size(); ++k)
      tp.clauses.push_back(
          transform_head(p, c, static_cast<int>(k), flavor));
  for (uint32_t i = 0; i < tp.clauses.size(); ++i)
    tp.by_pred[Program::pred_of(tp.clauses[i].head)].push_back(i);
  return tp;
}

namespace {

struct Dumper {
  const Program& p;
  const InstrumentedClause& ic;
  std::ostringstream os;

  std::string slot_name(int s) const {
    if (s == ic.result_slot) return "D";
    return "DD" + std::to_string(s);
  }

  // "q(X,Y)" -> "q(X,Y,DD1)"; 0-arity atoms gain parentheses.
  std::string with_extra(const Term* atom, const std::string& extra) const {
    std::string s = term_to_string(atom, p.syms, &ic.var_names);
    if (atom->arity() == 0) return s + "(" + extra + ")";
    s.insert(s.size() - 1, "," + extra);
    return s;
  }

  std::string ann_list(const std::vector<Rational>& anns) const {
    std::string s = "[";
    for (size_t i = 0; i < anns.size(); ++i) {
      if (i) s += ",";
      s += anns[i].str();
    }
    return s + "]";
  }

  std::string vc_list() const {
    std::string s = "[";
    for (size_t i = 0; i < ic.vc.size(); ++i) {
      if (i) s += ",";
      s += ic.var_names[static_cast<size_t>(ic.vc[i])];
    }
    return s + "]";
  }

  void run() {
    os << with_extra(ic.head, "D") << " :- ";
    const std::vector<Rational> anns =
        p.clauses[static_cast<size_t>(ic.clause_id) - 1].annotations();
    bool first = true;
    for (const Step& st : ic.steps) {
      if (!first) os << ", ";
      first = false;
      switch (st.kind) {
        case StepKind::One:
          os << "one(" << slot_name(st.out) << ")";
          break;
        case StepKind::CallPos:
          os << with_extra(st.atom, slot_name(st.out));
          break;
        case StepKind::CallNegConditional: {
          std::string dn = "DN" + std::to_string(st.out);
          os << "(" << with_extra(st.atom, dn) << " -> not(" << dn << ","
             << slot_name(st.out) << ") ; one(" << slot_name(st.out) << "))";
          break;
        }
        case StepKind::And:
          os << "and(" << slot_name(st.in1) << "," << slot_name(st.in2) << ","
             << slot_name(st.out) << ")";
          break;
        case StepKind::GetVar:
          os << "get_var_n(" << st.rule << "," << vc_list() << ","
             << ann_list(anns) << ",Var" << st.var_slot << ")";
          break;
        case StepKind::EqualityVar:
          os << "equality(Var" << st.var_slot << "," << st.head_index << ","
             << slot_name(st.out) << ")";
          break;
        case StepKind::EqualityList:
          os << "equality(" << ann_list(anns) << "," << st.head_index << ","
             << slot_name(st.out) << ")";
          break;
        case StepKind::Builtin:
          os << term_to_string(st.atom, p.syms, &ic.var_names);
          break;
      }
    }
    os << ".";
  }
};

}  // namespace

std::string dump_transformed(const TransformedProgram& tp, const Program& p) {
  std::ostringstream out;
  for (const InstrumentedClause& ic : tp.clauses) {
    Dumper d{p, ic, {}};
    d.run();
    out << d.os.str() << "\n";
  }
  return out.str();
}

}  // namespace pita
