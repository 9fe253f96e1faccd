#include "pita/algebra.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "pita/errors.hpp"
#include "pita/term.hpp"

namespace pita {

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Prob: return "prob";
    case Mode::IndExc: return "ind-exc";
    case Mode::Count: return "count";
    case Mode::Viterbi: return "viterbi";
    case Mode::Poss: return "poss";
  }
  return "?";
}

std::optional<Mode> mode_from_name(std::string_view name) {
  if (name == "prob") return Mode::Prob;
  if (name == "ind-exc") return Mode::IndExc;
  if (name == "count") return Mode::Count;
  if (name == "viterbi") return Mode::Viterbi;
  if (name == "poss") return Mode::Poss;
  return std::nullopt;
}

int Algebra::add_var(const std::vector<double>&) {
  throw std::logic_error("add_var called on a simplified-flavor algebra");
}

Value Algebra::equality_var(int, int) {
  throw std::logic_error("equality_var called on a simplified-flavor algebra");
}

Value Algebra::equality_list(const std::vector<double>&, int, int,
                             const std::string&) {
  throw std::logic_error("equality_list called on a general-flavor algebra");
}

namespace {

// Probability under independence of clause instances, with exclusiveness
// among heads of one instance; BDDs resolve the sharing that plain
// multiplication would get wrong.
class ProbAlgebra final : public Algebra {
 public:
  ProbAlgebra() : Algebra(Mode::Prob, Flavor::General, true, true) {}

  Value zero() override { return mgr_.zero(); }
  Value one() override { return mgr_.one(); }
  bool is_zero(const Value& v) const override {
    return std::get<BddRef>(v).node == 0;
  }

  Value and_op(const Value& a, const Value& b) override {
    return mgr_.apply_and(std::get<BddRef>(a), std::get<BddRef>(b));
  }
  Value or_op(const Value& a, const Value& b) override {
    return mgr_.apply_or(std::get<BddRef>(a), std::get<BddRef>(b));
  }
  Value not_op(const Value& a) override {
    return mgr_.apply_not(std::get<BddRef>(a));
  }

  int add_var(const std::vector<double>& probs) override {
    return mgr_.add_var(probs);
  }
  Value equality_var(int var, int head) override {
    return mgr_.equality(var, head);
  }

  bool value_equal(const Value& a, const Value& b) const override {
    return std::get<BddRef>(a).node == std::get<BddRef>(b).node;
  }
  ResultValue ret(const Value& v) override {
    return mgr_.ret_prob(std::get<BddRef>(v));
  }

  BddManager* bdd_manager() override { return &mgr_; }

 private:
  BddManager mgr_;
};

// Derivations assumed pairwise exclusive, conjuncts independent: or adds,
// and multiplies. Not a probability in general, but exact when the program
// satisfies the assumptions.
class IndExcAlgebra final : public Algebra {
 public:
  IndExcAlgebra() : Algebra(Mode::IndExc, Flavor::Simplified, false, true) {}

  Value zero() override { return 0.0; }
  Value one() override { return 1.0; }
  bool is_zero(const Value& v) const override {
    return std::get<double>(v) == 0.0;
  }

  Value and_op(const Value& a, const Value& b) override {
    return std::get<double>(a) * std::get<double>(b);
  }
  Value or_op(const Value& a, const Value& b) override {
    return std::get<double>(a) + std::get<double>(b);
  }
  Value not_op(const Value& a) override { return 1.0 - std::get<double>(a); }

  Value equality_list(const std::vector<double>& probs, int head, int,
                      const std::string&) override {
    return probs[static_cast<size_t>(head) - 1];
  }

  bool value_equal(const Value& a, const Value& b) const override {
    return std::get<double>(a) == std::get<double>(b);
  }
  ResultValue ret(const Value& v) override { return std::get<double>(v); }
};

// Number of distinct derivations, annotations ignored. Arbitrary precision:
// counts outgrow any fixed-width integer on small inputs already.
class CountAlgebra final : public Algebra {
 public:
  CountAlgebra() : Algebra(Mode::Count, Flavor::Simplified, false, false) {}

  Value zero() override { return Count(0); }
  Value one() override { return Count(1); }
  bool is_zero(const Value& v) const override {
    return std::get<Count>(v) == 0;
  }

  Value and_op(const Value& a, const Value& b) override {
    return Count(std::get<Count>(a) * std::get<Count>(b));
  }
  Value or_op(const Value& a, const Value& b) override {
    return Count(std::get<Count>(a) + std::get<Count>(b));
  }
  Value not_op(const Value&) override {
    raise(ErrorKind::NegationUnsupported,
          "negation is not defined in count mode");
  }

  Value equality_list(const std::vector<double>&, int, int,
                      const std::string&) override {
    return Count(1);
  }

  bool value_equal(const Value& a, const Value& b) const override {
    return std::get<Count>(a) == std::get<Count>(b);
  }
  ResultValue ret(const Value& v) override { return std::get<Count>(v); }
};

// Most probable explanation. Conjunction concatenates the choice lists and
// recomputes the probability as a left-to-right product over the combined
// list, so the stored probability is always exactly the fold of the stored
// explanation regardless of how conjunctions were associated.
class ViterbiAlgebra final : public Algebra {
 public:
  ViterbiAlgebra() : Algebra(Mode::Viterbi, Flavor::Simplified, true, false) {}

  Value zero() override {
    VitValue v;
    v.failed = true;
    v.prob = 0.0;
    return v;
  }
  Value one() override { return VitValue{}; }
  bool is_zero(const Value& v) const override {
    return std::get<VitValue>(v).failed;
  }

  Value and_op(const Value& a, const Value& b) override {
    const auto& x = std::get<VitValue>(a);
    const auto& y = std::get<VitValue>(b);
    if (x.failed) return x;
    if (y.failed) return y;
    VitValue r;
    r.choices.reserve(x.choices.size() + y.choices.size());
    r.choices.insert(r.choices.end(), x.choices.begin(), x.choices.end());
    r.choices.insert(r.choices.end(), y.choices.begin(), y.choices.end());
    r.prob = fold(r.choices);
    return r;
  }

  // First argument wins ties: the incumbent answer is kept when a new
  // derivation merely matches its probability.
  Value or_op(const Value& a, const Value& b) override {
    const auto& x = std::get<VitValue>(a);
    const auto& y = std::get<VitValue>(b);
    if (x.failed) return y;
    if (y.failed) return x;
    return x.prob >= y.prob ? x : y;
  }

  Value not_op(const Value&) override {
    raise(ErrorKind::NegationUnsupported,
          "negation is not defined in viterbi mode");
  }

  Value equality_list(const std::vector<double>& probs, int head, int rule,
                      const std::string& key) override {
    VitValue v;
    double p = probs[static_cast<size_t>(head) - 1];
    v.choices.push_back(VitChoice{rule, key, head, p});
    v.prob = p;
    return v;
  }

  // Explanations with equal probability compare equal: which optimal
  // explanation is reported depends on derivation order and is not part of
  // the answer's identity.
  bool value_equal(const Value& a, const Value& b) const override {
    const auto& x = std::get<VitValue>(a);
    const auto& y = std::get<VitValue>(b);
    return x.failed == y.failed && x.prob == y.prob;
  }

  ResultValue ret(const Value& v) override {
    const auto& x = std::get<VitValue>(v);
    return VitResult{x.failed, x.failed ? 0.0 : x.prob, x.choices};
  }

 private:
  static double fold(const std::vector<VitChoice>& choices) {
    double p = 1.0;
    for (const auto& c : choices) p *= c.p;
    return p;
  }
};

// Possibility: or is max, and is min. Annotations are necessity-style pairs
// [a, 1-a]; the clause's degree is the first element.
class PossAlgebra final : public Algebra {
 public:
  PossAlgebra() : Algebra(Mode::Poss, Flavor::Simplified, true, false) {}

  Value zero() override { return 0.0; }
  Value one() override { return 1.0; }
  bool is_zero(const Value& v) const override {
    return std::get<double>(v) == 0.0;
  }

  Value and_op(const Value& a, const Value& b) override {
    return std::min(std::get<double>(a), std::get<double>(b));
  }
  Value or_op(const Value& a, const Value& b) override {
    return std::max(std::get<double>(a), std::get<double>(b));
  }
  Value not_op(const Value&) override {
    raise(ErrorKind::NegationInPossMode,
          "negation is not defined in poss mode");
  }

  Value equality_list(const std::vector<double>& probs, int, int,
                      const std::string&) override {
    return probs[0];
  }

  bool value_equal(const Value& a, const Value& b) const override {
    return std::get<double>(a) == std::get<double>(b);
  }
  ResultValue ret(const Value& v) override { return std::get<double>(v); }
};

}  // namespace

std::unique_ptr<Algebra> make_algebra(Mode mode) {
  switch (mode) {
    case Mode::Prob: return std::make_unique<ProbAlgebra>();
    case Mode::IndExc: return std::make_unique<IndExcAlgebra>();
    case Mode::Count: return std::make_unique<CountAlgebra>();
    case Mode::Viterbi: return std::make_unique<ViterbiAlgebra>();
    case Mode::Poss: return std::make_unique<PossAlgebra>();
  }
  throw std::logic_error("unknown mode");
}

std::string vit_explanation_string(const std::vector<VitChoice>& choices) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < choices.size(); ++i) {
    if (i) os << ',';
    os << '(' << choices[i].rule << ',' << choices[i].key << ','
       << choices[i].head << ')';
  }
  os << ']';
  return os.str();
}

std::string result_to_string(const ResultValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return float_repr(*d);
  if (const auto* c = std::get_if<Count>(&v)) return c->str();
  const auto& vit = std::get<VitResult>(v);
  return float_repr(vit.prob);
}

}  // namespace pita
