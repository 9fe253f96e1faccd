#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pita/value.hpp"

namespace pita {

enum class Mode { Prob, IndExc, Count, Viterbi, Poss };
enum class Flavor { General, Simplified };

const char* mode_name(Mode m);
std::optional<Mode> mode_from_name(std::string_view name);

// The operations the transformed program is interpreted against. One of the
// concrete algebras below is picked per query mode; the engine never looks
// inside a Value except through this interface.
class Algebra {
 public:
  Algebra(Mode mode, Flavor flavor, bool idempotent_or, bool supports_negation)
      : mode_(mode),
        flavor_(flavor),
        idempotent_or_(idempotent_or),
        supports_negation_(supports_negation) {}
  virtual ~Algebra() = default;

  Algebra(const Algebra&) = delete;
  Algebra& operator=(const Algebra&) = delete;

  Mode mode() const { return mode_; }
  Flavor flavor() const { return flavor_; }
  // or(x, x) == x; cyclic programs are answered by fixpoint iteration only
  // when this holds.
  bool idempotent_or() const { return idempotent_or_; }
  bool supports_negation() const { return supports_negation_; }

  virtual Value zero() = 0;
  virtual Value one() = 0;
  virtual bool is_zero(const Value& v) const = 0;

  virtual Value and_op(const Value& a, const Value& b) = 0;
  virtual Value or_op(const Value& a, const Value& b) = 0;
  virtual Value not_op(const Value& a) = 0;

  // General flavor: a fresh multi-valued variable for one ground clause
  // instance, and a test of that variable against a head index (1-based).
  virtual int add_var(const std::vector<double>& probs);
  virtual Value equality_var(int var, int head);

  // Simplified flavor: equality takes the annotation list directly. rule and
  // key identify the ground instance for algebras that record choices.
  virtual Value equality_list(const std::vector<double>& probs, int head,
                              int rule, const std::string& key);

  virtual bool value_equal(const Value& a, const Value& b) const = 0;
  virtual ResultValue ret(const Value& v) = 0;

  // Only the probability algebra has one; used for diagnostics output.
  virtual BddManager* bdd_manager() { return nullptr; }

 private:
  Mode mode_;
  Flavor flavor_;
  bool idempotent_or_;
  bool supports_negation_;
};

std::unique_ptr<Algebra> make_algebra(Mode mode);

}  // namespace pita
