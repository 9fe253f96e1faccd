#pragma once

#include <stdexcept>
#include <string>

namespace pita {

// Everything the engine, oracle or BDD layer can refuse to do at runtime.
// Parse errors carry positions and live in parser.hpp instead.
enum class ErrorKind {
  NonGroundKey,          // grounding key requested for a term with free variables
  NonGroundAnswer,       // derived answer tuple still contains variables
  NonGroundNegation,     // negative literal called with free variables
  NegationUnsupported,   // \+ under an algebra without a not() operation
  NegationInPossMode,    // the possibilistic fragment is negation-free
  NotStratified,         // negative call into a subgoal of the same SCC
  CyclicNonIdempotent,   // cyclic derivation under a non-idempotent or()
  NonConvergent,         // fixpoint iteration exceeded the round cap
  TooManyWorlds,         // exhaustive enumeration cap exceeded
  UnsupportedProgram,    // oracle cannot ground the program safely
  BadDistribution,       // annotation list violates [0,1] / sum <= 1
  UnknownVar,            // BDD variable id out of range
  ValueOutOfRange,       // head index out of range for a variable
  ManagerMismatch,       // BDD node used with a foreign manager
  DuplicateContribution, // internal consistency check on the contribution log
  StepLimitExceeded,     // engine ran past the configured step budget
  TimedOut,              // engine ran past the configured deadline
};

const char* error_kind_name(ErrorKind k);

class PitaError : public std::runtime_error {
public:
  PitaError(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& msg) {
  throw PitaError(kind, msg);
}

}  // namespace pita
