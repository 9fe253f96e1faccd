#pragma once

#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pita/bdd.hpp"

namespace pita {

using Count = boost::multiprecision::cpp_int;

// One atomic choice of a Viterbi explanation: rule r with instance key s
// selected head n, whose annotation is p.
struct VitChoice {
  int rule = 0;
  std::string key;
  int head = 0;
  double p = 1.0;

  bool operator==(const VitChoice&) const = default;
};

// e(E,P): an explanation and its probability. P is maintained as the
// left-to-right product of the choice annotations, recomputed on every
// conjunction, so that replaying E always reproduces P bit for bit.
struct VitValue {
  bool failed = false;  // e(null, 0)
  std::vector<VitChoice> choices;
  double prob = 1.0;
};

using Value = std::variant<BddRef, double, Count, VitValue>;

struct VitResult {
  bool failed = false;
  double prob = 0.0;
  std::vector<VitChoice> choices;
};

using ResultValue = std::variant<double, Count, VitResult>;

std::string result_to_string(const ResultValue& v);
std::string vit_explanation_string(const std::vector<VitChoice>& choices);

}  // namespace pita
