#include "pita/bdd.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "pita/errors.hpp"
#include "pita/term.hpp"

namespace pita {

namespace {
constexpr int kOpAnd = 0;
constexpr int kOpOr = 1;
constexpr int kOpNot = 2;
}  // namespace

BddManager::BddManager() {
  nodes_.push_back({kTerminalLevel, 0, 0});  // ZERO
  nodes_.push_back({kTerminalLevel, 1, 1});  // ONE
}

void BddManager::check(BddRef r) const {
  if (r.mgr != this)
    raise(ErrorKind::ManagerMismatch, "BDD handle belongs to a different manager");
  if (r.node >= nodes_.size()) raise(ErrorKind::ManagerMismatch, "stale BDD handle");
}

uint32_t BddManager::mk(uint32_t level, uint32_t low, uint32_t high) {
  if ((++tick_ & 0x3FFFu) == 0 &&
      deadline_ != std::chrono::steady_clock::time_point{} &&
      std::chrono::steady_clock::now() > deadline_)
    raise(ErrorKind::TimedOut, "BDD construction ran past the deadline");
  if (low == high) return low;
  NodeKey k{level, low, high};
  auto it = unique_.find(k);
  if (it != unique_.end()) return it->second;
  uint32_t id = static_cast<uint32_t>(nodes_.size());
  nodes_.push_back({level, low, high});
  unique_.emplace(k, id);
  return id;
}

int BddManager::add_var(const std::vector<double>& probs) {
  if (probs.size() < 2)
    raise(ErrorKind::BadDistribution, "a random variable needs at least 2 values");
  double sum = 0;
  for (double p : probs) {
    if (p < -1e-9 || p > 1 + 1e-9)
      raise(ErrorKind::BadDistribution, "annotation " + float_repr(p) + " outside [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    raise(ErrorKind::BadDistribution, "annotations sum to " + float_repr(sum));

  MultiVar v{static_cast<int>(probs.size()), static_cast<uint32_t>(level_probs_.size())};
  double rest = 1.0;
  for (size_t i = 0; i + 1 < probs.size(); ++i) {
    double q = rest < 1e-12 ? 0.0 : probs[i] / rest;
    if (q < 0) q = 0;
    if (q > 1) q = 1;
    level_probs_.push_back(q);
    rest -= probs[i];
  }
  vars_.push_back(v);
  return static_cast<int>(vars_.size()) - 1;
}

BddRef BddManager::equality(int v, int value) {
  if (v < 0 || static_cast<size_t>(v) >= vars_.size())
    raise(ErrorKind::UnknownVar, "no random variable " + std::to_string(v));
  const MultiVar& mv = vars_[v];
  if (value < 1 || value > mv.n_val)
    raise(ErrorKind::ValueOutOfRange,
          "value " + std::to_string(value) + " for a " + std::to_string(mv.n_val) +
              "-valued variable");
  uint32_t res;
  int i = value;
  if (i < mv.n_val) {
    res = mk(mv.first_level + i - 1, 0, 1);
  } else {
    res = 1;  // last value: all chain variables false
    i = mv.n_val;
  }
  for (int j = i - 2; j >= 0; --j) res = mk(mv.first_level + j, res, 0);
  return {res, this};
}

uint32_t BddManager::apply(int op, uint32_t a, uint32_t b) {
  if (op == kOpAnd) {
    if (a == 0 || b == 0) return 0;
    if (a == 1) return b;
    if (b == 1) return a;
    if (a == b) return a;
  } else {
    if (a == 1 || b == 1) return 1;
    if (a == 0) return b;
    if (b == 0) return a;
    if (a == b) return a;
  }
  if (a > b) std::swap(a, b);
  uint64_t key = (static_cast<uint64_t>(op) << 62) | (static_cast<uint64_t>(a) << 31) | b;
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;

  uint32_t la = nodes_[a].level, lb = nodes_[b].level;
  uint32_t l = std::min(la, lb);
  uint32_t a0 = la == l ? nodes_[a].low : a, a1 = la == l ? nodes_[a].high : a;
  uint32_t b0 = lb == l ? nodes_[b].low : b, b1 = lb == l ? nodes_[b].high : b;
  uint32_t res = mk(l, apply(op, a0, b0), apply(op, a1, b1));
  memo_.emplace(key, res);
  return res;
}

uint32_t BddManager::apply_not_rec(uint32_t a) {
  if (a == 0) return 1;
  if (a == 1) return 0;
  uint64_t key = (static_cast<uint64_t>(kOpNot) << 62) | (static_cast<uint64_t>(a) << 31);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  uint32_t res = mk(nodes_[a].level, apply_not_rec(nodes_[a].low), apply_not_rec(nodes_[a].high));
  memo_.emplace(key, res);
  return res;
}

BddRef BddManager::apply_and(BddRef a, BddRef b) {
  check(a);
  check(b);
  return {apply(kOpAnd, a.node, b.node), this};
}

BddRef BddManager::apply_or(BddRef a, BddRef b) {
  check(a);
  check(b);
  return {apply(kOpOr, a.node, b.node), this};
}

BddRef BddManager::apply_not(BddRef a) {
  check(a);
  return {apply_not_rec(a.node), this};
}

double BddManager::ret_prob(BddRef b) {
  check(b);
  // iterative DP to keep the stack shallow on long chains
  std::vector<uint32_t> todo{b.node};
  while (!todo.empty()) {
    uint32_t n = todo.back();
    if (n <= 1 || prob_memo_.count(n)) {
      todo.pop_back();
      continue;
    }
    uint32_t lo = nodes_[n].low, hi = nodes_[n].high;
    bool ready = true;
    if (lo > 1 && !prob_memo_.count(lo)) {
      todo.push_back(lo);
      ready = false;
    }
    if (hi > 1 && !prob_memo_.count(hi)) {
      todo.push_back(hi);
      ready = false;
    }
    if (!ready) continue;
    auto val = [&](uint32_t m) {
      return m == 0 ? 0.0 : m == 1 ? 1.0 : prob_memo_.at(m);
    };
    double p = level_probs_[nodes_[n].level];
    prob_memo_.emplace(n, p * val(hi) + (1 - p) * val(lo));
    todo.pop_back();
  }
  return b.node == 0 ? 0.0 : b.node == 1 ? 1.0 : prob_memo_.at(b.node);
}

void BddManager::dump_dot(std::ostream& os, BddRef root) const {
  if (root.mgr != this)
    raise(ErrorKind::ManagerMismatch, "BDD handle belongs to a different manager");
  os << "digraph bdd {\n";
  os << "  n0 [shape=box,label=\"0\"];\n";
  os << "  n1 [shape=box,label=\"1\"];\n";
  std::vector<uint32_t> todo{root.node};
  std::vector<bool> seen(nodes_.size(), false);
  while (!todo.empty()) {
    uint32_t n = todo.back();
    todo.pop_back();
    if (n <= 1 || seen[n]) continue;
    seen[n] = true;
    os << "  n" << n << " [label=\"x" << nodes_[n].level << " p="
       << float_repr(level_probs_[nodes_[n].level]) << "\"];\n";
    os << "  n" << n << " -> n" << nodes_[n].high << ";\n";
    os << "  n" << n << " -> n" << nodes_[n].low << " [style=dashed];\n";
    todo.push_back(nodes_[n].low);
    todo.push_back(nodes_[n].high);
  }
  os << "}\n";
}

}  // namespace pita
