#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

namespace pita {

class BddManager;

// Node handle. Handles are only meaningful inside their owning manager;
// canonicity makes handle equality coincide with Boolean-function equality.
struct BddRef {
  uint32_t node = 0;
  BddManager* mgr = nullptr;

  bool operator==(const BddRef& o) const { return node == o.node && mgr == o.mgr; }
};

// Reduced ordered BDDs with a unique table and memoized apply. Variable
// order is creation order; there is no reordering and no complement edges.
// Multi-valued random variables are encoded as a chain of Boolean variables
// with conditional probabilities.
class BddManager {
public:
  BddManager();
  BddManager(const BddManager&) = delete;
  BddManager& operator=(const BddManager&) = delete;

  BddRef zero() { return {0, this}; }
  BddRef one() { return {1, this}; }

  // Registers an n-valued variable (n = probs.size() >= 2, probs sum to 1).
  // Allocates n-1 Boolean variables at the next levels with chain-rule
  // probabilities P(X_i) = p_i / (1 - sum_{j<i} p_j); a tail with no mass
  // left gets probability 0 instead of dividing by ~0.
  int add_var(const std::vector<double>& probs);

  // BDD of "variable v takes its value'th head", value in 1..n.
  BddRef equality(int v, int value);

  BddRef apply_and(BddRef a, BddRef b);
  BddRef apply_or(BddRef a, BddRef b);
  BddRef apply_not(BddRef a);

  double ret_prob(BddRef b);

  size_t node_count() const { return nodes_.size(); }
  size_t bool_var_count() const { return level_probs_.size(); }
  size_t var_count() const { return vars_.size(); }

  // A single apply chain can outlive any caller-side timeout check by a wide
  // margin, so the manager polls the deadline itself while building nodes.
  // The default (epoch) time point means no deadline.
  void set_deadline(std::chrono::steady_clock::time_point tp) { deadline_ = tp; }

  void dump_dot(std::ostream& os, BddRef root) const;

private:
  static constexpr uint32_t kTerminalLevel = 0xffffffffu;

  struct Node {
    uint32_t level, low, high;
  };
  struct NodeKey {
    uint32_t level, low, high;
    bool operator==(const NodeKey&) const = default;
  };
  struct NodeKeyHash {
    size_t operator()(const NodeKey& k) const {
      uint64_t h = (uint64_t)k.level * 0x9E3779B97F4A7C15ull;
      h ^= (uint64_t)k.low * 0xC2B2AE3D27D4EB4Full + (h >> 29);
      h ^= (uint64_t)k.high * 0x165667B19E3779F9ull + (h >> 31);
      return static_cast<size_t>(h);
    }
  };
  struct MultiVar {
    int n_val;
    uint32_t first_level;
  };

  uint32_t mk(uint32_t level, uint32_t low, uint32_t high);
  uint32_t apply(int op, uint32_t a, uint32_t b);
  uint32_t apply_not_rec(uint32_t a);
  void check(BddRef r) const;

  std::vector<Node> nodes_;
  std::chrono::steady_clock::time_point deadline_{};
  uint32_t tick_ = 0;
  std::unordered_map<NodeKey, uint32_t, NodeKeyHash> unique_;
  std::unordered_map<uint64_t, uint32_t> memo_;
  std::vector<double> level_probs_;
  std::vector<MultiVar> vars_;
  // P(node) never changes once created: level probabilities are fixed
  // before any node at that level exists, so this cache is persistent.
  std::unordered_map<uint32_t, double> prob_memo_;
};

}  // namespace pita
