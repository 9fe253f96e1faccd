#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pita {

enum class HmmSeqKind { Repeat, Random };
enum class HmmEncoding { Reduced, Naive };

struct GeneratedProgram {
  std::string text;
  std::string goal;
};

// Two-state (q1, q2) plus end model: successor uniform over {q1, q2, end},
// emission uniform over {a, c, g, t}. The reduced encoding drops the
// state-history arguments; the naive one threads them through every literal.
GeneratedProgram gen_hmm(int length, HmmSeqKind kind, HmmEncoding enc,
                         uint64_t seed);

struct GraphEdge {
  int from = 0;
  int to = 0;
  double weight = 0.0;
};

struct GeneratedGraph {
  std::string text;
  std::string goal;
  int nodes = 0;
  int source = 1;
  int target = 1;
  std::vector<GraphEdge> edges;
};

// Weighted directed graph with a chain backbone plus random extra edges,
// reflexive/transitive path clauses, and goal path(source, target). Weights
// are drawn from the 4-decimal grid in (0, 1], so their printed form parses
// back to the identical double.
GeneratedGraph gen_graph(int nodes, int edges, uint64_t seed);

}  // namespace pita
