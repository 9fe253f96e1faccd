#include "pita/gen.hpp"

#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pita/term.hpp"

namespace pita {

namespace {

const char* kLetters[4] = {"a", "c", "g", "t"};

std::string sequence_goal(int length, HmmSeqKind kind, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::string s = "hmm([";
  for (int i = 0; i < length; ++i) {
    if (i) s += ",";
    size_t pick = kind == HmmSeqKind::Repeat
                      ? static_cast<size_t>(i) % 4
                      : static_cast<size_t>(rng() % 4);
    s += kLetters[pick];
  }
  return s + "])";
}

void emit_choice_facts(std::ostringstream& os, bool naive) {
  const char* extra = naive ? ",S" : "";
  for (const char* q : {"q1", "q2"}) {
    os << "succ(" << q << ",q1" << extra << "):1/3 ; succ(" << q << ",q2"
       << extra << "):1/3 ; succ(" << q << ",end" << extra << "):1/3.\n";
  }
  for (const char* q : {"q1", "q2"}) {
    os << "out(" << q << ",a" << extra << "):1/4 ; out(" << q << ",c" << extra
       << "):1/4 ; out(" << q << ",g" << extra << "):1/4 ; out(" << q << ",t"
       << extra << "):1/4.\n";
  }
}

}  // namespace

GeneratedProgram gen_hmm(int length, HmmSeqKind kind, HmmEncoding enc,
                         uint64_t seed) {
  if (length < 1) throw std::invalid_argument("gen_hmm: length must be >= 1");
  std::ostringstream os;
  if (enc == HmmEncoding::Reduced) {
    os << "hmm(O) :- hmm(q1,O).\n"
          "hmm(end,[]).\n"
          "hmm(Q,[L|O]) :- Q \\= end, succ(Q,Q1), out(Q,L), hmm(Q1,O).\n";
  } else {
    os << "hmm(O) :- hmm1(_,O).\n"
          "hmm1(S,O) :- hmm(q1,[],S,O).\n"
          "hmm(end,S,S,[]).\n"
          "hmm(Q,S0,S,[L|O]) :- Q \\= end, succ(Q,Q1,S0), out(Q,L,S0), "
          "hmm(Q1,[Q|S0],S,O).\n";
  }
  emit_choice_facts(os, enc == HmmEncoding::Naive);
  return {os.str(), sequence_goal(length, kind, seed)};
}

GeneratedGraph gen_graph(int nodes, int edges, uint64_t seed) {
  if (nodes < 1) throw std::invalid_argument("gen_graph: need at least 1 node");
  if (edges > nodes * (nodes - 1))
    throw std::invalid_argument("gen_graph: more edges than node pairs");

  std::mt19937_64 rng(seed);
  GeneratedGraph g;
  g.nodes = nodes;
  g.source = 1;
  g.target = nodes;

  std::set<std::pair<int, int>> used;
  auto weight = [&rng] {
    return static_cast<double>(1 + rng() % 10000) / 10000.0;
  };
  auto add = [&](int from, int to) {
    used.insert({from, to});
    g.edges.push_back({from, to, weight()});
  };

  // chain backbone first: the designated query has a route whenever the
  // edge budget allows one
  for (int i = 1; i < nodes && static_cast<int>(g.edges.size()) < edges; ++i)
    add(i, i + 1);

  uint64_t attempts = 0;
  while (static_cast<int>(g.edges.size()) < edges) {
    int from = 1 + static_cast<int>(rng() % static_cast<uint64_t>(nodes));
    int to = 1 + static_cast<int>(rng() % static_cast<uint64_t>(nodes));
    if (from != to && !used.contains({from, to})) {
      add(from, to);
    } else if (++attempts > 64 * static_cast<uint64_t>(edges) + 1024) {
      for (int f = 1; f <= nodes; ++f)
        for (int t = 1; t <= nodes; ++t)
          if (f != t && !used.contains({f, t}) &&
              static_cast<int>(g.edges.size()) < edges)
            add(f, t);
    }
  }

  std::ostringstream os;
  os << "path(X,X).\n"
        "path(X,Y) :- path(X,Z), edge(Z,Y).\n";
  for (const GraphEdge& e : g.edges)
    os << "edge(n" << e.from << ",n" << e.to << "):" << float_repr(e.weight)
       << ".\n";
  g.text = os.str();
  g.goal = "path(n" + std::to_string(g.source) + ",n" +
           std::to_string(g.target) + ")";
  return g;
}

}  // namespace pita
