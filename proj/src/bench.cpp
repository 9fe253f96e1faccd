#include "pita/bench.hpp"

#include <malloc.h>

#include <chrono>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "pita/engine.hpp"
#include "pita/errors.hpp"
#include "pita/parser.hpp"

namespace pita {

namespace {

int graph_nodes_for(int edges) { return std::max(4, (edges + 2) / 3); }

BenchRow run_one(const std::string& suite, int param, Mode mode,
                 uint64_t seed, const Program& p, const Term* goal,
                 double timeout_s) {
  BenchRow row{suite, param, mode_name(mode), seed, "", 0.0, "ok"};
  SolveOptions opts;
  opts.timeout_s = timeout_s;
  auto t0 = std::chrono::steady_clock::now();
  try {
    SolveResult res = solve(p, mode, goal, opts);
    if (!res.answers.empty())
      row.value = result_to_string(res.answers.front().value);
  } catch (const PitaError& e) {
    row.status = error_kind_name(e.kind());
  } catch (const std::bad_alloc&) {
    row.status = "OutOfMemory";
  } catch (const std::length_error&) {
    row.status = "OutOfMemory";
  }
  row.time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return row;
}

}  // namespace

std::vector<BenchRow> run_bench(const std::string& suite,
                                const std::vector<Mode>& modes, int from,
                                int to, int step, uint64_t seed,
                                const BenchOptions& opts) {
  if (suite != "hmm" && suite != "graph")
    throw std::invalid_argument("unknown bench suite: " + suite);
  if (step <= 0 || from < 1 || to < from)
    throw std::invalid_argument("bad bench range");

  std::vector<BenchRow> rows;
  for (int param = from; param <= to; param += step) {
    std::string text;
    std::string goal_text;
    if (suite == "hmm") {
      GeneratedProgram gp =
          gen_hmm(param, opts.hmm_kind, opts.hmm_encoding, seed);
      text = std::move(gp.text);
      goal_text = std::move(gp.goal);
    } else {
      GeneratedGraph gg = gen_graph(graph_nodes_for(param), param, seed);
      text = std::move(gg.text);
      goal_text = std::move(gg.goal);
    }
    Program p = parse_program(text);
    const Term* goal = parse_query(p, goal_text);
    for (Mode mode : modes) {
      rows.push_back(
          run_one(suite, param, mode, seed, p, goal, opts.timeout_s));
      if (opts.on_row) opts.on_row(rows.back());
      // A run that died on memory leaves freed arena pages mapped; return
      // them so later runs still fit under any address-space cap.
      malloc_trim(0);
    }
  }
  return rows;
}

void write_csv_header(std::ostream& os) {
  os << "suite,param,mode,seed,value,time_s,status\n";
}

void write_csv_row(std::ostream& os, const BenchRow& r) {
  os << r.suite << ',' << r.param << ',' << r.mode << ',' << r.seed << ','
     << r.value << ',' << std::fixed << std::setprecision(6) << r.time_s
     << ',' << r.status << '\n';
}

void write_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  write_csv_header(os);
  for (const BenchRow& r : rows) write_csv_row(os, r);
}

bool bench_had_errors(const std::vector<BenchRow>& rows) {
  for (const BenchRow& r : rows)
    if (r.status != "ok") return true;
  return false;
}

}  // namespace pita
