#include <sys/resource.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pita/bench.hpp"
#include "pita/engine.hpp"
#include "pita/errors.hpp"
#include "pita/gen.hpp"
#include "pita/parser.hpp"
#include "pita/transform.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string short_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void print_answers(const pita::SolveResult& res) {
  for (const pita::SolveAnswer& a : res.answers) {
    std::cout << a.atom << '\t';
    if (const auto* d = std::get_if<double>(&a.value)) {
      std::cout << short_float(*d);
    } else if (const auto* c = std::get_if<pita::Count>(&a.value)) {
      std::cout << c->str();
    } else {
      const auto& vit = std::get<pita::VitResult>(a.value);
      std::cout << short_float(vit.prob) << '\t'
                << pita::vit_explanation_string(vit.choices);
    }
    std::cout << '\n';
  }
}

struct QueryArgs {
  std::string mode;
  std::string program;
  std::string goal;
  bool dump_transform = false;
  std::string dump_bdd;
  double timeout_s = 0.0;
  uint64_t step_limit = 0;
};

int run_query(const QueryArgs& args) {
  pita::Mode mode = *pita::mode_from_name(args.mode);
  pita::Program p;
  const pita::Term* goal = nullptr;
  try {
    p = pita::parse_program(read_file(args.program), mode == pita::Mode::Poss);
    goal = pita::parse_query(p, args.goal);
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  }

  if (args.dump_transform) {
    pita::Flavor flavor = mode == pita::Mode::Prob ? pita::Flavor::General
                                                   : pita::Flavor::Simplified;
    std::cout << pita::dump_transformed(pita::pita_transform(p, flavor), p);
  }

  pita::SolveOptions opts;
  opts.timeout_s = args.timeout_s;
  opts.step_limit = args.step_limit;
  opts.dump_bdd_path = args.dump_bdd;
  try {
    print_answers(pita::solve(p, mode, goal, opts));
  } catch (const pita::PitaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

bool parse_range(const std::string& s, int& from, int& to, int& step) {
  char extra;
  if (std::sscanf(s.c_str(), "%d:%d:%d%c", &from, &to, &step, &extra) == 3)
    return true;
  step = 1;
  return std::sscanf(s.c_str(), "%d:%d%c", &from, &to, &extra) == 2;
}

void write_program_file(const std::string& path, const std::string& text,
                        const std::string& goal) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "% goal: " << goal << "\n" << text;
  std::cout << "wrote " << path << "\tgoal: " << goal << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uncertainty queries over annotated logic programs"};
  app.require_subcommand(1);
  const std::vector<std::string> mode_names = {"prob", "ind-exc", "count",
                                               "viterbi", "poss"};

  QueryArgs qa;
  auto* q = app.add_subcommand("query", "evaluate a goal against a program");
  q->add_option("-m,--mode", qa.mode, "uncertainty mode")
      ->required()
      ->check(CLI::IsMember(mode_names));
  q->add_option("-p,--program", qa.program, "program file (.lpad)")
      ->required()
      ->check(CLI::ExistingFile);
  q->add_option("-g,--goal", qa.goal, "ground or partially bound goal atom")
      ->required();
  q->add_flag("--dump-transform", qa.dump_transform,
              "print the instrumented clauses before solving");
  q->add_option("--dump-bdd", qa.dump_bdd,
                "write the final query BDD as graphviz (prob mode)");
  q->add_option("--timeout", qa.timeout_s, "wall clock limit in seconds");
  q->add_option("--steps", qa.step_limit, "resolution step limit");

  auto* gen = app.add_subcommand("gen", "generate a benchmark program");
  gen->require_subcommand(1);

  int hmm_length = 4;
  std::string hmm_kind = "repeat", hmm_encoding = "reduced", hmm_out;
  uint64_t hmm_seed = 1;
  auto* gh = gen->add_subcommand("hmm", "two-state HMM with a sequence goal");
  gh->add_option("--length", hmm_length, "sequence length")->required();
  gh->add_option("--kind", hmm_kind)->check(CLI::IsMember({"repeat", "random"}));
  gh->add_option("--encoding", hmm_encoding)
      ->check(CLI::IsMember({"reduced", "naive"}));
  gh->add_option("--seed", hmm_seed);
  gh->add_option("-o,--output", hmm_out, "output .lpad path")->required();

  int g_nodes = 4, g_edges = 3;
  uint64_t g_seed = 1;
  std::string g_out;
  auto* gg = gen->add_subcommand("graph", "weighted digraph with path goal");
  gg->add_option("--nodes", g_nodes)->required();
  gg->add_option("--edges", g_edges)->required();
  gg->add_option("--seed", g_seed);
  gg->add_option("-o,--output", g_out, "output .lpad path")->required();

  std::string b_suite, b_modes, b_range = "1:8", b_out;
  std::string b_kind = "repeat", b_encoding = "reduced";
  uint64_t b_seed = 1;
  double b_timeout = 300.0, b_mem_gb = 4.0;
  auto* b = app.add_subcommand("bench", "run a benchmark suite, write CSV");
  b->add_option("suite", b_suite)->required()->check(CLI::IsMember({"hmm", "graph"}));
  b->add_option("--modes", b_modes, "comma-separated mode list")->required();
  b->add_option("--range", b_range, "from:to[:step]");
  b->add_option("--seed", b_seed);
  b->add_option("--timeout", b_timeout, "per-query timeout in seconds");
  b->add_option("--mem-gb", b_mem_gb,
                "address-space cap in GiB, 0 = unlimited (failed runs "
                "become OutOfMemory rows)");
  b->add_option("--kind", b_kind)->check(CLI::IsMember({"repeat", "random"}));
  b->add_option("--encoding", b_encoding)
      ->check(CLI::IsMember({"reduced", "naive"}));
  b->add_option("-o,--output", b_out, "CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (q->parsed()) return run_query(qa);

    if (gh->parsed()) {
      pita::GeneratedProgram gp = pita::gen_hmm(
          hmm_length,
          hmm_kind == "repeat" ? pita::HmmSeqKind::Repeat
                               : pita::HmmSeqKind::Random,
          hmm_encoding == "reduced" ? pita::HmmEncoding::Reduced
                                    : pita::HmmEncoding::Naive,
          hmm_seed);
      write_program_file(hmm_out, gp.text, gp.goal);
      return 0;
    }
    if (gg->parsed()) {
      pita::GeneratedGraph graph = pita::gen_graph(g_nodes, g_edges, g_seed);
      write_program_file(g_out, graph.text, graph.goal);
      return 0;
    }

    if (b->parsed()) {
      int from = 0, to = 0, step = 1;
      if (!parse_range(b_range, from, to, step)) {
        std::cerr << "bad --range, expected from:to[:step]\n";
        return 1;
      }
      std::vector<pita::Mode> modes;
      std::stringstream ms(b_modes);
      std::string tok;
      while (std::getline(ms, tok, ',')) {
        auto m = pita::mode_from_name(tok);
        if (!m) {
          std::cerr << "unknown mode: " << tok << "\n";
          return 1;
        }
        modes.push_back(*m);
      }
      if (b_mem_gb > 0) {
        rlimit rl{};
        rl.rlim_cur = rl.rlim_max =
            static_cast<rlim_t>(b_mem_gb * 1024.0 * 1024.0 * 1024.0);
        if (setrlimit(RLIMIT_AS, &rl) != 0)
          std::cerr << "warning: could not set the memory limit\n";
      }
      pita::BenchOptions opts;
      opts.timeout_s = b_timeout;
      opts.hmm_kind = b_kind == "repeat" ? pita::HmmSeqKind::Repeat
                                         : pita::HmmSeqKind::Random;
      opts.hmm_encoding = b_encoding == "reduced" ? pita::HmmEncoding::Reduced
                                                  : pita::HmmEncoding::Naive;
      std::ofstream out(b_out);
      if (!out) throw std::runtime_error("cannot write " + b_out);
      pita::write_csv_header(out);
      opts.on_row = [&out](const pita::BenchRow& row) {
        pita::write_csv_row(out, row);
        out.flush();
      };
      std::vector<pita::BenchRow> rows =
          pita::run_bench(b_suite, modes, from, to, step, b_seed, opts);
      std::cout << "wrote " << b_out << " (" << rows.size() << " rows)\n";
      return pita::bench_had_errors(rows) ? 1 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
