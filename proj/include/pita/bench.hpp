#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pita/algebra.hpp"
#include "pita/gen.hpp"

namespace pita {

struct BenchRow {
  std::string suite;
  int param = 0;
  std::string mode;
  uint64_t seed = 0;
  std::string value;  // empty when status != ok
  double time_s = 0.0;
  std::string status;  // "ok" or the error kind
};

struct BenchOptions {
  double timeout_s = 300.0;
  HmmSeqKind hmm_kind = HmmSeqKind::Repeat;
  HmmEncoding hmm_encoding = HmmEncoding::Reduced;
  // Called after each configuration finishes, so partial results survive a
  // crash or kill of the remaining runs.
  std::function<void(const BenchRow&)> on_row;
};

// Runs every (parameter, mode) configuration of a suite. hmm: param is the
// sequence length; graph: param is the edge count (node count derived).
// Failures become status rows; the run itself never throws on engine errors.
std::vector<BenchRow> run_bench(const std::string& suite,
                                const std::vector<Mode>& modes, int from,
                                int to, int step, uint64_t seed,
                                const BenchOptions& opts);

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const BenchRow& row);
void write_csv(std::ostream& os, const std::vector<BenchRow>& rows);
bool bench_had_errors(const std::vector<BenchRow>& rows);

}  // namespace pita
