#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "pita/program.hpp"

namespace pita {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line_(line), col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

private:
  int line_;
  int col_;
};

// Parses LPAD text. In poss mode clauses must have exactly one head and the
// head annotation is the necessity lower bound.
Program parse_program(std::string_view text, bool poss_mode = false);

// Parses a query goal (one atom, optional final period) against an existing
// program, reusing its symbol table and arena. Query variables are numbered
// from 0 independently of any clause.
const Term* parse_query(Program& p, std::string_view text);

std::string clause_to_string(const AnnotatedClause& c, const SymbolTable& syms);
std::string program_to_string(const Program& p);

}  // namespace pita
