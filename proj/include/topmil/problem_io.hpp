#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "topmil/problem.hpp"

namespace topmil {

struct Hypothesis;

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, std::set<std::string> expected, const std::string& message);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::set<std::string>& expected() const { return expected_; }

 private:
  std::size_t line_, column_;
  std::set<std::string> expected_;
};

// Problem file:
//   % comment
//   :- pos.        ground atoms
//   :- neg.        ground atoms (the goal arrow is implicit)
//   :- bk.         clauses
//   :- support.    clauses callable from bk but hidden from hypotheses
//   :- builtins.   name/arity items
//   :- metarules.  catalog names, or
//                  metarule name: (P(x,y) :- Q(x,z), R(z,y)) exists [P,Q,R].
// Every section is optional and may appear at most once.
MILProblem parse_problem(std::string_view text);
MILProblem load_problem(const std::string& path);

// Plain clause list, as in .hyp files.
Program parse_program(std::string_view text);
Literal parse_literal(std::string_view text);
Clause parse_clause(std::string_view text);
Metarule parse_metarule(std::string_view text);

std::string serialize_problem(const MILProblem& p);
std::string serialize_hypothesis(const Hypothesis& h);
std::string serialize_metarule(const Metarule& m);
void save_text(const std::string& path, const std::string& text);

}  // namespace topmil
