#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "topmil/problem_io.hpp"
#include "topmil/term.hpp"

#ifndef TOPMIL_DATA_DIR
#define TOPMIL_DATA_DIR "data"
#endif

namespace topmil::testing {

inline std::string data_path(const std::string& name) { return std::string(TOPMIL_DATA_DIR) + "/" + name; }

inline Literal L(const char* text) { return parse_literal(text); }
inline Clause C(const char* text) { return parse_clause(text); }
inline Program P(const char* text) { return parse_program(text); }

// Variant keys of a program, for comparisons up to renaming and order.
inline std::multiset<std::string> variants(const Program& p) {
  std::multiset<std::string> out;
  for (const Clause& c : p) out.insert(variant_key(c));
  return out;
}

inline std::vector<std::string> printed(const Program& p) {
  std::vector<std::string> out;
  for (const Clause& c : p) out.push_back(to_string(display_rename(c)));
  return out;
}

}  // namespace topmil::testing
