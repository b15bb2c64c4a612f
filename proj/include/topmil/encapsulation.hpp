#pragma once

#include <set>
#include <stdexcept>

#include "topmil/term.hpp"

namespace topmil {

class EncapsulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Symbol default_encapsulation_symbol();  // m

// p(s1..sn) <-> m(p, s1..sn). Literals of predicates listed in `plain`
// (engine built-ins, auxiliary definitions) are left untouched, and a call
// apply(P, s1..sn) becomes m(P, s1..sn) when apply is a built-in.
struct Encapsulation {
  Symbol predicate = default_encapsulation_symbol();
  std::set<PredicateKey> plain;
  bool apply_is_call = false;

  bool is_encapsulated(const Literal& l) const { return l.predicate == predicate && !l.args.empty(); }

  Literal encapsulate(const Literal& l) const;
  Clause encapsulate(const Clause& c) const;
  Program encapsulate(const Program& p) const;
  std::vector<Literal> encapsulate(const std::vector<Literal>& atoms) const;

  // Throws EncapsulationError when the predicate argument is not a constant.
  Literal excapsulate(const Literal& l) const;
  Clause excapsulate(const Clause& c) const;
  Program excapsulate(const Program& p) const;
};

inline Literal encapsulate(const Literal& l) { return Encapsulation{}.encapsulate(l); }
inline Clause encapsulate(const Clause& c) { return Encapsulation{}.encapsulate(c); }
inline Program encapsulate(const Program& p) { return Encapsulation{}.encapsulate(p); }
inline Literal excapsulate(const Literal& l) { return Encapsulation{}.excapsulate(l); }
inline Clause excapsulate(const Clause& c) { return Encapsulation{}.excapsulate(c); }
inline Program excapsulate(const Program& p) { return Encapsulation{}.excapsulate(p); }

}  // namespace topmil
