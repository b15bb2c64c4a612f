#pragma once

#include <vector>

#include "topmil/encapsulation.hpp"
#include "topmil/metarules.hpp"
#include "topmil/prover.hpp"

namespace topmil {

// <E+, E-, B, M>; the hypothesis space is implicit in the metarules and the
// predicate symbols of the background and the examples.
struct MILProblem {
  std::vector<Literal> positive;
  std::vector<Literal> negative;
  Program background;
  // Auxiliary definitions callable from the background but never offered to
  // hypotheses (they stay outside the encapsulated language).
  Program support;
  BuiltinSet builtins;
  std::vector<Metarule> metarules;

  // (symbol, arity) of every example, first occurrence order, positives first.
  std::vector<PredicateKey> target_predicates() const;
  // Predicates defined in the background that are not targets.
  std::vector<PredicateKey> background_predicates() const;
  // Built-ins and support predicates stay plain; apply/N becomes a call.
  Encapsulation encapsulation() const;
  // Background followed by support, for evaluation outside encapsulation.
  Program full_background() const;
};

}  // namespace topmil
