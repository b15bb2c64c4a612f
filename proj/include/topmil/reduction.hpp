#pragma once

#include <vector>

#include "topmil/prover.hpp"

namespace topmil {

// True iff every clause of psi is derivable from phi ∪ th: the clause is
// skolemized, its body asserted as facts and its head proved. Proofs cut by
// the budget count as not derivable.
bool generalises(const Program& phi, const Program& psi, const Program& th, const ProofBudget& budget = {},
                 const BuiltinSet& builtins = {});

struct ReduceOptions {
  BuiltinSet builtins;
  // Only clauses flagged here are candidates for removal; empty means all.
  std::vector<char> candidates;
};

// Visits clauses in input order and drops each one derivable from the
// remaining clauses and th. Survivors keep their input order.
Program plotkin_reduce(const Program& h, const Program& th, const ProofBudget& budget = {},
                       const ReduceOptions& options = {}, std::vector<char>* kept = nullptr);

}  // namespace topmil
