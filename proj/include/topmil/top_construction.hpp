#pragma once

#include <vector>

#include "topmil/metarules.hpp"
#include "topmil/problem.hpp"
#include "topmil/prover.hpp"

namespace topmil {

struct TopPartition {
  std::vector<Metasubstitution> generalised;  // derived from some positive example
  std::vector<Metasubstitution> removed;      // of those, entailing some negative example
  std::vector<Metasubstitution> top;          // generalised minus removed
  bool truncated = false;                     // a proof was cut by the budget
  bool deadline_expired = false;
};

struct TopStats {
  bool truncated = false;
  bool deadline_expired = false;
};

// All metasubstitutions whose clause, resolved once against the encapsulated
// background and positive examples, proves some positive example. Sorted by
// metarule name then bindings; duplicate clauses (up to renaming) dropped.
std::vector<Metasubstitution> generalise(const MILProblem& problem, const ProofBudget& budget,
                                         TopStats* stats = nullptr);
std::vector<Metasubstitution> generalise(const std::vector<Literal>& e_pos, const Program& b,
                                         const std::vector<Metarule>& metarules, const ProofBudget& budget = {});

// top_plus minus every metasubstitution whose clause, together with the
// background and positive examples, entails a negative example.
std::vector<Metasubstitution> specialise(const std::vector<Metasubstitution>& top_plus, const MILProblem& problem,
                                         const ProofBudget& budget, TopStats* stats = nullptr);
std::vector<Metasubstitution> specialise(const std::vector<Metasubstitution>& top_plus,
                                         const std::vector<Literal>& e_neg, const Program& b,
                                         const std::vector<Literal>& e_pos, const std::vector<Metarule>& metarules,
                                         const ProofBudget& budget = {});

TopPartition construct_top(const MILProblem& problem, const ProofBudget& budget = {});

// Metarule named by mu among `metarules`; throws MetaruleError if missing.
const Metarule& metarule_for(const Metasubstitution& mu, const std::vector<Metarule>& metarules);
Clause apply_metasub(const Metasubstitution& mu, const std::vector<Metarule>& metarules);

}  // namespace topmil
