#pragma once

#include <optional>
#include <vector>

#include "topmil/problem.hpp"
#include "topmil/top_construction.hpp"

namespace topmil {

struct Hypothesis {
  Program clauses;                 // target-predicate heads only
  std::vector<Literal> residue;    // uncovered positives kept as unit clauses
  std::vector<std::optional<Metasubstitution>> provenance;  // per clause
  bool deadline_expired = false;
  bool truncated = false;          // some proof hit a budget limit

  // Clauses followed by the residue units.
  Program program() const;
  std::size_t size() const { return clauses.size() + residue.size(); }
  bool empty() const { return size() == 0; }
};

struct LearnerConfig {
  ProofBudget budget;
  std::optional<double> deadline_seconds;
  std::size_t max_hypothesis_size = 8;  // baseline only
  bool lexicographic_order = true;      // baseline only
  bool reduce = true;                   // top program learner only

  // budget with the deadline (if any) counted from now.
  ProofBudget start() const;
};

// Top program construction followed by reduction.
Hypothesis louise_learn(const MILProblem& problem, const LearnerConfig& config = {});

// Iterative deepening on the number of clauses; absent when no hypothesis
// up to max_hypothesis_size is consistent or the deadline expires. `expired`
// reports the latter.
std::optional<Hypothesis> metagol_learn(const MILProblem& problem, const LearnerConfig& config = {},
                                        bool* expired = nullptr);

struct EvalReport {
  std::size_t true_pos = 0, false_neg = 0, true_neg = 0, false_pos = 0;
  double accuracy = 0.0;
  bool truncated = false;
};

// Entailment under h ∪ background by tabled resolution. A proof
// cut by the budget counts as not entailed.
EvalReport evaluate(const Program& h, const Program& background, const std::vector<Literal>& pos,
                    const std::vector<Literal>& neg, const ProofBudget& budget = {}, const BuiltinSet& builtins = {});
EvalReport evaluate(const Hypothesis& h, const MILProblem& problem, const std::vector<Literal>& pos,
                    const std::vector<Literal>& neg, const ProofBudget& budget = {});

}  // namespace topmil
