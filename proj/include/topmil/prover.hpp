#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "topmil/term.hpp"

namespace topmil {

using Clock = std::chrono::steady_clock;

struct ProofBudget {
  std::uint32_t max_depth = 500;
  std::uint64_t max_inferences = 1'000'000;
  std::optional<Clock::time_point> deadline;

  bool expired() const { return deadline && Clock::now() >= *deadline; }
};

enum class LoopCheck : std::uint8_t {
  None,
  // Fail a goal that is a variant of one of its ancestors in the proof tree.
  Variant,
  // Variant tabling of every non-built-in call, evaluated to a fixpoint.
  // Complete on programs whose calls have finitely many answers; answers
  // come out once each, not in SLD order.
  Tabled,
};

struct SolveOptions {
  bool occurs_check = false;
  LoopCheck loop_check = LoopCheck::None;
};

enum class ProofStatus : std::uint8_t { Success, Failure, BudgetExhausted };

struct SolveReport {
  ProofStatus status = ProofStatus::Failure;
  std::size_t answers = 0;
  bool depth_pruned = false;      // some branch was cut at max_depth
  bool aborted = false;           // the inference limit or the deadline stopped the search
  bool deadline_expired = false;
  std::uint64_t inferences = 0;

  bool truncated() const { return depth_pruned || aborted; }
};

// Engine built-ins that a problem may enable.
//   apply/N        apply(P, A1..Ak) runs P(A1..Ak); P may also be a compound closure.
//   succ_within/4  succ_within(X, Y, Lo, Hi): integers with Y = X+1, Lo =< X, Y =< Hi.
class BuiltinSet {
 public:
  BuiltinSet() = default;

  static bool is_known(const PredicateKey& key);
  void enable(const PredicateKey& key);
  bool contains(const PredicateKey& key) const { return keys_.count(key) != 0; }
  bool empty() const { return keys_.empty(); }
  const std::set<PredicateKey>& keys() const { return keys_; }

  friend bool operator==(const BuiltinSet&, const BuiltinSet&) = default;

 private:
  std::set<PredicateKey> keys_;
};

// Compiled, indexed clause store. Immutable once built, so one database can
// back any number of concurrent provers.
class ClauseDatabase {
 public:
  ClauseDatabase();
  explicit ClauseDatabase(const Program& program);

  std::size_t size() const;
  const Clause& clause(std::size_t i) const;

  struct Impl;
  const Impl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

// A database searched in order, optionally with some clauses switched off.
struct DatabaseView {
  const ClauseDatabase* db = nullptr;
  const std::vector<char>* enabled = nullptr;
};

class Prover {
 public:
  using AnswerFn = std::function<bool(const Substitution&)>;  // false stops the search

  Prover(std::vector<DatabaseView> databases, BuiltinSet builtins = {}, SolveOptions options = {});

  // Depth-first, leftmost selection, clauses in database order.
  SolveReport solve(const std::vector<Literal>& goal, const ProofBudget& budget, const AnswerFn& on_answer) const;

  // True iff the goal has at least one answer.
  SolveReport prove(const std::vector<Literal>& goal, const ProofBudget& budget) const;

 private:
  std::vector<DatabaseView> databases_;
  BuiltinSet builtins_;
  SolveOptions options_;
};

// Convenience entry points over a plain program.
SolveReport solve(const std::vector<Literal>& goal, const Program& program, const ProofBudget& budget,
                  std::vector<Substitution>* answers = nullptr,
                  std::size_t max_answers = std::numeric_limits<std::size_t>::max(),
                  const BuiltinSet& builtins = {}, const SolveOptions& options = {});

struct Entailment {
  bool entailed = false;
  bool truncated = false;
};

Entailment entails(const Program& program, const Literal& atom, const ProofBudget& budget,
                   const BuiltinSet& builtins = {}, const SolveOptions& options = {});

// ---- Metarule-driven search (used by the iterative-deepening learner) ----

struct MetaruleTemplate {
  Symbol name;
  Clause clause;                    // encapsulated metarule
  std::vector<VarId> existentials;  // second-order first, then first-order existentials
  std::vector<char> constrained;    // per body literal: ordering constraint applies
};

struct MetaBinding {
  std::size_t metarule = 0;
  std::vector<Term> values;  // one per existential, in template order
};

struct MetaSearchSpec {
  Symbol encapsulation;                // predicate symbol of encapsulated literals
  std::vector<MetaruleTemplate> metarules;
  std::vector<PredicateKey> targets;   // highest rank first
  std::size_t max_clauses = 1;
  bool lexicographic = true;
  std::vector<MetaBinding> initial;    // clauses already in the program
};

class MetaProver {
 public:
  // Returns true to accept the completed program and stop.
  using AcceptFn = std::function<bool(const std::vector<MetaBinding>&)>;

  MetaProver(std::vector<DatabaseView> background, BuiltinSet builtins = {});

  SolveReport solve(const std::vector<Literal>& goal, const MetaSearchSpec& spec, const ProofBudget& budget,
                    const AcceptFn& accept) const;

 private:
  std::vector<DatabaseView> background_;
  BuiltinSet builtins_;
};

}  // namespace topmil
