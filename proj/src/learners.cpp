#include "topmil/learners.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <string>

#include "topmil/reduction.hpp"

namespace topmil {
namespace {

Hypothesis expired_hypothesis() {
  Hypothesis h;
  h.deadline_expired = true;
  return h;
}

bool entails_with(const Prover& prover, const Literal& atom, const ProofBudget& budget, bool& truncated) {
  SolveReport r = prover.prove({atom}, budget);
  if (r.answers == 0 && r.truncated()) truncated = true;
  return r.answers > 0;
}

}  // namespace

Program Hypothesis::program() const {
  Program out = clauses;
  for (const Literal& l : residue) out.push_back(Clause(l));
  return out;
}

ProofBudget LearnerConfig::start() const {
  ProofBudget b = budget;
  if (deadline_seconds) {
    auto d = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*deadline_seconds));
    if (!b.deadline || d < *b.deadline) b.deadline = d;
  }
  return b;
}

Hypothesis louise_learn(const MILProblem& problem, const LearnerConfig& config) {
  const ProofBudget budget = config.start();
  Hypothesis h;
  if (problem.positive.empty()) return h;

  TopPartition top = construct_top(problem, budget);
  if (top.deadline_expired || budget.expired()) return expired_hypothesis();
  h.truncated = top.truncated;

  const Encapsulation enc = problem.encapsulation();
  const std::vector<PredicateKey> targets = problem.target_predicates();
  Program applied;
  for (const Metasubstitution& mu : top.top) applied.push_back(apply_metasub(mu, problem.metarules));

  Program background = enc.encapsulate(problem.background);
  background.insert(background.end(), problem.support.begin(), problem.support.end());

  std::vector<char> kept(applied.size(), 1);
  if (config.reduce && !applied.empty()) {
    Program th = background;
    for (const Literal& l : problem.positive) th.push_back(Clause(enc.encapsulate(l)));
    plotkin_reduce(enc.encapsulate(applied), th, budget, ReduceOptions{problem.builtins, {}}, &kept);
    if (budget.expired()) return expired_hypothesis();
  }
  for (std::size_t i = 0; i < applied.size(); ++i) {
    bool target_head = std::find(targets.begin(), targets.end(), applied[i].head.key()) != targets.end();
    if (!kept[i] || !target_head) continue;
    h.clauses.push_back(applied[i]);
    h.provenance.push_back(top.top[i]);
  }

  // Positives the clauses leave uncovered become unit clauses.
  Program full = problem.full_background();
  ClauseDatabase clause_db(h.clauses), bk_db(full);
  Prover prover({DatabaseView{&clause_db}, DatabaseView{&bk_db}}, problem.builtins,
                SolveOptions{false, LoopCheck::Tabled});
  std::vector<Literal> residue;
  for (const Literal& e : problem.positive) {
    if (std::find(residue.begin(), residue.end(), e) != residue.end()) continue;
    if (!entails_with(prover, e, budget, h.truncated)) residue.push_back(e);
    if (budget.expired()) return expired_hypothesis();
  }
  if (config.reduce && residue.size() > 1) {
    Program units = enc.encapsulate(h.clauses);
    std::vector<char> candidates(units.size(), 0);
    for (const Literal& l : residue) {
      units.push_back(Clause(enc.encapsulate(l)));
      candidates.push_back(1);
    }
    std::vector<char> survived;
    plotkin_reduce(units, background, budget, ReduceOptions{problem.builtins, candidates}, &survived);
    if (budget.expired()) return expired_hypothesis();
    for (std::size_t i = 0; i < residue.size(); ++i) {
      if (survived[h.clauses.size() + i]) h.residue.push_back(residue[i]);
    }
  } else {
    h.residue = std::move(residue);
  }
  return h;
}

std::optional<Hypothesis> metagol_learn(const MILProblem& problem, const LearnerConfig& config, bool* expired) {
  if (expired) *expired = false;
  const ProofBudget budget = config.start();
  if (problem.positive.empty()) return Hypothesis{};

  const Encapsulation enc = problem.encapsulation();
  Program background = enc.encapsulate(problem.background);
  background.insert(background.end(), problem.support.begin(), problem.support.end());
  ClauseDatabase bk_db(background);
  Program full = problem.full_background();
  ClauseDatabase full_db(full);

  MetaSearchSpec spec;
  spec.encapsulation = enc.predicate;
  spec.targets = problem.target_predicates();
  spec.lexicographic = config.lexicographic_order;
  for (const Metarule& m : problem.metarules) {
    MetaruleTemplate t;
    t.name = m.name;
    t.clause = encapsulate_metarule(m, enc.predicate);
    t.existentials = m.existentials();
    bool recursive = std::any_of(m.body.begin(), m.body.end(), [&](const Literal& l) {
      return l.predicate == m.head.predicate;
    });
    t.constrained.assign(m.body.size(), recursive ? 0 : 1);
    spec.metarules.push_back(std::move(t));
  }

  std::vector<Literal> goal = enc.encapsulate(problem.positive);
  MetaProver prover({DatabaseView{&bk_db}}, problem.builtins);
  std::optional<Hypothesis> found;

  auto to_hypothesis = [&](const std::vector<MetaBinding>& program) -> std::optional<Hypothesis> {
    Hypothesis h;
    for (const MetaBinding& b : program) {
      const Metarule& m = problem.metarules[b.metarule];
      Metasubstitution mu;
      mu.metarule = m.name;
      std::size_t k = 0;
      for (Symbol s : m.second_order) {
        const Term& v = b.values[k++];
        if (!v.is_constant()) return std::nullopt;
        mu.second_order.push_back({s, v.name()});
      }
      for (Symbol s : m.first_order) {
        const Term& v = b.values[k++];
        if (!v.ground()) return std::nullopt;
        mu.first_order.push_back({s, v});
      }
      h.clauses.push_back(apply_metasub(mu, m));
      h.provenance.push_back(mu);
    }
    return h;
  };

  auto consistent = [&](const std::vector<MetaBinding>& program) {
    std::optional<Hypothesis> h = to_hypothesis(program);
    if (!h) return false;
    ClauseDatabase hyp_db(h->clauses);
    Prover check({DatabaseView{&hyp_db}, DatabaseView{&full_db}}, problem.builtins,
                 SolveOptions{false, LoopCheck::Tabled});
    // A check cut short by the budget cannot certify consistency.
    for (const Literal& e : problem.negative) {
      SolveReport r = check.prove({e}, budget);
      if (r.answers > 0 || r.truncated()) return false;
    }
    found = std::move(h);
    return true;
  };

  // Positives are proved one at a time. One already derivable from the
  // program so far is committed to without trying other proofs of it.
  std::function<bool(std::size_t, const std::vector<MetaBinding>&)> prove_from =
      [&](std::size_t i, const std::vector<MetaBinding>& program) -> bool {
    if (budget.expired()) return false;
    if (i == goal.size()) return consistent(program);
    MetaSearchSpec step = spec;
    step.initial = program;
    step.max_clauses = program.size();
    if (prover.solve({goal[i]}, step, budget, [](const std::vector<MetaBinding>&) { return true; }).answers > 0) {
      return prove_from(i + 1, program);
    }
    step.max_clauses = spec.max_clauses;
    bool done = false;
    std::set<std::string> tried;  // distinct proofs often add the same clauses
    prover.solve({goal[i]}, step, budget, [&](const std::vector<MetaBinding>& extended) {
      std::string key;
      for (const MetaBinding& b : extended) {
        key += std::to_string(b.metarule);
        for (const Term& v : b.values) key += "," + to_string(v);
        key += ";";
      }
      if (!tried.insert(key).second) return false;
      done = prove_from(i + 1, extended);
      return done || budget.expired();
    });
    return done;
  };

  for (std::size_t n = 1; n <= config.max_hypothesis_size && !found; ++n) {
    spec.max_clauses = n;
    if (prove_from(0, {})) break;
    if (budget.expired()) {
      if (expired) *expired = true;
      return std::nullopt;
    }
  }
  return found;
}

EvalReport evaluate(const Program& h, const Program& background, const std::vector<Literal>& pos,
                    const std::vector<Literal>& neg, const ProofBudget& budget, const BuiltinSet& builtins) {
  EvalReport r;
  ClauseDatabase h_db(h), bk_db(background);
  Prover prover({DatabaseView{&h_db}, DatabaseView{&bk_db}}, builtins, SolveOptions{false, LoopCheck::Tabled});
  for (const Literal& e : pos) {
    if (!h.empty() && entails_with(prover, e, budget, r.truncated)) {
      ++r.true_pos;
    } else {
      ++r.false_neg;
    }
  }
  for (const Literal& e : neg) {
    if (!h.empty() && entails_with(prover, e, budget, r.truncated)) {
      ++r.false_pos;
    } else {
      ++r.true_neg;
    }
  }
  std::size_t total = pos.size() + neg.size();
  r.accuracy = total ? static_cast<double>(r.true_pos + r.true_neg) / static_cast<double>(total) : 0.0;
  return r;
}

EvalReport evaluate(const Hypothesis& h, const MILProblem& problem, const std::vector<Literal>& pos,
                    const std::vector<Literal>& neg, const ProofBudget& budget) {
  return evaluate(h.program(), problem.full_background(), pos, neg, budget, problem.builtins);
}

}  // namespace topmil
