#include "topmil/top_construction.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace topmil {
namespace {

// Encapsulated background and positive examples, shared by both phases.
struct Context {
  Encapsulation enc;
  std::vector<PredicateKey> targets;
  ClauseDatabase background;
  ClauseDatabase positives;

  explicit Context(const MILProblem& p) : enc(p.encapsulation()), targets(p.target_predicates()) {
    Program bk;
    for (const Clause& c : p.background) {
      if (std::find(targets.begin(), targets.end(), c.head.key()) == targets.end()) bk.push_back(enc.encapsulate(c));
    }
    bk.insert(bk.end(), p.support.begin(), p.support.end());
    background = ClauseDatabase(bk);
    positives = ClauseDatabase(enc.encapsulate(Program(p.positive.begin(), p.positive.end())));
  }
};

// Metasubstitutions from one example and one metarule.
void generalise_example(const Literal& example, const Metarule& m, std::size_t metarule_index, const Context& ctx,
                        const Prover& prover, const ProofBudget& budget, TopStats& stats,
                        std::vector<std::pair<std::size_t, Metasubstitution>>& out) {
  Clause em = encapsulate_metarule(m, ctx.enc.predicate);
  Literal goal_head = ctx.enc.encapsulate(example);
  auto head = unify(em.head, goal_head);
  if (!head) return;
  std::vector<Literal> goal;
  for (const Literal& l : em.body) goal.push_back(head->apply(l));

  std::vector<Symbol> example_constants;
  collect_constants(example, example_constants);

  std::set<std::string> seen;
  auto record = [&](const Substitution& answer) {
    auto value = [&](Symbol s) { return answer.apply(head->apply(Term::var(s))); };
    Metasubstitution mu;
    mu.metarule = m.name;
    for (Symbol s : m.second_order) {
      Term v = value(s);
      if (!v.is_constant()) return;
      mu.second_order.push_back({s, v.name()});
    }
    std::vector<std::size_t> open;
    for (Symbol s : m.first_order) {
      Term v = value(s);
      if (!v.ground()) {
        if (!v.is_var()) return;
        open.push_back(mu.first_order.size());
      }
      mu.first_order.push_back({s, v});
    }
    if (open.empty()) {
      if (seen.insert(to_string(mu)).second) out.push_back({metarule_index, mu});
      return;
    }
    // Existential constants the proof left open range over the example's own.
    if (example_constants.empty()) return;
    std::vector<std::size_t> odo(open.size(), 0);
    while (true) {
      Metasubstitution filled = mu;
      for (std::size_t i = 0; i < open.size(); ++i) {
        filled.first_order[open[i]].second = Term::constant(example_constants[odo[i]]);
      }
      if (seen.insert(to_string(filled)).second) out.push_back({metarule_index, filled});
      std::size_t i = odo.size();
      while (i > 0 && ++odo[i - 1] == example_constants.size()) odo[--i] = 0;
      if (i == 0) break;
    }
  };

  if (goal.empty()) {
    record(Substitution{});
    return;
  }
  SolveReport r = prover.solve(goal, budget, [&](const Substitution& s) {
    record(s);
    return true;
  });
  if (r.truncated()) stats.truncated = true;
  if (r.deadline_expired) stats.deadline_expired = true;
}

std::vector<Metasubstitution> canonical(std::vector<std::pair<std::size_t, Metasubstitution>> found,
                                        const std::vector<Metarule>& metarules) {
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  std::vector<Metasubstitution> out;
  std::unordered_set<std::string> clauses;
  for (auto& [index, mu] : found) {
    if (!out.empty() && out.back() == mu) continue;
    if (!clauses.insert(variant_key(apply_metasub(mu, metarules[index]))).second) continue;
    out.push_back(std::move(mu));
  }
  return out;
}

}  // namespace

const Metarule& metarule_for(const Metasubstitution& mu, const std::vector<Metarule>& metarules) {
  for (const Metarule& m : metarules) {
    if (m.name == mu.metarule) return m;
  }
  throw MetaruleError("no metarule named " + mu.metarule.str());
}

Clause apply_metasub(const Metasubstitution& mu, const std::vector<Metarule>& metarules) {
  return apply_metasub(mu, metarule_for(mu, metarules));
}

std::vector<Metasubstitution> generalise(const MILProblem& problem, const ProofBudget& budget, TopStats* stats) {
  TopStats local;
  TopStats& st = stats ? *stats : local;
  Context ctx(problem);
  Prover prover({DatabaseView{&ctx.background}, DatabaseView{&ctx.positives}}, problem.builtins,
                SolveOptions{false, LoopCheck::Tabled});
  std::vector<std::pair<std::size_t, Metasubstitution>> found;
  for (const Literal& e : problem.positive) {
    for (std::size_t i = 0; i < problem.metarules.size(); ++i) {
      const Metarule& m = problem.metarules[i];
      if (m.head.args.size() != e.args.size()) continue;
      generalise_example(e, m, i, ctx, prover, budget, st, found);
      if (budget.expired()) {
        st.deadline_expired = true;
        return {};
      }
    }
  }
  return canonical(std::move(found), problem.metarules);
}

std::vector<Metasubstitution> generalise(const std::vector<Literal>& e_pos, const Program& b,
                                         const std::vector<Metarule>& metarules, const ProofBudget& budget) {
  MILProblem p;
  p.positive = e_pos;
  p.background = b;
  p.metarules = metarules;
  return generalise(p, budget);
}

std::vector<Metasubstitution> specialise(const std::vector<Metasubstitution>& top_plus, const MILProblem& problem,
                                         const ProofBudget& budget, TopStats* stats) {
  TopStats local;
  TopStats& st = stats ? *stats : local;
  if (problem.negative.empty()) return top_plus;
  Context ctx(problem);
  std::vector<Literal> negatives = ctx.enc.encapsulate(problem.negative);
  std::vector<Metasubstitution> out;
  for (const Metasubstitution& mu : top_plus) {
    ClauseDatabase single(Program{ctx.enc.encapsulate(apply_metasub(mu, problem.metarules))});
    Prover prover({DatabaseView{&single}, DatabaseView{&ctx.background}, DatabaseView{&ctx.positives}},
                  problem.builtins, SolveOptions{false, LoopCheck::Tabled});
    bool covers_negative = false;
    for (const Literal& n : negatives) {
      SolveReport r = prover.prove({n}, budget);
      if (r.answers > 0) {
        covers_negative = true;
        break;
      }
      if (r.truncated()) st.truncated = true;
      if (r.deadline_expired || budget.expired()) {
        st.deadline_expired = true;
        return {};
      }
    }
    if (!covers_negative) out.push_back(mu);
  }
  return out;
}

std::vector<Metasubstitution> specialise(const std::vector<Metasubstitution>& top_plus,
                                         const std::vector<Literal>& e_neg, const Program& b,
                                         const std::vector<Literal>& e_pos, const std::vector<Metarule>& metarules,
                                         const ProofBudget& budget) {
  MILProblem p;
  p.positive = e_pos;
  p.negative = e_neg;
  p.background = b;
  p.metarules = metarules;
  return specialise(top_plus, p, budget);
}

TopPartition construct_top(const MILProblem& problem, const ProofBudget& budget) {
  TopPartition out;
  TopStats st;
  out.generalised = generalise(problem, budget, &st);
  if (!st.deadline_expired) out.top = specialise(out.generalised, problem, budget, &st);
  if (st.deadline_expired) {
    out.top.clear();
  } else {
    std::set<Metasubstitution> kept(out.top.begin(), out.top.end());
    for (const Metasubstitution& mu : out.generalised) {
      if (!kept.count(mu)) out.removed.push_back(mu);
    }
  }
  out.truncated = st.truncated;
  out.deadline_expired = st.deadline_expired;
  return out;
}

}  // namespace topmil
