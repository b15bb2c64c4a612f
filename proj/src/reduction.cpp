#include "topmil/reduction.hpp"

#include <map>

namespace topmil {
namespace {

Term skolemize(const Term& t, std::map<VarId, Term>& names) {
  if (t.is_var()) {
    auto it = names.find(t.var_id());
    if (it == names.end()) {
      it = names.emplace(t.var_id(), Term::constant("$sk" + std::to_string(names.size()))).first;
    }
    return it->second;
  }
  if (!t.is_compound() || t.ground()) return t;
  std::vector<Term> args;
  for (const Term& a : t.args()) args.push_back(skolemize(a, names));
  return Term::compound(t.name(), std::move(args));
}

Literal skolemize(const Literal& l, std::map<VarId, Term>& names) {
  std::vector<Term> args;
  for (const Term& a : l.args) args.push_back(skolemize(a, names));
  return Literal(l.predicate, std::move(args));
}

// Proves the skolemized head of c with its skolemized body asserted.
bool derivable(const Clause& c, std::vector<DatabaseView> views, const ProofBudget& budget,
               const BuiltinSet& builtins) {
  std::map<VarId, Term> names;
  Literal head = skolemize(c.head, names);
  Program body;
  for (const Literal& l : c.body) body.push_back(Clause(skolemize(l, names)));
  ClauseDatabase asserted(body);
  views.insert(views.begin(), DatabaseView{&asserted});
  Prover prover(std::move(views), builtins, SolveOptions{false, LoopCheck::Tabled});
  return prover.prove({head}, budget).answers > 0;
}

}  // namespace

bool generalises(const Program& phi, const Program& psi, const Program& th, const ProofBudget& budget,
                 const BuiltinSet& builtins) {
  ClauseDatabase phi_db(phi), th_db(th);
  for (const Clause& c : psi) {
    if (!derivable(c, {DatabaseView{&phi_db}, DatabaseView{&th_db}}, budget, builtins)) return false;
  }
  return true;
}

Program plotkin_reduce(const Program& h, const Program& th, const ProofBudget& budget, const ReduceOptions& options,
                       std::vector<char>* kept) {
  ClauseDatabase h_db(h), th_db(th);
  std::vector<char> enabled(h.size(), 1);
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!options.candidates.empty() && !options.candidates[i]) continue;
    enabled[i] = 0;
    if (!derivable(h[i], {DatabaseView{&h_db, &enabled}, DatabaseView{&th_db}}, budget, options.builtins)) {
      enabled[i] = 1;
    }
  }
  Program out;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (enabled[i]) out.push_back(h[i]);
  }
  if (kept) *kept = std::move(enabled);
  return out;
}

}  // namespace topmil
