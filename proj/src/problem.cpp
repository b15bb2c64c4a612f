#include "topmil/problem.hpp"

#include <algorithm>

namespace topmil {
namespace {

void add_key(std::vector<PredicateKey>& out, const PredicateKey& k) {
  if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
}

}  // namespace

std::vector<PredicateKey> MILProblem::target_predicates() const {
  std::vector<PredicateKey> out;
  for (const Literal& l : positive) add_key(out, l.key());
  for (const Literal& l : negative) add_key(out, l.key());
  return out;
}

std::vector<PredicateKey> MILProblem::background_predicates() const {
  std::vector<PredicateKey> targets = target_predicates();
  std::vector<PredicateKey> out;
  for (const Clause& c : background) {
    if (std::find(targets.begin(), targets.end(), c.head.key()) == targets.end()) add_key(out, c.head.key());
  }
  return out;
}

Encapsulation MILProblem::encapsulation() const {
  Encapsulation e;
  for (const PredicateKey& k : builtins.keys()) {
    e.plain.insert(k);
    if (k.name.str() == "apply") e.apply_is_call = true;
  }
  for (const Clause& c : support) e.plain.insert(c.head.key());
  return e;
}

Program MILProblem::full_background() const {
  Program out = background;
  out.insert(out.end(), support.begin(), support.end());
  return out;
}

}  // namespace topmil
