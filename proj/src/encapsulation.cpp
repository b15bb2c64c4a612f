#include "topmil/encapsulation.hpp"

namespace topmil {

Symbol default_encapsulation_symbol() {
  static const Symbol s("m");
  return s;
}

Literal Encapsulation::encapsulate(const Literal& l) const {
  static const Symbol apply("apply");
  if (apply_is_call && l.predicate == apply && !l.args.empty()) return Literal(predicate, l.args);
  if (plain.count(l.key())) return l;
  std::vector<Term> args;
  args.reserve(l.args.size() + 1);
  args.push_back(Term::constant(l.predicate));
  args.insert(args.end(), l.args.begin(), l.args.end());
  return Literal(predicate, std::move(args));
}

Clause Encapsulation::encapsulate(const Clause& c) const {
  Clause out(encapsulate(c.head));
  out.body.reserve(c.body.size());
  for (const Literal& l : c.body) out.body.push_back(encapsulate(l));
  return out;
}

Program Encapsulation::encapsulate(const Program& p) const {
  Program out;
  out.reserve(p.size());
  for (const Clause& c : p) out.push_back(encapsulate(c));
  return out;
}

std::vector<Literal> Encapsulation::encapsulate(const std::vector<Literal>& atoms) const {
  std::vector<Literal> out;
  out.reserve(atoms.size());
  for (const Literal& l : atoms) out.push_back(encapsulate(l));
  return out;
}

Literal Encapsulation::excapsulate(const Literal& l) const {
  if (!is_encapsulated(l)) return l;
  const Term& p = l.args[0];
  if (!p.is_constant()) {
    throw EncapsulationError("cannot excapsulate " + to_string(l) + ": predicate argument is not a constant");
  }
  return Literal(p.name(), std::vector<Term>(l.args.begin() + 1, l.args.end()));
}

Clause Encapsulation::excapsulate(const Clause& c) const {
  Clause out(excapsulate(c.head));
  out.body.reserve(c.body.size());
  for (const Literal& l : c.body) out.body.push_back(excapsulate(l));
  return out;
}

Program Encapsulation::excapsulate(const Program& p) const {
  Program out;
  out.reserve(p.size());
  for (const Clause& c : p) out.push_back(excapsulate(c));
  return out;
}

}  // namespace topmil
