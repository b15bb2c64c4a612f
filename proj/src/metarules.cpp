#include "topmil/metarules.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <unordered_set>

namespace topmil {
namespace {

bool contains(const std::vector<Symbol>& v, Symbol s) { return std::find(v.begin(), v.end(), s) != v.end(); }

void pattern_variables(const Term& t, std::vector<Symbol>& out) {
  if (t.is_var()) {
    if (!contains(out, t.name())) out.push_back(t.name());
    return;
  }
  for (const Term& a : t.args()) pattern_variables(a, out);
}

bool has_constant(const Term& t) {
  if (t.is_constant()) return true;
  for (const Term& a : t.args()) {
    if (has_constant(a)) return true;
  }
  return false;
}

Literal pattern(const char* p, std::initializer_list<const char*> args) {
  std::vector<Term> ts;
  for (const char* a : args) ts.push_back(Term::var(a));
  return Literal(p, std::move(ts));
}

Metarule make(const char* name, std::vector<const char*> so, std::vector<const char*> fo, Literal head,
              std::vector<Literal> body) {
  Metarule m;
  m.name = Symbol(name);
  for (const char* s : so) m.second_order.emplace_back(s);
  for (const char* s : fo) m.first_order.emplace_back(s);
  m.head = std::move(head);
  m.body = std::move(body);
  std::vector<Symbol> vars;
  for (const Term& t : m.head.args) pattern_variables(t, vars);
  for (const Literal& l : m.body) {
    for (const Term& t : l.args) pattern_variables(t, vars);
  }
  for (Symbol v : vars) {
    if (!contains(m.first_order, v)) m.universal.push_back(v);
  }
  return m;
}

std::string second_order_name(std::size_t i) {
  static const char* base[] = {"P", "Q", "R", "S", "T", "U", "V", "W"};
  std::string s = base[i % 8];
  if (i >= 8) s += std::to_string(i / 8);
  return s;
}

std::string existential_name(std::size_t i) {
  static const char* base[] = {"X", "Y", "Z"};
  std::string s = base[i % 3];
  if (i >= 3) s += std::to_string(i / 3);
  return s;
}

std::string universal_name(std::size_t i) {
  static const char* base[] = {"x", "y", "z", "u", "v", "w"};
  std::string s = base[i % 6];
  if (i >= 6) s += std::to_string(i / 6);
  return s;
}

}  // namespace

std::vector<VarId> Metarule::existentials() const {
  std::vector<VarId> out;
  for (Symbol s : second_order) out.push_back({s, 0});
  for (Symbol s : first_order) out.push_back({s, 0});
  return out;
}

std::optional<std::size_t> Metarule::arity_of(Symbol var) const {
  if (head.predicate == var) return head.args.size();
  for (const Literal& l : body) {
    if (l.predicate == var) return l.args.size();
  }
  return std::nullopt;
}

void validate(const Metarule& m) {
  auto fail = [&](const std::string& why) { throw MetaruleError("metarule " + m.name.str() + ": " + why); };
  if (m.name.empty()) fail("missing name");
  std::map<Symbol, std::size_t> arity;
  std::vector<Symbol> used;
  auto check_literal = [&](const Literal& l) {
    if (!contains(m.second_order, l.predicate)) fail(l.predicate.str() + " in predicate position is not second-order");
    auto [it, fresh] = arity.emplace(l.predicate, l.args.size());
    if (!fresh && it->second != l.args.size()) fail(l.predicate.str() + " used with two arities");
    for (const Term& t : l.args) {
      if (has_constant(t)) fail("constant argument in " + to_string(l));
      pattern_variables(t, used);
    }
  };
  check_literal(m.head);
  for (const Literal& l : m.body) check_literal(l);
  for (Symbol s : m.first_order) {
    if (contains(m.universal, s)) fail(s.str() + " is both existential and universal");
    if (contains(m.second_order, s)) fail(s.str() + " is both first- and second-order");
  }
  for (Symbol s : used) {
    if (contains(m.second_order, s)) fail(s.str() + " used as an argument and as a predicate");
    if (!contains(m.first_order, s) && !contains(m.universal, s)) fail(s.str() + " is not quantified");
  }
  for (Symbol s : m.second_order) {
    if (!arity.count(s)) fail(s.str() + " never used");
  }
}

std::string metarule_key(const Metarule& m) {
  std::map<Symbol, std::string> so;
  Substitution::Map fo;
  std::size_t ne = 0, nu = 0;
  auto literal = [&](const Literal& l) {
    auto it = so.find(l.predicate);
    if (it == so.end()) it = so.emplace(l.predicate, "S" + std::to_string(so.size())).first;
    std::vector<VarId> vars;
    for (const Term& t : l.args) term_variables(t, vars);
    for (const VarId& v : vars) {
      if (fo.count(v)) continue;
      bool existential = contains(m.first_order, v.name);
      fo.emplace(v, Term::var(existential ? "E" + std::to_string(ne++) : "U" + std::to_string(nu++)));
    }
    Substitution s(fo);
    return it->second + to_string(s.apply(Literal(Symbol("_"), l.args))).substr(1);
  };
  std::string key = literal(m.head);
  for (const Literal& l : m.body) key += "," + literal(l);
  return key;
}

bool same_metarule(const Metarule& a, const Metarule& b) { return metarule_key(a) == metarule_key(b); }

const std::vector<Metarule>& catalog() {
  static const std::vector<Metarule> all = [] {
    std::vector<Metarule> v;
    v.push_back(make("abduced", {"P"}, {"X", "Y"}, pattern("P", {"X", "Y"}), {}));
    v.push_back(make("identity", {"P", "Q"}, {}, pattern("P", {"x", "y"}), {pattern("Q", {"x", "y"})}));
    v.push_back(make("inverse", {"P", "Q"}, {}, pattern("P", {"x", "y"}), {pattern("Q", {"y", "x"})}));
    v.push_back(make("chain", {"P", "Q", "R"}, {}, pattern("P", {"x", "y"}),
                     {pattern("Q", {"x", "z"}), pattern("R", {"z", "y"})}));
    v.push_back(make("stack", {"P", "Q", "R"}, {}, pattern("P", {"x", "y"}),
                     {pattern("Q", {"x", "z"}), pattern("R", {"y", "z"})}));
    v.push_back(make("queue", {"P", "Q", "R"}, {}, pattern("P", {"x", "y"}),
                     {pattern("Q", {"z", "x"}), pattern("R", {"z", "y"})}));
    v.push_back(make("tailrec", {"P", "Q"}, {}, pattern("P", {"x", "y"}),
                     {pattern("Q", {"x", "z"}), pattern("P", {"z", "y"})}));
    v.push_back(make("precon", {"P", "Q", "R"}, {}, pattern("P", {"x", "y"}),
                     {pattern("Q", {"x"}), pattern("R", {"x", "y"})}));
    v.push_back(make("postcon", {"P", "Q", "R"}, {}, pattern("P", {"x", "y"}),
                     {pattern("Q", {"x", "y"}), pattern("R", {"y"})}));
    v.push_back(make("tri_chain_1", {"P", "Q", "R"}, {"M"}, pattern("P", {"x", "y"}),
                     {pattern("Q", {"M", "x", "z"}), pattern("R", {"z", "y"})}));
    v.push_back(make("tri_chain_2", {"P", "Q", "R"}, {"M"}, pattern("P", {"x", "y"}),
                     {pattern("Q", {"x", "z"}), pattern("R", {"M", "z", "y"})}));
    v.push_back(make("tri_chain_3", {"P", "Q", "R"}, {"M1", "M2"}, pattern("P", {"x", "y"}),
                     {pattern("Q", {"M1", "x", "z"}), pattern("R", {"M2", "z", "y"})}));
    for (const Metarule& m : v) validate(m);
    return v;
  }();
  return all;
}

const Metarule* find_catalog(std::string_view name) {
  for (const Metarule& m : catalog()) {
    if (m.name.str() == name) return &m;
  }
  return nullptr;
}

std::strong_ordering operator<=>(const Metasubstitution& a, const Metasubstitution& b) {
  if (auto c = a.metarule <=> b.metarule; c != 0) return c;
  for (std::size_t i = 0; i < std::min(a.second_order.size(), b.second_order.size()); ++i) {
    if (auto c = a.second_order[i].second <=> b.second_order[i].second; c != 0) return c;
  }
  if (auto c = a.second_order.size() <=> b.second_order.size(); c != 0) return c;
  for (std::size_t i = 0; i < std::min(a.first_order.size(), b.first_order.size()); ++i) {
    if (auto c = a.first_order[i].second <=> b.first_order[i].second; c != 0) return c;
  }
  return a.first_order.size() <=> b.first_order.size();
}

std::string to_string(const Metasubstitution& mu) {
  std::string out = mu.metarule.str() + "{";
  bool first = true;
  for (const auto& [k, v] : mu.second_order) {
    out += (first ? "" : ", ") + k.str() + ":" + v.str();
    first = false;
  }
  for (const auto& [k, v] : mu.first_order) {
    out += (first ? "" : ", ") + k.str() + ":" + to_string(v);
    first = false;
  }
  return out + "}";
}

Clause apply_metasub(const Metasubstitution& mu, const Metarule& m) {
  if (mu.metarule != m.name) {
    throw MetaruleError("metasubstitution for " + mu.metarule.str() + " applied to " + m.name.str());
  }
  std::map<Symbol, Symbol> so;
  for (const auto& [k, v] : mu.second_order) so[k] = v;
  Substitution::Map fo;
  for (const auto& [k, v] : mu.first_order) fo[{k, 0}] = v;
  if (so.size() != m.second_order.size() || fo.size() != m.first_order.size()) {
    throw MetaruleError("binding domain mismatch for " + m.name.str());
  }
  for (Symbol s : m.second_order) {
    if (!so.count(s)) throw MetaruleError("unbound second-order variable " + s.str());
  }
  for (Symbol s : m.first_order) {
    if (!fo.count({s, 0})) throw MetaruleError("unbound first-order variable " + s.str());
  }
  Substitution sub(std::move(fo));
  auto inst = [&](const Literal& l) { return Literal(so.at(l.predicate), sub.apply(l).args); };
  Clause c(inst(m.head));
  for (const Literal& l : m.body) c.body.push_back(inst(l));
  return c;
}

Clause encapsulate_metarule(const Metarule& m, Symbol encapsulation) {
  auto enc = [&](const Literal& l) {
    std::vector<Term> args{Term::var(l.predicate)};
    args.insert(args.end(), l.args.begin(), l.args.end());
    return Literal(encapsulation, std::move(args));
  };
  Clause c(enc(m.head));
  for (const Literal& l : m.body) c.body.push_back(enc(l));
  return c;
}

Metarule lift_clause(const Clause& c, Symbol name) {
  Metarule m;
  m.name = name;
  std::map<VarId, Symbol> universals;
  std::function<Term(const Term&)> lift = [&](const Term& t) -> Term {
    switch (t.kind()) {
      case Term::Kind::Variable: {
        auto it = universals.find(t.var_id());
        if (it == universals.end()) {
          it = universals.emplace(t.var_id(), Symbol(universal_name(universals.size()))).first;
          m.universal.push_back(it->second);
        }
        return Term::var(it->second);
      }
      case Term::Kind::Constant: {
        Symbol s(existential_name(m.first_order.size()));
        m.first_order.push_back(s);
        return Term::var(s);
      }
      case Term::Kind::Compound: {
        std::vector<Term> args;
        for (const Term& a : t.args()) args.push_back(lift(a));
        return Term::compound(t.name(), std::move(args));
      }
    }
    return t;
  };
  auto lift_literal = [&](const Literal& l) {
    Symbol p(second_order_name(m.second_order.size()));
    m.second_order.push_back(p);
    std::vector<Term> args;
    for (const Term& t : l.args) args.push_back(lift(t));
    return Literal(p, std::move(args));
  };
  m.head = lift_literal(c.head);
  for (const Literal& l : c.body) m.body.push_back(lift_literal(l));
  return m;
}

std::vector<Metarule> extract_metarules(const Program& program) {
  std::vector<Metarule> out;
  std::set<std::string> seen;
  std::size_t fresh = 0;
  for (const Clause& c : program) {
    Metarule m = lift_clause(c, Symbol("lifted"));
    std::string key = metarule_key(m);
    if (!seen.insert(key).second) continue;
    m.name = Symbol("lifted_" + std::to_string(++fresh));
    for (const Metarule& known : catalog()) {
      if (metarule_key(known) == key) {
        m.name = known.name;
        break;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::uint64_t language_count(const std::vector<PredicateKey>& predicates, std::size_t constants,
                             const std::vector<Metarule>& metarules) {
  std::uint64_t total = 0;
  for (const Metarule& m : metarules) {
    std::uint64_t n = 1;
    for (Symbol s : m.second_order) {
      std::size_t a = m.arity_of(s).value_or(0);
      n *= std::count_if(predicates.begin(), predicates.end(), [&](const PredicateKey& k) { return k.arity == a; });
    }
    for (std::size_t i = 0; i < m.first_order.size(); ++i) n *= constants;
    total += n;
  }
  return total;
}

Program enumerate_language(const std::vector<PredicateKey>& predicates, const std::vector<Symbol>& constants,
                           const std::vector<Metarule>& metarules, std::size_t guard) {
  if (language_count(predicates, constants.size(), metarules) > guard) {
    throw MetaruleError("language enumeration exceeds guard of " + std::to_string(guard) + " clauses");
  }
  Program out;
  std::unordered_set<std::string> seen;
  for (const Metarule& m : metarules) {
    std::vector<std::vector<Symbol>> choices;
    for (Symbol s : m.second_order) {
      std::size_t a = m.arity_of(s).value_or(0);
      std::vector<Symbol> c;
      for (const PredicateKey& k : predicates) {
        if (k.arity == a) c.push_back(k.name);
      }
      choices.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < m.first_order.size(); ++i) choices.push_back(constants);
    if (std::any_of(choices.begin(), choices.end(), [](const auto& c) { return c.empty(); })) continue;
    std::vector<std::size_t> odo(choices.size(), 0);
    while (true) {
      Metasubstitution mu;
      mu.metarule = m.name;
      for (std::size_t i = 0; i < m.second_order.size(); ++i) mu.second_order.push_back({m.second_order[i], choices[i][odo[i]]});
      for (std::size_t i = 0; i < m.first_order.size(); ++i) {
        std::size_t j = m.second_order.size() + i;
        mu.first_order.push_back({m.first_order[i], Term::constant(choices[j][odo[j]])});
      }
      Clause c = apply_metasub(mu, m);
      if (seen.insert(variant_key(c)).second) out.push_back(std::move(c));
      std::size_t i = odo.size();
      while (i > 0 && ++odo[i - 1] == choices[i - 1].size()) odo[--i] = 0;
      if (i == 0) break;
    }
  }
  return out;
}

BoundsReport bounds(std::uint64_t m, std::uint64_t p, std::uint64_t k, std::uint64_t c, std::uint64_t n) {
  using boost::multiprecision::pow;
  BoundsReport r;
  r.m = m;
  r.p = p;
  r.k = k;
  r.c = c;
  r.n = n;
  unsigned e = static_cast<unsigned>(k + 1);
  r.max_language_lemma = r.m * pow(r.p, e);
  r.max_language_table = pow(BigInt(r.m * r.p), e);
  r.max_hypothesis_space = pow(r.max_language_table, static_cast<unsigned>(n));
  r.construction_cost = r.c * r.max_language_lemma;
  r.search_cost = pow(r.construction_cost, static_cast<unsigned>(n));
  return r;
}

double log10_big(const BigInt& value) {
  if (value <= 0) return -HUGE_VAL;
  std::string s = value.str();
  std::string lead = s.substr(0, std::min<std::size_t>(s.size(), 17));
  return std::log10(std::stod(lead)) + static_cast<double>(s.size() - lead.size());
}

std::string scientific(const BigInt& value, int digits) {
  if (value == 0) return "0";
  std::string s = value.str();
  bool negative = s[0] == '-';
  if (negative) s.erase(0, 1);
  long exponent = static_cast<long>(s.size()) - 1;
  std::string d = s.substr(0, std::min<std::size_t>(s.size(), digits));
  d.resize(digits, '0');
  if (static_cast<int>(s.size()) > digits && s[digits] >= '5') {
    int i = digits - 1;
    while (i >= 0 && d[i] == '9') d[i--] = '0';
    if (i < 0) {
      d.insert(d.begin(), '1');
      d.pop_back();
      ++exponent;
    } else {
      ++d[i];
    }
  }
  std::string out = negative ? "-" : "";
  out += d.substr(0, 1);
  if (digits > 1) out += "." + d.substr(1);
  out += "e+" + std::to_string(exponent);
  return out;
}

}  // namespace topmil
