#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topmil/symbol.hpp"

namespace topmil {

struct VarId {
  Symbol name;
  std::uint32_t index = 0;

  friend bool operator==(const VarId&, const VarId&) = default;
  friend std::strong_ordering operator<=>(const VarId& a, const VarId& b) {
    if (auto c = a.name <=> b.name; c != 0) return c;
    return a.index <=> b.index;
  }
};

class Term {
 public:
  enum class Kind : std::uint8_t { Variable, Constant, Compound };

  Term() = default;

  static Term var(Symbol name, std::uint32_t index = 0);
  static Term var(std::string_view name, std::uint32_t index = 0) { return var(Symbol(name), index); }
  static Term constant(Symbol name);
  static Term constant(std::string_view name) { return constant(Symbol(name)); }
  static Term integer(long long value);
  static Term compound(Symbol functor, std::vector<Term> args);
  static Term compound(std::string_view functor, std::vector<Term> args) {
    return compound(Symbol(functor), std::move(args));
  }

  Kind kind() const { return kind_; }
  bool is_var() const { return kind_ == Kind::Variable; }
  bool is_constant() const { return kind_ == Kind::Constant; }
  bool is_compound() const { return kind_ == Kind::Compound; }

  // Variable name, constant name or functor.
  Symbol name() const { return name_; }
  std::uint32_t index() const { return index_; }
  VarId var_id() const { return {name_, index_}; }
  const std::vector<Term>& args() const;
  std::size_t arity() const { return args_ ? args_->size() : 0; }
  bool ground() const { return ground_; }
  bool integer_value(long long& out) const { return is_constant() && symbol_integer(name_, out); }
  std::size_t hash() const { return hash_; }

  friend bool operator==(const Term& a, const Term& b);
  // Standard order: variables, then constants, then compounds (arity, functor, args).
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  Kind kind_ = Kind::Constant;
  bool ground_ = true;
  std::uint32_t index_ = 0;
  Symbol name_;
  std::shared_ptr<const std::vector<Term>> args_;
  std::size_t hash_ = 0;
};

struct PredicateKey {
  Symbol name;
  std::uint32_t arity = 0;

  friend bool operator==(const PredicateKey&, const PredicateKey&) = default;
  friend std::strong_ordering operator<=>(const PredicateKey& a, const PredicateKey& b) {
    if (auto c = a.name <=> b.name; c != 0) return c;
    return a.arity <=> b.arity;
  }
};

struct Literal {
  Symbol predicate;
  std::vector<Term> args;

  Literal() = default;
  Literal(Symbol p, std::vector<Term> a) : predicate(p), args(std::move(a)) {}
  Literal(std::string_view p, std::vector<Term> a) : predicate(p), args(std::move(a)) {}

  std::size_t arity() const { return args.size(); }
  PredicateKey key() const { return {predicate, static_cast<std::uint32_t>(args.size())}; }
  bool ground() const;

  friend bool operator==(const Literal&, const Literal&) = default;
  friend std::strong_ordering operator<=>(const Literal& a, const Literal& b);
};

struct Clause {
  Literal head;
  std::vector<Literal> body;

  Clause() = default;
  explicit Clause(Literal h, std::vector<Literal> b = {}) : head(std::move(h)), body(std::move(b)) {}

  bool is_fact() const { return body.empty(); }
  bool ground() const;

  friend bool operator==(const Clause&, const Clause&) = default;
};

using Program = std::vector<Clause>;

// Prolog-style text. Lists print as [a,b|T], '/' prints infix,
// atoms that need it are quoted. Variables print with a capital initial.
std::string to_string(const Term& t);
std::string to_string(const Literal& l);
std::string to_string(const Clause& c);
std::string quote_atom_if_needed(const std::string& text);

Term make_list(const std::vector<Term>& items, std::optional<Term> tail = std::nullopt);
Symbol nil_symbol();
Symbol cons_symbol();

// Distinct variables of a clause in first-occurrence order (head first).
std::vector<VarId> clause_variables(const Clause& c);
void term_variables(const Term& t, std::vector<VarId>& out);

Clause rename_apart(const Clause& c, std::uint32_t fresh_base);

// Rewrites variables to X, Y, Z, X1, Y1, Z1, ... in first-occurrence order.
Clause display_rename(const Clause& c);

// Text that is identical for two clauses iff they are variants.
std::string variant_key(const Clause& c);
bool is_variant(const Clause& a, const Clause& b);

// Constants occurring anywhere in the item, in first-occurrence order.
void collect_constants(const Term& t, std::vector<Symbol>& out);
void collect_constants(const Literal& l, std::vector<Symbol>& out);

std::size_t term_depth(const Term& t);

// Orders variables by interned id; cheaper than the textual order and only
// used where the order itself is irrelevant.
struct VarIdLess {
  bool operator()(const VarId& a, const VarId& b) const {
    return a.name.id() != b.name.id() ? a.name.id() < b.name.id() : a.index < b.index;
  }
};

class Substitution {
 public:
  using Map = std::map<VarId, Term, VarIdLess>;

  Substitution() = default;
  explicit Substitution(Map bindings) : bindings_(std::move(bindings)) {}

  const Map& bindings() const { return bindings_; }
  std::size_t size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }
  const Term* find(const VarId& v) const;
  // Adds a binding; callers keep the map idempotent.
  void set(const VarId& v, Term t) { bindings_[v] = std::move(t); }

  Term apply(const Term& t) const;
  Literal apply(const Literal& l) const;
  Clause apply(const Clause& c) const;

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  Map bindings_;
};

// Most general unifier, or nullopt. A cyclic binding has no finite idempotent
// form, so such pairs fail with or without the occurs check; the flag only
// documents intent at call sites.
std::optional<Substitution> unify(const Term& a, const Term& b, bool occurs_check = false);
std::optional<Substitution> unify(const Literal& a, const Literal& b, bool occurs_check = false);

}  // namespace topmil

template <>
struct std::hash<topmil::Term> {
  std::size_t operator()(const topmil::Term& t) const noexcept { return t.hash(); }
};
template <>
struct std::hash<topmil::PredicateKey> {
  std::size_t operator()(const topmil::PredicateKey& k) const noexcept {
    return std::hash<topmil::Symbol>()(k.name) * 31 + k.arity;
  }
};
