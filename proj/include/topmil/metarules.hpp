#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "topmil/encapsulation.hpp"
#include "topmil/term.hpp"

namespace topmil {

// Second-order clause template. Literal patterns use the second-order
// variable's name as predicate symbol; arguments are Variables named by the
// first-order symbols (existential or universal).
struct Metarule {
  Symbol name;
  std::vector<Symbol> second_order;
  std::vector<Symbol> first_order;
  std::vector<Symbol> universal;
  Literal head;
  std::vector<Literal> body;

  std::vector<VarId> existentials() const;  // second-order then first-order
  // Arity of the literals a second-order variable stands for.
  std::optional<std::size_t> arity_of(Symbol second_order_var) const;
};

class MetaruleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checks the structural invariants; throws MetaruleError.
void validate(const Metarule& m);

// Text key equal for two metarules iff they are equal up to renaming of
// their variables (kinds are kept apart).
std::string metarule_key(const Metarule& m);
bool same_metarule(const Metarule& a, const Metarule& b);

// Abduced, identity, inverse, chain, stack, queue, tailrec, precon, postcon,
// tri_chain_1, tri_chain_2, tri_chain_3.
const std::vector<Metarule>& catalog();
const Metarule* find_catalog(std::string_view name);

struct Metasubstitution {
  Symbol metarule;
  std::vector<std::pair<Symbol, Symbol>> second_order;  // in metarule order
  std::vector<std::pair<Symbol, Term>> first_order;     // in metarule order

  friend bool operator==(const Metasubstitution&, const Metasubstitution&) = default;
  // Metarule name, then second-order bindings, then first-order bindings.
  friend std::strong_ordering operator<=>(const Metasubstitution& a, const Metasubstitution& b);
};

std::string to_string(const Metasubstitution& mu);

// Throws MetaruleError on a binding-domain mismatch.
Clause apply_metasub(const Metasubstitution& mu, const Metarule& m);

// m(P,x,y) :- m(Q,x,z), m(R,z,y) with P,Q,R as ordinary variables.
Clause encapsulate_metarule(const Metarule& m, Symbol encapsulation = default_encapsulation_symbol());

// Lifts each clause to a metarule; duplicates up to renaming are merged and
// the survivors named lifted_1, lifted_2, ...
std::vector<Metarule> extract_metarules(const Program& program);
Metarule lift_clause(const Clause& c, Symbol name);

// Every distinct clause obtained from a total metasubstitution, respecting
// literal arities. Throws MetaruleError when more than `guard` candidates.
Program enumerate_language(const std::vector<PredicateKey>& predicates, const std::vector<Symbol>& constants,
                           const std::vector<Metarule>& metarules, std::size_t guard = 1'000'000);

// Closed-form count of enumerate_language before deduplication.
std::uint64_t language_count(const std::vector<PredicateKey>& predicates, std::size_t constants,
                             const std::vector<Metarule>& metarules);

using BigInt = boost::multiprecision::cpp_int;

struct BoundsReport {
  BigInt m, p, k, c, n;
  BigInt max_language_lemma;    // m * p^(k+1)
  BigInt max_language_table;    // (m * p)^(k+1)
  BigInt max_hypothesis_space;  // max_language_table^n
  BigInt construction_cost;     // c * m * p^(k+1)
  BigInt search_cost;           // (c * m * p^(k+1))^n
};

BoundsReport bounds(std::uint64_t m, std::uint64_t p, std::uint64_t k, std::uint64_t c, std::uint64_t n);

double log10_big(const BigInt& value);
// Scientific notation with `digits` significant digits, e.g. 1.097324e+192.
std::string scientific(const BigInt& value, int digits = 7);

}  // namespace topmil
