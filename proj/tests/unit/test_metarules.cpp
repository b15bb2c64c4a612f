#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "topmil/datasets.hpp"
#include "topmil/metarules.hpp"
#include "topmil/top_construction.hpp"

using namespace topmil;
using namespace topmil::testing;

namespace {

Metasubstitution mu_of(const char* metarule, std::vector<std::pair<const char*, const char*>> so,
                       std::vector<std::pair<const char*, Term>> fo = {}) {
  Metasubstitution mu;
  mu.metarule = Symbol(metarule);
  for (auto& [k, v] : so) mu.second_order.push_back({Symbol(k), Symbol(v)});
  for (auto& [k, v] : fo) mu.first_order.push_back({Symbol(k), v});
  return mu;
}

}  // namespace

TEST_CASE("catalog shapes") {
  const Metarule* chain = find_catalog("chain");
  REQUIRE(chain);
  CHECK(same_metarule(*chain, parse_metarule("metarule c: (P(x,y) :- Q(x,z), R(z,y)) exists [P,Q,R].")));
  const Metarule* abduced = find_catalog("abduced");
  REQUIRE(abduced);
  CHECK(abduced->body.empty());
  CHECK(abduced->first_order.size() == 2);
  const Metarule* tri = find_catalog("tri_chain_1");
  REQUIRE(tri);
  CHECK(same_metarule(*tri, parse_metarule("metarule t: (P(x,y) :- Q(M,x,z), R(z,y)) exists [P,Q,R,M].")));
  CHECK(find_catalog("no_such_metarule") == nullptr);
  CHECK(catalog().size() == 12);
}

TEST_CASE("apply a metasubstitution") {
  CHECK(is_variant(apply_metasub(mu_of("identity", {{"P", "path"}, {"Q", "edge_alpha"}}), *find_catalog("identity")),
                   C("path(X,Y) :- edge_alpha(X,Y)")));
  Metarule postcon = parse_metarule("metarule pu: (P(x) :- Q(x,y), R(y)) exists [P,Q,R].");
  CHECK(is_variant(apply_metasub(mu_of("pu", {{"P", "even"}, {"Q", "predecessor"}, {"R", "odd"}}), postcon),
                   C("even(X) :- predecessor(X,Y), odd(Y)")));
  CHECK(apply_metasub(mu_of("abduced", {{"P", "p"}}, {{"X", Term::constant("a")}, {"Y", Term::constant("b")}}),
                      *find_catalog("abduced")) == C("p(a,b)"));
  CHECK_THROWS_AS(apply_metasub(mu_of("identity", {{"P", "path"}}), *find_catalog("identity")), MetaruleError);
  CHECK_THROWS_AS(apply_metasub(mu_of("chain", {{"P", "a"}, {"Q", "b"}, {"R", "c"}}), *find_catalog("identity")),
                  MetaruleError);
}

TEST_CASE("encapsulate metarules") {
  CHECK(is_variant(encapsulate_metarule(*find_catalog("chain")), C("m(P,X,Y) :- m(Q,X,Z), m(R,Z,Y)")));
  CHECK(is_variant(encapsulate_metarule(*find_catalog("identity")), C("m(P,X,Y) :- m(Q,X,Y)")));
  Clause abduced = encapsulate_metarule(*find_catalog("abduced"));
  CHECK(abduced.body.empty());
  CHECK(is_variant(abduced, C("m(P,X,Y)")));
}

TEST_CASE("extract metarules from programs") {
  auto names_match = [](const std::vector<Metarule>& got, std::vector<const char*> want) {
    if (got.size() != want.size()) return false;
    for (const char* w : want) {
      bool found = false;
      for (const Metarule& m : got) found = found || same_metarule(m, *find_catalog(w));
      if (!found) return false;
    }
    return true;
  };
  CHECK(names_match(extract_metarules(coloured_graph_target()), {"identity", "inverse", "stack", "queue"}));
  CHECK(names_match(extract_metarules(P("path(X,Y) :- edge(X,Z), edge(Z,Y).")), {"chain"}));
  CHECK(names_match(extract_metarules(P("edge(a,b).")), {"abduced"}));
  // Shapes outside the catalog get fresh names; variants merge.
  std::vector<Metarule> lifted =
      extract_metarules(P("p(X) :- q(X,Y), r(Y,X). s(A) :- t(A,B), u(B,A). p(X,Y) :- q(X,Y)."));
  REQUIRE(lifted.size() == 2);
  CHECK(lifted[0].name == Symbol("lifted_1"));
  CHECK(lifted[1].name == Symbol("identity"));
}

TEST_CASE("enumerate the hypothesis language") {
  std::vector<PredicateKey> path_only{{Symbol("path"), 2}};
  Program one = enumerate_language(path_only, {}, {*find_catalog("identity")});
  REQUIRE(one.size() == 1);
  CHECK(is_variant(one[0], C("path(X,Y) :- path(X,Y)")));

  std::vector<PredicateKey> preds{{Symbol("path"), 2}, {Symbol("edge_alpha"), 2}, {Symbol("edge_alnum"), 2}};
  std::vector<Metarule> ms{*find_catalog("identity"), *find_catalog("chain")};
  Program all = enumerate_language(preds, {}, ms);
  CHECK(all.size() == 36);
  CHECK(language_count(preds, 0, ms) == 36);
  Program path_headed;
  for (const Clause& cl : all) {
    if (cl.head.predicate == Symbol("path")) path_headed.push_back(cl);
  }
  CHECK(path_headed.size() == 12);
  // The generalised clauses of the path problem are a subset.
  MILProblem prob = load_problem(data_path("path.milp"));
  std::multiset<std::string> lang = variants(path_headed);
  for (const Metasubstitution& mu : generalise(prob, ProofBudget{})) {
    CHECK(lang.count(variant_key(apply_metasub(mu, prob.metarules))) == 1);
  }
}

TEST_CASE("enumerate with first-order existentials") {
  std::vector<PredicateKey> preds{{Symbol("p"), 2}, {Symbol("q"), 3}};
  std::vector<Symbol> consts{Symbol("a"), Symbol("b")};
  std::vector<Metarule> ms{*find_catalog("tri_chain_1"), *find_catalog("abduced")};
  // tri_chain_1: P,R binary, Q ternary, M a constant; abduced: binary P and two constants.
  std::uint64_t expected = 1 * 1 * 1 * 2 + 1 * 2 * 2;
  CHECK(language_count(preds, consts.size(), ms) == expected);
  CHECK(enumerate_language(preds, consts, ms).size() == expected);
  CHECK_THROWS_AS(enumerate_language(preds, consts, ms, 3), MetaruleError);
}

TEST_CASE("bounds reproduce the table rows") {
  BoundsReport grammar = bounds(1, 60, 2, 1348, 36);
  CHECK(grammar.max_language_table == 216000);
  CHECK(scientific(grammar.max_hypothesis_space) == "1.097324e+192");
  CHECK(bounds(5, 19, 3, 625, 625).max_language_table == 81450625);
  BoundsReport graph = bounds(4, 1, 2, 108, 4);
  CHECK(graph.max_language_lemma == 4);
  CHECK(graph.max_language_table == 64);
  CHECK(std::abs(log10_big(graph.max_hypothesis_space) - 7.2247) < 0.01);
  CHECK(bounds(4, 9, 2, 108, 4).max_language_table == 46656);
  CHECK(std::abs(log10_big(bounds(4, 9, 2, 108, 4).max_hypothesis_space) - 18.676) < 0.01);
  CHECK(std::abs(log10_big(bounds(5, 19, 3, 625, 625).max_hypothesis_space) - 4944.3) < 0.1);
}

TEST_CASE("bounds arithmetic") {
  BoundsReport r = bounds(3, 7, 2, 11, 1);
  CHECK(r.max_language_lemma == 3 * 7 * 7 * 7);
  CHECK(r.max_language_table == 21 * 21 * 21);
  CHECK(r.max_hypothesis_space == r.max_language_table);
  CHECK(r.construction_cost == 11 * 3 * 343);
  CHECK(r.search_cost == r.construction_cost);
  CHECK(r.max_language_lemma <= r.max_language_table);
  // No overflow on huge inputs: 10^18 squared is exact.
  BoundsReport huge = bounds(1000000000000000000ull, 1, 1, 1, 1);
  CHECK(huge.max_language_table == BigInt("1000000000000000000000000000000000000"));
  CHECK(scientific(BigInt(123456789), 3) == "1.23e+8");
}

TEST_CASE("metarule validation") {
  Metarule m = *find_catalog("chain");
  m.second_order.pop_back();
  CHECK_THROWS_AS(validate(m), MetaruleError);
}
