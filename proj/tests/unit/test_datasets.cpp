#include "doctest.h"

#include "helpers.hpp"
#include "topmil/datasets.hpp"
#include "topmil/learners.hpp"

using namespace topmil;
using namespace topmil::testing;

namespace {

long long coord(const Term& t) {
  long long v = 0;
  REQUIRE(t.integer_value(v));
  return v;
}

}  // namespace

TEST_CASE("grid world sizes") {
  MILProblem g4 = gen_grid_world({4, 4});
  CHECK(g4.positive.size() == 625);
  CHECK(g4.negative.empty());
  CHECK(g4.metarules.size() == 5);
  CHECK(gen_grid_world({1, 1}).positive.size() == 16);
  CHECK(gen_grid_world({2, 3}).positive.size() == 144);
}

TEST_CASE("grid world coordinates stay in bounds") {
  MILProblem g = gen_grid_world({3, 2});
  for (const Literal& e : g.positive) {
    // move([X/Y,GX/GY,W/H], [GX/GY,GX/GY,W/H])
    const Term& start = e.args[0].args()[0];
    const Term& goal = e.args[0].args()[1].args()[0];
    for (const Term* cell : {&start, &goal}) {
      CHECK(coord(cell->args()[0]) >= 0);
      CHECK(coord(cell->args()[0]) <= 3);
      CHECK(coord(cell->args()[1]) >= 0);
      CHECK(coord(cell->args()[1]) <= 2);
    }
  }
}

TEST_CASE("coloured graph labels") {
  GraphSpec spec;
  MILProblem g = gen_coloured_graph(spec);
  CHECK(g.positive.size() + g.negative.size() == 182);
  // Regeneration under the same seed is identical.
  CHECK(serialize_problem(gen_coloured_graph(spec)) == serialize_problem(g));
  spec.seed = 2;
  CHECK(serialize_problem(gen_coloured_graph(spec)) != serialize_problem(g));
}

TEST_CASE("mislabel arithmetic") {
  std::vector<Literal> pos, neg;
  for (int i = 0; i < 108; ++i) pos.push_back(Literal("p", {Term::integer(i)}));
  for (int i = 0; i < 74; ++i) neg.push_back(Literal("p", {Term::integer(1000 + i)}));
  std::mt19937_64 rng(3);
  auto [p2, n2] = mislabel(pos, neg, Noise{NoiseKind::FalseNegatives, 0.2}, rng);
  CHECK(p2.size() == 87);
  CHECK(n2.size() == 74 + 21);
  auto [p0, n0] = mislabel(pos, neg, Noise{NoiseKind::FalsePositives, 0.0}, rng);
  CHECK(p0 == pos);
  CHECK(n0 == neg);
  auto [p3, n3] = mislabel(pos, neg, Noise{NoiseKind::NoNoise, 0.5}, rng);
  CHECK(p3 == pos);
  CHECK(n3 == neg);
}

TEST_CASE("noise names") {
  CHECK(parse_noise("false-negatives") == NoiseKind::FalseNegatives);
  CHECK(std::string(noise_name(NoiseKind::Ambiguities)) == "ambiguities");
  CHECK_THROWS_AS(parse_noise("loud"), std::invalid_argument);
}

TEST_CASE("grammar fragment") {
  MILProblem g = gen_grammar_problem(bundled_grammar());
  CHECK(g.positive.size() == 5);
  CHECK(g.metarules.size() == 1);
  GrammarSpec tiny;
  tiny.productions = P("ability([destroy|X],X).");
  CHECK(grammar_strings(tiny).size() == 1);
}

TEST_CASE("grammar strings parse under the learned hypothesis") {
  GrammarSpec spec = bundled_grammar();
  MILProblem g = gen_grammar_problem(spec);
  Hypothesis h = louise_learn(g);
  for (const std::vector<Symbol>& s : grammar_strings(spec)) {
    std::vector<Term> tokens;
    for (Symbol t : s) tokens.push_back(Term::constant(t));
    Literal atom(spec.start, {make_list(tokens), make_list({})});
    CHECK(evaluate(h, g, {atom}, {}).true_pos == 1);
  }
}

TEST_CASE("success sets") {
  Program even_odd = P("even(0). even(X) :- predecessor(X,Y), odd(Y). odd(X) :- predecessor(X,Y), even(Y).");
  Program b = P(
      "predecessor(s(0),0). predecessor(s(s(0)),s(0)). predecessor(s(s(s(0))),s(s(0))). "
      "predecessor(s(s(s(s(0)))),s(s(s(0)))).");
  std::vector<Literal> evens;
  for (const Literal& l : success_set(even_odd, b, 4)) {
    if (l.predicate == Symbol("even")) evens.push_back(l);
  }
  std::sort(evens.begin(), evens.end());
  std::vector<Literal> expected{L("even(0)"), L("even(s(s(0)))"), L("even(s(s(s(s(0)))))")};
  std::sort(expected.begin(), expected.end());
  CHECK(evens == expected);
  CHECK(success_set({}, b).empty());

  Program chain = P("blue_parent(a,b). blue_parent(b,c). parent(X,Y) :- blue_parent(X,Y)."
                    "ancestor(X,Y) :- parent(X,Y). ancestor(X,Y) :- parent(X,Z), ancestor(Z,Y).");
  std::vector<Literal> conn = success_set(coloured_graph_target(), chain);
  std::set<Literal> pairs(conn.begin(), conn.end());
  // Stack and queue also relate every node to itself.
  CHECK(pairs.size() == 9);
  std::size_t distinct = 0;
  for (const Literal& l : pairs) distinct += l.args[0] != l.args[1];
  CHECK(distinct == 6);
  CHECK(pairs.count(L("connected(c,a)")));
  CHECK(pairs.count(L("connected(a,c)")));
}

TEST_CASE("least model bookkeeping") {
  CHECK(least_model(P("p(a). q(X) :- p(X).")).size() == 2);
  CHECK_THROWS_AS(least_model(P("n(0). n(s(X)) :- n(X)."), 50, 10), std::length_error);
}

TEST_CASE("uniform_below and shuffle are deterministic") {
  std::mt19937_64 a(11), b(11);
  for (int i = 0; i < 100; ++i) CHECK(uniform_below(a, 7) == uniform_below(b, 7));
  std::vector<int> x{1, 2, 3, 4, 5, 6}, y = x;
  shuffle(x, a);
  shuffle(y, b);
  CHECK(x == y);
  std::sort(x.begin(), x.end());
  CHECK(x == std::vector<int>{1, 2, 3, 4, 5, 6});
}
