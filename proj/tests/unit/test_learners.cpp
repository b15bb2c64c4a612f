#include "doctest.h"

#include <chrono>

#include "helpers.hpp"
#include "topmil/datasets.hpp"
#include "topmil/learners.hpp"

using namespace topmil;
using namespace topmil::testing;

TEST_CASE("louise on the path problem") {
  MILProblem p = load_problem(data_path("path.milp"));
  Hypothesis h = louise_learn(p);
  CHECK(printed(h.clauses) == std::vector<std::string>{
                                  "path(X,Y) :- edge_alnum(X,Z), edge_alpha(Z,Y).",
                                  "path(X,Y) :- path(X,Z), edge_alnum(Z,Y).",
                                  "path(X,Y) :- path(X,Z), edge_alpha(Z,Y).",
                                  "path(X,Y) :- edge_alpha(X,Y).",
                              });
  CHECK(h.residue.empty());
  CHECK(h.provenance.size() == h.clauses.size());
  EvalReport r = evaluate(h, p, p.positive, p.negative);
  CHECK(r.accuracy == 1.0);
}

TEST_CASE("louise on odd/even learns mutual recursion plus a residue") {
  MILProblem p = load_problem(data_path("odd_even.milp"));
  Hypothesis h = louise_learn(p);
  CHECK(variants(h.program()) ==
        variants(P("even(0). even(X) :- predecessor(X,Y), odd(Y). odd(X) :- predecessor(X,Y), even(Y).")));
  CHECK(h.residue == std::vector<Literal>{L("even(0)")});
}

TEST_CASE("louise without positives") {
  MILProblem p = load_problem(data_path("path.milp"));
  p.positive.clear();
  CHECK(louise_learn(p).empty());
}

TEST_CASE("reduction does not change what louise entails") {
  for (const char* file : {"path.milp", "odd_even.milp", "grammar.milp"}) {
    MILProblem p = load_problem(data_path(file));
    LearnerConfig plain;
    plain.reduce = false;
    Hypothesis full = louise_learn(p, plain), reduced = louise_learn(p);
    CHECK(reduced.size() <= full.size());
    EvalReport a = evaluate(full, p, p.positive, p.negative), b = evaluate(reduced, p, p.positive, p.negative);
    CHECK(a.true_pos == b.true_pos);
    CHECK(a.false_pos == b.false_pos);
  }
}

TEST_CASE("baseline on the path problem") {
  MILProblem p = load_problem(data_path("path.milp"));
  std::optional<Hypothesis> h = metagol_learn(p);
  REQUIRE(h);
  CHECK(printed(h->clauses) ==
        std::vector<std::string>{"path(X,Y) :- edge_alpha(X,Y).", "path(X,Y) :- edge_alpha(X,Z), edge_alpha(Z,Y)."});
  CHECK(evaluate(*h, p, p.positive, p.negative).accuracy == 1.0);
}

TEST_CASE("baseline finds the coloured graph target theory") {
  MILProblem p = load_problem(data_path("coloured_graph.milp"));
  std::optional<Hypothesis> h = metagol_learn(p);
  REQUIRE(h);
  CHECK(variants(h->clauses) == variants(coloured_graph_target()));
}

TEST_CASE("baseline is absent on noisy graphs") {
  GraphSpec spec;
  spec.node_count = 8;
  spec.redundant_background = false;
  MILProblem p = gen_coloured_graph(spec, Noise{NoiseKind::FalseNegatives, 0.2});
  LearnerConfig cfg;
  cfg.deadline_seconds = 20.0;
  bool expired = false;
  std::optional<Hypothesis> h = metagol_learn(p, cfg, &expired);
  CHECK_FALSE(h);
}

TEST_CASE("both learners agree on the grammar") {
  MILProblem p = load_problem(data_path("grammar.milp"));
  Hypothesis a = louise_learn(p);
  std::optional<Hypothesis> b = metagol_learn(p);
  REQUIRE(b);
  CHECK(a.residue.empty());
  CHECK(variants(a.clauses) == variants(b->clauses));
  CHECK(printed(a.clauses) ==
        std::vector<std::string>{"ability(X,Y) :- destroy_verb(X,Z), target_permanent(Z,Y)."});
}

TEST_CASE("the baseline rejects a program whose negative check hits the budget") {
  // t(X,Y) :- e(X,Y) proves the positive cheaply, but deciding the negative
  // walks a 40-step chain, more than the inference limit allows.
  MILProblem p = parse_problem(
      ":- pos. t(a,b).\n"
      ":- neg. t(c0,c40).\n"
      ":- bk. e(a,b). e(X,Y) :- f(X,Y). e(X,Y) :- f(X,Z), e(Z,Y). f(c0,c1). f(c1,c2). f(c2,c3). f(c3,c4). f(c4,c5). f(c5,c6). f(c6,c7). f(c7,c8). f(c8,c9). f(c9,c10). f(c10,c11). f(c11,c12). f(c12,c13). f(c13,c14). f(c14,c15). f(c15,c16). f(c16,c17). f(c17,c18). f(c18,c19). f(c19,c20). f(c20,c21). f(c21,c22). f(c22,c23). f(c23,c24). f(c24,c25). f(c25,c26). f(c26,c27). f(c27,c28). f(c28,c29). f(c29,c30). f(c30,c31). f(c31,c32). f(c32,c33). f(c33,c34). f(c34,c35). f(c35,c36). f(c36,c37). f(c37,c38). f(c38,c39). f(c39,c40).\n"
      ":- metarules. identity.\n");
  LearnerConfig cfg;
  cfg.budget.max_inferences = 60;
  CHECK_FALSE(metagol_learn(p, cfg).has_value());
  cfg.budget.max_inferences = 100000;
  CHECK_FALSE(metagol_learn(p, cfg).has_value());
  // Without the negative the same program is found under the small limit.
  p.negative.clear();
  cfg.budget.max_inferences = 60;
  CHECK(metagol_learn(p, cfg).has_value());
}

TEST_CASE("deadline expiry yields an empty hypothesis") {
  MILProblem p = gen_grid_world({3, 3});
  LearnerConfig cfg;
  cfg.deadline_seconds = 0.2;
  auto t0 = std::chrono::steady_clock::now();
  Hypothesis h = louise_learn(p, cfg);
  double louise_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(h.deadline_expired);
  CHECK(h.empty());
  CHECK(louise_s < 1.2);

  bool expired = false;
  t0 = std::chrono::steady_clock::now();
  std::optional<Hypothesis> b = metagol_learn(p, cfg, &expired);
  double base_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK_FALSE(b);
  CHECK(expired);
  CHECK(base_s < 1.2);
}

TEST_CASE("evaluate") {
  Program bk = P("q(a). q(b). q(c).");
  std::vector<Literal> pos, neg;
  for (int i = 0; i < 10; ++i) {
    pos.push_back(Literal("p", {Term::integer(i)}));
    neg.push_back(Literal("p", {Term::integer(100 + i)}));
  }
  CHECK(evaluate(Program{}, bk, pos, neg).accuracy == 0.5);

  Program h = P("p(X) :- q(X).");
  EvalReport r = evaluate(h, bk, {L("p(a)"), L("p(b)"), L("p(c)"), L("p(d)")},
                          {L("p(a)"), L("p(e)"), L("p(f)"), L("p(g)")});
  CHECK(r.true_pos == 3);
  CHECK(r.false_neg == 1);
  CHECK(r.false_pos == 1);
  CHECK(r.true_neg == 3);
  CHECK(r.accuracy == 0.75);
}
