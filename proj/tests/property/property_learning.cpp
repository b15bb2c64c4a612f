#include "doctest.h"

#include "generators.hpp"
#include "helpers.hpp"
#include "random_problems.hpp"
#include "topmil/experiments.hpp"
#include "topmil/learners.hpp"
#include "topmil/reduction.hpp"
#include "topmil/top_construction.hpp"

using namespace topmil;
using namespace topmil::testing;

TEST_CASE("generalise and specialise agree with their oracles") {
  TheoremTally t = check_top_programs(11, 200);
  INFO(t.first_failure);
  CHECK(t.generalise_mismatches == 0);
  CHECK(t.specialise_mismatches == 0);
  CHECK(t.instances == 200);
}

TEST_CASE("the top program is correct whenever a correct hypothesis exists, under complete labels") {
  TheoremTally t = check_top_programs(13, 200, true);
  INFO(t.first_failure);
  CHECK(t.solvable > 100);
  CHECK(t.top_violations == 0);
  CHECK(t.generalise_mismatches == 0);
  CHECK(t.specialise_mismatches == 0);
}

TEST_CASE("recursive clauses in the top program can combine to cover a negative") {
  MILProblem p = parse_problem(
      ":- pos. t(a,c). t(b,c).\n"
      ":- neg. t(a,d).\n"
      ":- bk. b1(a,b). b1(b,c). b1(c,d).\n"
      ":- metarules. identity. chain.\n");
  Program correct = P("t(X,Y) :- b1(X,Y). t(X,Y) :- b1(X,Z), b1(Z,Y).");
  CHECK(is_correct(correct, p));
  Program top = clauses_of(construct_top(p).top, p.metarules);
  std::multiset<std::string> keys = variants(top);
  CHECK(keys.count(variant_key(C("t(X,Y) :- b1(X,Y)"))) == 1);
  CHECK(keys.count(variant_key(C("t(X,Y) :- b1(X,Z), t(Z,Y)"))) == 1);
  // Each clause alone with B and E+ is consistent; together they derive t(a,d).
  CHECK(model_of(join(top, p.background)).count(L("t(a,d)")) == 1);
  CHECK_FALSE(is_correct(top, p));
}

TEST_CASE("adding a positive never shrinks the generalised set") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 150; ++i) {
    RandomInstance inst = random_instance(rng, true);
    MILProblem fewer = inst.problem;
    if (fewer.positive.size() < 2) continue;
    Literal dropped = fewer.positive.back();
    fewer.positive.pop_back();
    std::set<std::string> small = clause_keys(generalise(fewer, ProofBudget{}), fewer.metarules);
    std::set<std::string> large = clause_keys(generalise(inst.problem, ProofBudget{}), inst.problem.metarules);
    CHECK(std::includes(large.begin(), large.end(), small.begin(), small.end()));
  }
}

TEST_CASE("plotkin reduction laws on random datalog") {
  Gen g(19);
  const std::vector<std::string> base{"e", "f"}, derived{"t", "u"}, all{"e", "f", "t", "u"};
  for (int i = 0; i < 200; ++i) {
    Program th = g.ground_facts(base, 3, 25);
    Program h;
    for (std::size_t k = 0, n = 2 + g.below(5); k < n; ++k) {
      Clause c = g.datalog_rule(derived, all);
      h.push_back(c);
      if (g.chance(20)) h.push_back(c);  // exact duplicates must go
    }
    std::vector<char> kept;
    Program r = plotkin_reduce(h, th, ProofBudget{}, {}, &kept);
    // Subset in input order.
    Program survivors;
    for (std::size_t k = 0; k < h.size(); ++k)
      if (kept[k]) survivors.push_back(h[k]);
    CHECK(survivors == r);
    // Fixpoint.
    CHECK(plotkin_reduce(r, th) == r);
    // Same least model with th.
    CHECK(model_of(join(r, th)) == model_of(join(h, th)));
    // Every dropped clause follows from the survivors and th.
    for (std::size_t k = 0; k < h.size(); ++k)
      if (!kept[k]) CHECK(generalises(r, {h[k]}, th));
    // No survivor follows from the others.
    for (std::size_t k = 0; k < r.size(); ++k) {
      Program others = r;
      others.erase(others.begin() + static_cast<std::ptrdiff_t>(k));
      CHECK_FALSE(generalises(others, {r[k]}, th));
    }
  }
}

TEST_CASE("louise returns a correct hypothesis on completely labelled instances") {
  std::mt19937_64 rng(23);
  std::size_t solvable = 0;
  for (int i = 0; i < 120; ++i) {
    RandomInstance inst = random_instance(rng, true);
    if (!brute_force_correct(inst)) continue;
    ++solvable;
    Hypothesis h = louise_learn(inst.problem);
    CHECK_FALSE(h.truncated);
    CHECK(is_correct(h.program(), inst.problem));
  }
  CHECK(solvable > 60);
}

TEST_CASE("reduction does not change what the hypothesis entails") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 120; ++i) {
    RandomInstance inst = random_instance(rng, i % 2 == 0);
    LearnerConfig plain;
    plain.reduce = false;
    Hypothesis reduced = louise_learn(inst.problem);
    Hypothesis full = louise_learn(inst.problem, plain);
    CHECK(reduced.size() <= full.size());
    std::set<Literal> a = model_of(join(reduced.program(), inst.problem.background));
    std::set<Literal> b = model_of(join(full.program(), inst.problem.background));
    for (const Literal& e : inst.problem.positive) CHECK(a.count(e) == b.count(e));
    for (const Literal& e : inst.problem.negative) CHECK(a.count(e) == b.count(e));
  }
}

TEST_CASE("the baseline only returns correct hypotheses") {
  std::mt19937_64 rng(31);
  std::size_t found = 0;
  for (int i = 0; i < 80; ++i) {
    RandomInstance inst = random_instance(rng, i % 2 == 0);
    LearnerConfig cfg;
    cfg.deadline_seconds = 2.0;
    cfg.max_hypothesis_size = 3;
    bool expired = false;
    std::optional<Hypothesis> h = metagol_learn(inst.problem, cfg, &expired);
    if (!h) continue;
    ++found;
    CHECK_FALSE(expired);
    CHECK(is_correct(h->program(), inst.problem));
    CHECK(h->size() <= 3);
  }
  CHECK(found > 20);
}

TEST_CASE("a deadline expiring mid-search never yields an inconsistent baseline hypothesis") {
  GraphSpec spec;
  spec.node_count = 10;
  spec.seed = 1;
  MILProblem p = gen_coloured_graph(spec, Noise{NoiseKind::FalseNegatives, 0.2});
  std::mt19937_64 rng = partition_rng(3, 7, 0);
  Partition part = sample_partition(p.positive, p.negative, 0.5, rng);
  MILProblem train = p;
  train.positive = part.train_pos;
  train.negative = part.train_neg;
  Gen g(37);
  for (int i = 0; i < 20; ++i) {
    LearnerConfig cfg = ExperimentConfig::unbounded_search();
    cfg.deadline_seconds = 0.01 + static_cast<double>(g.below(400)) / 1000.0;
    std::optional<Hypothesis> h = metagol_learn(train, cfg);
    if (!h) continue;
    EvalReport r = evaluate(*h, train, train.positive, train.negative);
    CHECK(r.false_pos == 0);
    CHECK(r.false_neg == 0);
  }
}
