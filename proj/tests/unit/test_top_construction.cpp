#include "doctest.h"

#include "helpers.hpp"
#include "topmil/reduction.hpp"
#include "topmil/top_construction.hpp"

using namespace topmil;
using namespace topmil::testing;

namespace {

Program applied(const std::vector<Metasubstitution>& mus, const std::vector<Metarule>& ms) {
  Program out;
  for (const Metasubstitution& mu : mus) out.push_back(apply_metasub(mu, ms));
  return out;
}

const char* kGeneralised =
    "path(X,Y) :- edge_alnum(X,Y)."
    "path(X,Y) :- edge_alpha(X,Y)."
    "path(X,Y) :- edge_alnum(X,Z), edge_alnum(Z,Y)."
    "path(X,Y) :- edge_alnum(X,Z), edge_alpha(Z,Y)."
    "path(X,Y) :- edge_alpha(X,Z), edge_alnum(Z,Y)."
    "path(X,Y) :- edge_alpha(X,Z), edge_alpha(Z,Y)."
    "path(X,Y) :- path(X,Z), edge_alnum(Z,Y)."
    "path(X,Y) :- path(X,Z), edge_alpha(Z,Y)."
    "path(X,Y) :- path(X,Y).";

const char* kReduced =
    "path(X,Y) :- edge_alnum(X,Z), edge_alpha(Z,Y)."
    "path(X,Y) :- path(X,Z), edge_alnum(Z,Y)."
    "path(X,Y) :- path(X,Z), edge_alpha(Z,Y)."
    "path(X,Y) :- edge_alpha(X,Y).";

}  // namespace

TEST_CASE("generalisation step of the path problem") {
  MILProblem p = load_problem(data_path("path.milp"));
  std::vector<Metasubstitution> gen = generalise(p, ProofBudget{});
  CHECK(gen.size() == 9);
  CHECK(variants(applied(gen, p.metarules)) == variants(P(kGeneralised)));
  CHECK(generalise({}, p.background, p.metarules).empty());
}

TEST_CASE("specialisation step of the path problem") {
  MILProblem p = load_problem(data_path("path.milp"));
  TopPartition top = construct_top(p);
  CHECK(top.top.size() == 7);
  CHECK(variants(applied(top.removed, p.metarules)) ==
        variants(P("path(X,Y) :- edge_alnum(X,Y). path(X,Y) :- edge_alnum(X,Z), edge_alnum(Z,Y).")));
  Program expected = P(kGeneralised);
  expected.erase(expected.begin());       // the identity clause over edge_alnum
  expected.erase(expected.begin() + 1);   // the chain over edge_alnum twice
  CHECK(variants(applied(top.top, p.metarules)) == variants(expected));
  CHECK(specialise(top.generalised, {}, p.background, p.positive, p.metarules) == top.generalised);
  CHECK_FALSE(top.truncated);
}

TEST_CASE("generalise finds the mutually recursive odd/even clauses") {
  MILProblem p = load_problem(data_path("odd_even.milp"));
  Program gen = applied(generalise(p, ProofBudget{}), p.metarules);
  std::multiset<std::string> keys = variants(gen);
  CHECK(keys.count(variant_key(C("even(X) :- predecessor(X,Y), odd(Y)"))) == 1);
  CHECK(keys.count(variant_key(C("odd(X) :- predecessor(X,Y), even(Y)"))) == 1);
}

TEST_CASE("an over-general clause is removed iff it covers a negative") {
  MILProblem p = parse_problem(
      ":- pos. connected(a,b). connected(b,c).\n"
      ":- neg. connected(c,d).\n"
      ":- bk. parent(a,b). parent(b,c). parent(d,e).\n"
      ":- metarules. identity.\n");
  // connected(X,Y) :- parent(X,Y) and the tautology over connected/2.
  CHECK(construct_top(p).top.size() == 2);
  p.negative.push_back(L("connected(d,e)"));
  TopPartition top = construct_top(p);
  CHECK(top.generalised.size() == 2);
  CHECK(variants(applied(top.top, p.metarules)) == variants(P("connected(X,Y) :- connected(X,Y).")));
}

TEST_CASE("nothing in the language covers the positives") {
  MILProblem p = parse_problem(":- pos. q(a,z).\n:- bk. r(a,b).\n:- metarules. identity. chain.\n");
  TopPartition top = construct_top(p);
  // Only the tautology q(X,Y) :- q(X,Y) derives an example.
  CHECK(variants(applied(top.top, p.metarules)) == variants(P("q(X,Y) :- q(X,Y).")));
}

TEST_CASE("an ambiguous example is generalised, then specialised away") {
  MILProblem p = parse_problem(":- pos. t(a,b).\n:- neg. t(a,b).\n:- bk. r(a,b).\n:- metarules. identity.\n");
  TopPartition top = construct_top(p);
  CHECK(top.generalised.size() == 2);
  CHECK(top.removed.size() == 2);
  CHECK(top.top.empty());
}

TEST_CASE("generalises") {
  CHECK(generalises(P("p(X) :- q(X). q(a)."), P("p(a)."), {}));
  CHECK_FALSE(generalises({}, P("p(a)."), {}));
  Program th = encapsulate(P("edge_alpha(a,b). edge_alpha(b,c). edge_alnum(a,b). edge_alnum(b,c)."));
  CHECK(generalises(encapsulate(P(kReduced)), encapsulate(P("path(X,Y) :- path(X,Y).")), th));
  // A clause never generalises itself through an unrelated program.
  CHECK_FALSE(generalises(P("p(X) :- q(X)."), P("p(X) :- r(X)."), {}));
}

TEST_CASE("plotkin reduction of the path top program") {
  MILProblem p = load_problem(data_path("path.milp"));
  TopPartition top = construct_top(p);
  Program h = encapsulate(applied(top.top, p.metarules));
  Program th = encapsulate(p.background);
  for (const Literal& e : p.positive) th.push_back(Clause(encapsulate(e)));
  Program reduced = plotkin_reduce(h, th);
  CHECK(variants(excapsulate(reduced)) == variants(P(kReduced)));
  CHECK(plotkin_reduce(reduced, th) == reduced);
  CHECK(plotkin_reduce(P("p(a). p(a)."), {}) == P("p(a)."));
}

TEST_CASE("reduction keeps non-candidates") {
  std::vector<char> kept;
  Program h = P("p(a). p(a). p(a).");
  ReduceOptions opts;
  opts.candidates = {0, 1, 0};
  Program out = plotkin_reduce(h, {}, ProofBudget{}, opts, &kept);
  CHECK(kept == std::vector<char>{1, 0, 1});
  CHECK(out.size() == 2);
}
