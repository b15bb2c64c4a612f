#include "doctest.h"

#include "helpers.hpp"
#include "topmil/encapsulation.hpp"
#include "topmil/problem_io.hpp"
#include "topmil/prover.hpp"

using namespace topmil;
using namespace topmil::testing;

namespace {

Term v(const char* n) { return Term::var(n); }
Term c(const char* n) { return Term::constant(n); }
Literal lit(const char* p, std::vector<Term> a) { return Literal(p, std::move(a)); }

const char* kPathBackground =
    "edge_alpha(a,b). edge_alpha(b,c). edge_alnum(a,b). edge_alnum(b,c). edge_alnum(1,2). edge_alnum(2,3).";
const char* kPathReduced =
    "path(X,Y) :- edge_alnum(X,Z), edge_alpha(Z,Y)."
    "path(X,Y) :- path(X,Z), edge_alnum(Z,Y)."
    "path(X,Y) :- path(X,Z), edge_alpha(Z,Y)."
    "path(X,Y) :- edge_alpha(X,Y).";

}  // namespace

TEST_CASE("unify forced mgu and clash") {
  auto s = unify(lit("edge", {v("X"), c("b")}), lit("edge", {c("a"), v("Y")}));
  REQUIRE(s);
  CHECK(*s->find({Symbol("X"), 0}) == c("a"));
  CHECK(*s->find({Symbol("Y"), 0}) == c("b"));
  CHECK_FALSE(unify(lit("edge", {v("X"), v("X")}), lit("edge", {c("a"), c("b")})));
}

TEST_CASE("unify an encapsulated metarule head with an encapsulated atom") {
  auto s = unify(L("m(P,X,Y)"), L("m(path,a,b)"));
  REQUIRE(s);
  CHECK(s->size() == 3);
  CHECK(*s->find({Symbol("P"), 0}) == c("path"));
  CHECK(*s->find({Symbol("X"), 0}) == c("a"));
  CHECK(*s->find({Symbol("Y"), 0}) == c("b"));
}

TEST_CASE("unify respects the occurs check") {
  CHECK_FALSE(unify(L("p(X)"), L("p(f(X))"), true));
  // Without the check a cyclic binding is still refused.
  CHECK_FALSE(unify(L("p(X)"), L("p(f(X))"), false));
  CHECK(unify(L("p(X,f(Y))"), L("p(g(Y),f(a))"), true));
}

TEST_CASE("solve path query") {
  Program p;
  p.push_back(Clause(lit("edge", {c("a"), c("b")})));
  p.push_back(Clause(lit("edge", {c("b"), c("c")})));
  p.push_back(Clause(lit("path", {v("X"), v("Y")}), {lit("edge", {v("X"), v("Y")})}));
  p.push_back(Clause(lit("path", {v("X"), v("Y")}), {lit("edge", {v("X"), v("Z")}), lit("path", {v("Z"), v("Y")})}));
  std::vector<Substitution> answers;
  auto r = solve({lit("path", {c("a"), v("W")})}, p, ProofBudget{}, &answers);
  CHECK(r.status == ProofStatus::Success);
  REQUIRE(answers.size() == 2);
  CHECK(*answers[0].find({Symbol("W"), 0}) == c("b"));
  CHECK(*answers[1].find({Symbol("W"), 0}) == c("c"));
}

TEST_CASE("solve the reduced path program on a positive example") {
  Program p = P(kPathBackground);
  Program h = P(kPathReduced);
  p.insert(p.end(), h.begin(), h.end());
  SolveOptions tabled{false, LoopCheck::Tabled};
  CHECK(solve({L("path(a,c)")}, p, ProofBudget{}, nullptr, 1, {}, tabled).status == ProofStatus::Success);
  CHECK(entails(p, L("path(a,c)"), ProofBudget{}, {}, tabled).entailed);
  CHECK_FALSE(entails(p, L("path(1,2)"), ProofBudget{}, {}, tabled).entailed);
  CHECK_FALSE(entails(p, L("path(1,3)"), ProofBudget{}, {}, tabled).entailed);
}

TEST_CASE("solve over successor numerals") {
  Program b = P("predecessor(s(0),0). predecessor(s(s(X)),s(X)) :- predecessor(s(X),X).");
  CHECK(solve({L("predecessor(s(s(0)),s(0))")}, b, ProofBudget{}).status == ProofStatus::Success);
  CHECK(solve({L("predecessor(s(0),s(0))")}, b, ProofBudget{}).status == ProofStatus::Failure);
}

TEST_CASE("a left-recursive loop exhausts the depth budget") {
  ProofBudget budget;
  budget.max_depth = 10;
  SolveReport r = solve({L("p(a)")}, P("p(X) :- p(X)."), budget);
  CHECK(r.status == ProofStatus::BudgetExhausted);
  CHECK(r.depth_pruned);
  // Tabling turns the same loop into finite failure.
  r = solve({L("p(a)")}, P("p(X) :- p(X)."), budget, nullptr, 1, {}, SolveOptions{false, LoopCheck::Tabled});
  CHECK(r.status == ProofStatus::Failure);
  CHECK_FALSE(r.truncated());
}

TEST_CASE("the inference limit aborts a search") {
  ProofBudget budget;
  budget.max_inferences = 5;
  Program p = P("n(0). n(s(X)) :- n(X).");
  SolveReport r = solve({L("n(X)")}, p, budget);
  CHECK(r.aborted);
  CHECK(r.status != ProofStatus::Failure);
}

TEST_CASE("entails on trivial programs") {
  CHECK_FALSE(entails({}, L("q(a)"), ProofBudget{}).entailed);
  CHECK(entails(P("q(a)."), L("q(a)"), ProofBudget{}).entailed);
  CHECK_FALSE(entails(P("q(a)."), L("q(b)"), ProofBudget{}).entailed);
}

TEST_CASE("tabled resolution returns each answer once") {
  Program p = P("e(a,b). e(b,a). e(b,c). t(X,Y) :- e(X,Y). t(X,Y) :- t(X,Z), e(Z,Y).");
  std::vector<Substitution> answers;
  auto r = solve({L("t(a,W)")}, p, ProofBudget{}, &answers, std::numeric_limits<std::size_t>::max(), {},
                 SolveOptions{false, LoopCheck::Tabled});
  CHECK(r.status == ProofStatus::Success);
  std::set<std::string> seen;
  for (const Substitution& s : answers) seen.insert(to_string(*s.find({Symbol("W"), 0})));
  CHECK(answers.size() == 3);
  CHECK(seen == std::set<std::string>{"a", "b", "c"});
}

TEST_CASE("encapsulation of atoms, clauses and programs") {
  CHECK(encapsulate(L("edge(a,b)")) == L("m(edge,a,b)"));
  CHECK(encapsulate(C("path(X,Y) :- edge(X,Z), edge(Z,Y)")) == C("m(path,X,Y) :- m(edge,X,Z), m(edge,Z,Y)"));
  CHECK(encapsulate(Program{}).empty());
  CHECK(excapsulate(L("m(edge,a,b)")) == L("edge(a,b)"));
  CHECK_THROWS_AS(excapsulate(L("m(P,X,Y)")), EncapsulationError);
}

TEST_CASE("encapsulation leaves plain predicates alone") {
  Encapsulation enc;
  enc.plain.insert({Symbol("succ_within"), 4});
  Clause cl = C("p(X,Y) :- succ_within(X,Y,0,3), q(Y)");
  CHECK(enc.encapsulate(cl) == C("m(p,X,Y) :- succ_within(X,Y,0,3), m(q,Y)"));
  CHECK(enc.excapsulate(enc.encapsulate(cl)) == cl);
}

TEST_CASE("rename_apart") {
  Clause r = rename_apart(C("p(X) :- q(X)"), 100);
  CHECK(r.head.args[0] == Term::var("X", 100));
  CHECK(r.body[0].args[0] == Term::var("X", 100));
  CHECK(rename_apart(C("p(a) :- q(b)"), 7) == C("p(a) :- q(b)"));
  Clause a = rename_apart(C("p(X,Y) :- q(Y,Z)"), 10);
  Clause b = rename_apart(C("p(X,Y) :- q(Y,Z)"), 20);
  std::vector<VarId> va = clause_variables(a), vb = clause_variables(b);
  for (const VarId& x : va) CHECK(std::find(vb.begin(), vb.end(), x) == vb.end());
  CHECK(is_variant(a, b));
}

TEST_CASE("display names and variant keys") {
  CHECK(to_string(display_rename(C("p(A,B) :- q(B,C)"))) == "p(X,Y) :- q(Y,Z).");
  CHECK(is_variant(C("p(A,B) :- q(B,A)"), C("p(U,V) :- q(V,U)")));
  CHECK_FALSE(is_variant(C("p(A,B) :- q(B,A)"), C("p(U,V) :- q(U,V)")));
}

TEST_CASE("printing lists and quoted atoms") {
  CHECK(to_string(L("a([x,y|T],[])")) == "a([x,y|T],[])");
  CHECK(to_string(Term::constant("Hello world")) == "'Hello world'");
  CHECK(to_string(L("move(1/2,3/4/5)")) == "move(1/2,3/4/5)");
  CHECK(to_string(L("p(-4)")) == "p(-4)");
}
