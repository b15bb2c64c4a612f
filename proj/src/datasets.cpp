#include "topmil/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace topmil {
namespace {

Term v(const char* n) { return Term::var(n); }
Term c(std::string_view n) { return Term::constant(n); }
Term pair(Term a, Term b) { return Term::compound("/", {std::move(a), std::move(b)}); }
Literal lit(std::string_view p, std::vector<Term> args) { return Literal(p, std::move(args)); }

std::size_t sample_size(double rate, std::size_t n) {
  return static_cast<std::size_t>(std::floor(rate * static_cast<double>(n) + 1e-9));
}

std::string node_name(int i) {
  std::string s(1, static_cast<char>('a' + i % 26));
  if (i >= 26) s += std::to_string(i / 26);
  return s;
}

}  // namespace

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  while (true) {
    std::uint64_t x = rng();
    if (x < limit) return x % n;
  }
}

// ---- grid world ----

MILProblem gen_grid_world(const GridWorldSpec& spec) {
  if (spec.width < 1 || spec.height < 1) throw std::invalid_argument("grid dimensions must be at least 1");
  MILProblem p;
  Term dims = pair(Term::integer(spec.width), Term::integer(spec.height));
  std::vector<Term> cells;
  for (int x = 0; x <= spec.width; ++x) {
    for (int y = 0; y <= spec.height; ++y) cells.push_back(pair(Term::integer(x), Term::integer(y)));
  }
  for (const Term& start : cells) {
    for (const Term& goal : cells) {
      p.positive.push_back(lit("move", {make_list({start, goal, dims}), make_list({goal, goal, dims})}));
    }
  }

  Term wh = pair(v("W"), v("H"));
  auto state = [&](Term x, Term y) { return make_list({pair(std::move(x), std::move(y)), v("G"), wh}); };
  auto succ = [](Term a, Term b, Term hi) { return lit("succ_within", {std::move(a), std::move(b), Term::integer(0), std::move(hi)}); };
  Program& b = p.background;
  b.push_back(Clause(lit("move_right", {state(v("X"), v("Y")), state(v("X1"), v("Y"))}), {succ(v("X"), v("X1"), v("W"))}));
  b.push_back(Clause(lit("move_left", {state(v("X"), v("Y")), state(v("X0"), v("Y"))}), {succ(v("X0"), v("X"), v("W"))}));
  b.push_back(Clause(lit("move_up", {state(v("X"), v("Y")), state(v("X"), v("Y1"))}), {succ(v("Y"), v("Y1"), v("H"))}));
  b.push_back(Clause(lit("move_down", {state(v("X"), v("Y")), state(v("X"), v("Y0"))}), {succ(v("Y0"), v("Y"), v("H"))}));

  std::vector<std::string> moves = {"move_right", "move_left", "move_up", "move_down"};
  const std::pair<const char*, const char*> turns[] = {
      {"right", "up"}, {"right", "down"}, {"left", "up"},    {"left", "down"},
      {"up", "right"}, {"up", "left"},    {"down", "right"}, {"down", "left"}};
  for (const auto& [first, second] : turns) {
    std::string name = std::string("move_") + first + "_then_" + second;
    b.push_back(Clause(lit(name, {v("Ss"), v("Gs")}), {lit(std::string("move_") + first, {v("Ss"), v("Ss1")}),
                                                        lit(std::string("move_") + second, {v("Ss1"), v("Gs")})}));
    moves.push_back(name);
  }
  for (const std::string& m : moves) b.push_back(Clause(lit("move_type", {c(m)})));
  b.push_back(Clause(lit("double_move", {v("M"), v("Ss"), v("Gs")}),
                     {lit("move_type", {v("M")}), lit("apply", {v("M"), v("Ss"), v("Ss1")}),
                      lit("apply", {v("M"), v("Ss1"), v("Gs")})}));
  b.push_back(Clause(lit("triple_move", {v("M"), v("Ss"), v("Gs")}),
                     {lit("move_type", {v("M")}), lit("apply", {v("M"), v("Ss"), v("Ss1")}),
                      lit("double_move", {v("M"), v("Ss1"), v("Gs")})}));
  p.builtins.enable({Symbol("apply"), 3});
  p.builtins.enable({Symbol("succ_within"), 4});
  for (const char* name : {"chain", "tailrec", "tri_chain_1", "tri_chain_2", "tri_chain_3"}) {
    p.metarules.push_back(*find_catalog(name));
  }
  return p;
}

// ---- coloured graph ----

const char* noise_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::NoNoise: return "none";
    case NoiseKind::Ambiguities: return "ambiguities";
    case NoiseKind::FalsePositives: return "false-positives";
    case NoiseKind::FalseNegatives: return "false-negatives";
  }
  return "?";
}

NoiseKind parse_noise(const std::string& text) {
  for (NoiseKind k : {NoiseKind::NoNoise, NoiseKind::Ambiguities, NoiseKind::FalsePositives, NoiseKind::FalseNegatives}) {
    if (text == noise_name(k)) return k;
  }
  throw std::invalid_argument("unknown noise kind '" + text + "'");
}

Program coloured_graph_target() {
  Program t;
  Literal head = lit("connected", {v("X"), v("Y")});
  t.push_back(Clause(head, {lit("ancestor", {v("X"), v("Y")})}));
  t.push_back(Clause(head, {lit("ancestor", {v("Y"), v("X")})}));
  t.push_back(Clause(head, {lit("ancestor", {v("Z"), v("X")}), lit("ancestor", {v("Z"), v("Y")})}));
  t.push_back(Clause(head, {lit("ancestor", {v("X"), v("Z")}), lit("ancestor", {v("Y"), v("Z")})}));
  return t;
}

MILProblem gen_coloured_graph(const GraphSpec& spec, const Noise& noise) {
  if (spec.node_count < 2) throw std::invalid_argument("a graph needs at least 2 nodes");
  std::mt19937_64 rng(spec.seed);
  const int n = spec.node_count;
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(node_name(i));
  std::vector<bool> blue(n);
  for (int i = 0; i < n; ++i) blue[i] = uniform_below(rng, 2) == 0;
  // Edges only run from lower to higher index, so the graph is acyclic.
  const std::uint64_t scale = 1'000'000;
  const auto threshold = static_cast<std::uint64_t>(std::llround(spec.edge_density * scale));
  Program facts;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (uniform_below(rng, scale) < threshold) {
        facts.push_back(Clause(lit(blue[i] ? "blue_parent" : "red_parent", {c(names[i]), c(names[j])})));
      }
    }
  }
  for (int i = 0; i < n; ++i) facts.push_back(Clause(lit(blue[i] ? "blue" : "red", {c(names[i])})));

  Program ancestor;
  ancestor.push_back(Clause(lit("ancestor", {v("X"), v("Y")}), {lit("parent", {v("X"), v("Y")})}));
  ancestor.push_back(Clause(lit("ancestor", {v("X"), v("Y")}),
                            {lit("parent", {v("X"), v("Z")}), lit("ancestor", {v("Z"), v("Y")})}));
  Program rest;
  rest.push_back(Clause(lit("parent", {v("X"), v("Y")}), {lit("blue_parent", {v("X"), v("Y")})}));
  rest.push_back(Clause(lit("parent", {v("X"), v("Y")}), {lit("red_parent", {v("X"), v("Y")})}));
  Program children;
  children.push_back(Clause(lit("child", {v("X"), v("Y")}), {lit("parent", {v("Y"), v("X")})}));
  children.push_back(Clause(lit("blue_child", {v("X"), v("Y")}), {lit("blue_parent", {v("Y"), v("X")})}));
  children.push_back(Clause(lit("red_child", {v("X"), v("Y")}), {lit("red_parent", {v("Y"), v("X")})}));

  MILProblem p;
  p.background = ancestor;
  if (spec.redundant_background) {
    p.background.insert(p.background.end(), rest.begin(), rest.end());
    p.background.insert(p.background.end(), children.begin(), children.end());
    p.background.insert(p.background.end(), facts.begin(), facts.end());
  } else {
    p.support = rest;
    p.support.insert(p.support.end(), facts.begin(), facts.end());
  }

  std::vector<Literal> model = success_set(coloured_graph_target(), p.full_background());
  std::set<Literal> connected(model.begin(), model.end());
  std::vector<Literal> pos, neg;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Literal a = lit("connected", {c(names[i]), c(names[j])});
      (connected.count(a) ? pos : neg).push_back(std::move(a));
    }
  }
  std::tie(p.positive, p.negative) = mislabel(pos, neg, noise, rng);
  for (const char* name : {"identity", "inverse", "stack", "queue"}) p.metarules.push_back(*find_catalog(name));
  return p;
}

std::pair<std::vector<Literal>, std::vector<Literal>> mislabel(const std::vector<Literal>& pos,
                                                               const std::vector<Literal>& neg, const Noise& noise,
                                                               std::mt19937_64& rng) {
  if (noise.kind == NoiseKind::NoNoise || noise.rate <= 0.0) return {pos, neg};
  if (noise.rate > 1.0) throw std::invalid_argument("noise rate above 1");
  auto sample = [&](std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    shuffle(idx, rng);
    idx.resize(sample_size(noise.rate, n));
    std::sort(idx.begin(), idx.end());
    return idx;
  };
  std::vector<std::size_t> pos_m = sample(pos.size());
  std::vector<std::size_t> neg_m = sample(neg.size());
  std::vector<char> pos_out(pos.size(), 0), neg_out(neg.size(), 0);
  for (std::size_t i : pos_m) pos_out[i] = 1;
  for (std::size_t i : neg_m) neg_out[i] = 1;

  std::vector<Literal> p2, n2;
  bool drop_pos = noise.kind == NoiseKind::FalseNegatives;
  bool drop_neg = noise.kind == NoiseKind::FalsePositives;
  bool add_to_pos = noise.kind != NoiseKind::FalseNegatives;
  bool add_to_neg = noise.kind != NoiseKind::FalsePositives;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (!(drop_pos && pos_out[i])) p2.push_back(pos[i]);
  }
  if (add_to_pos) {
    for (std::size_t i : neg_m) p2.push_back(neg[i]);
  }
  for (std::size_t i = 0; i < neg.size(); ++i) {
    if (!(drop_neg && neg_out[i])) n2.push_back(neg[i]);
  }
  if (add_to_neg) {
    for (std::size_t i : pos_m) n2.push_back(pos[i]);
  }
  return {std::move(p2), std::move(n2)};
}

// ---- grammar ----

GrammarSpec bundled_grammar() {
  auto tokens = [](std::string_view t) { return make_list({c(t)}, v("X")); };
  GrammarSpec g;
  Program& p = g.productions;
  p.push_back(Clause(lit("ability", {v("X"), v("Y")}),
                     {lit("destroy_verb", {v("X"), v("Z")}), lit("target_permanent", {v("Z"), v("Y")})}));
  p.push_back(Clause(lit("destroy_verb", {tokens("destroy"), v("X")})));
  p.push_back(Clause(lit("target_permanent", {v("X"), v("Y")}),
                     {lit("target", {v("X"), v("Z")}), lit("permanent_type", {v("Z"), v("Y")})}));
  p.push_back(Clause(lit("target", {tokens("target"), v("X")})));
  for (const char* type : {"artifact", "creature", "enchantment", "land", "planeswalker"}) {
    p.push_back(Clause(lit("permanent_type", {tokens(type), v("X")})));
  }
  return g;
}

std::vector<std::vector<Symbol>> grammar_strings(const GrammarSpec& spec) {
  std::vector<Substitution> answers;
  ProofBudget budget;
  budget.max_inferences = 100'000'000;
  Literal goal(spec.start, {v("S"), Term::constant(nil_symbol())});
  SolveReport r = solve({goal}, spec.productions, budget, &answers, spec.max_strings + 1);
  if (answers.size() > spec.max_strings) throw std::length_error("grammar derives more than max_strings strings");
  if (r.truncated()) throw std::length_error("grammar enumeration hit the proof budget");
  std::vector<std::vector<Symbol>> out;
  std::set<std::vector<Symbol>> seen;
  for (const Substitution& s : answers) {
    std::vector<Symbol> tokens;
    Term t = s.apply(Term::var("S"));
    while (t.is_compound() && t.name() == cons_symbol() && t.arity() == 2) {
      if (!t.args()[0].is_constant()) throw std::invalid_argument("grammar string with a non-constant token");
      tokens.push_back(t.args()[0].name());
      t = t.args()[1];
    }
    if (!(t.is_constant() && t.name() == nil_symbol())) throw std::invalid_argument("grammar string is not a list");
    if (seen.insert(tokens).second) out.push_back(std::move(tokens));
  }
  return out;
}

MILProblem gen_grammar_problem(const GrammarSpec& spec) {
  MILProblem p;
  for (const std::vector<Symbol>& s : grammar_strings(spec)) {
    std::vector<Term> items;
    for (Symbol t : s) items.push_back(Term::constant(t));
    p.positive.push_back(Literal(spec.start, {make_list(items), Term::constant(nil_symbol())}));
  }
  for (const Clause& cl : spec.productions) {
    if (cl.head.predicate != spec.start) p.background.push_back(cl);
  }
  p.metarules.push_back(*find_catalog("chain"));
  return p;
}

// ---- bottom-up oracle ----

namespace {

struct Model {
  std::map<PredicateKey, std::vector<Literal>> by_key;
  std::set<Literal> atoms;

  bool add(const Literal& l) {
    if (!atoms.insert(l).second) return false;
    by_key[l.key()].push_back(l);
    return true;
  }
};

void herbrand_terms(const std::vector<Symbol>& constants, const std::vector<std::pair<Symbol, std::size_t>>& functors,
                    std::size_t depth_cap, std::size_t max_terms, std::vector<Term>& out) {
  for (Symbol s : constants) out.push_back(Term::constant(s));
  std::vector<Term> frontier = out;
  for (std::size_t d = 1; d <= depth_cap; ++d) {
    std::vector<Term> next;
    for (const auto& [f, arity] : functors) {
      std::vector<std::size_t> odo(arity, 0);
      while (true) {
        std::vector<Term> args;
        bool uses_new = false;
        for (std::size_t i = 0; i < arity; ++i) {
          args.push_back(out[odo[i]]);
          if (term_depth(out[odo[i]]) == d - 1) uses_new = true;
        }
        if (uses_new) {
          next.push_back(Term::compound(f, args));
          if (out.size() + next.size() > max_terms) throw std::length_error("Herbrand universe exceeds the atom limit");
        }
        std::size_t i = arity;
        while (i > 0 && ++odo[i - 1] == out.size()) odo[--i] = 0;
        if (i == 0) break;
      }
    }
    out.insert(out.end(), next.begin(), next.end());
  }
}

bool within_cap(const Literal& l, std::size_t depth_cap) {
  return std::all_of(l.args.begin(), l.args.end(), [&](const Term& t) { return term_depth(t) <= depth_cap; });
}

void collect_functors(const Term& t, std::vector<std::pair<Symbol, std::size_t>>& out) {
  if (!t.is_compound()) return;
  std::pair<Symbol, std::size_t> f{t.name(), t.arity()};
  if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  for (const Term& a : t.args()) collect_functors(a, out);
}

}  // namespace

std::vector<Literal> least_model(const Program& program, std::size_t depth_cap, std::size_t max_atoms) {
  std::vector<Symbol> constants;
  std::vector<std::pair<Symbol, std::size_t>> functors;
  std::size_t program_depth = 0;
  for (const Clause& cl : program) {
    collect_constants(cl.head, constants);
    for (const Literal& l : cl.body) collect_constants(l, constants);
    for (const Term& t : cl.head.args) {
      collect_functors(t, functors);
      program_depth = std::max(program_depth, term_depth(t));
    }
    for (const Literal& l : cl.body) {
      for (const Term& t : l.args) {
        collect_functors(t, functors);
        program_depth = std::max(program_depth, term_depth(t));
      }
    }
  }
  std::size_t cap = std::max(depth_cap, program_depth);
  std::vector<Term> universe;
  bool universe_ready = false;

  Model model;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Clause& cl : program) {
      std::vector<Literal> derived;
      std::function<void(std::size_t, const Substitution&)> join = [&](std::size_t i, const Substitution& s) {
        if (i == cl.body.size()) {
          Literal head = s.apply(cl.head);
          if (head.ground()) {
            derived.push_back(std::move(head));
            return;
          }
          // Head variables the body leaves free range over the universe.
          if (!universe_ready) {
            herbrand_terms(constants, functors, cap, max_atoms, universe);
            universe_ready = true;
          }
          std::vector<VarId> free;
          for (const Term& t : head.args) term_variables(t, free);
          std::vector<std::size_t> odo(free.size(), 0);
          if (universe.empty()) return;
          while (true) {
            Substitution g;
            for (std::size_t k = 0; k < free.size(); ++k) g.set(free[k], universe[odo[k]]);
            derived.push_back(g.apply(head));
            if (derived.size() > max_atoms) throw std::length_error("least model exceeds the atom limit");
            std::size_t k = odo.size();
            while (k > 0 && ++odo[k - 1] == universe.size()) odo[--k] = 0;
            if (k == 0) break;
          }
          return;
        }
        Literal goal = s.apply(cl.body[i]);
        auto it = model.by_key.find(goal.key());
        if (it == model.by_key.end()) return;
        const std::vector<Literal> candidates = it->second;
        for (const Literal& fact : candidates) {
          auto u = unify(goal, fact);
          if (!u) continue;
          Substitution next = s;
          for (const auto& [var, val] : u->bindings()) next.set(var, val);
          Substitution composed;
          for (const auto& [var, val] : next.bindings()) composed.set(var, next.apply(val));
          join(i + 1, composed);
        }
      };
      join(0, Substitution{});
      for (const Literal& l : derived) {
        if (!within_cap(l, cap)) continue;
        if (model.add(l)) {
          changed = true;
          if (model.atoms.size() > max_atoms) throw std::length_error("least model exceeds the atom limit");
        }
      }
    }
  }
  return std::vector<Literal>(model.atoms.begin(), model.atoms.end());
}

std::vector<Literal> success_set(const Program& theory, const Program& b, std::size_t depth_cap) {
  Program all = theory;
  all.insert(all.end(), b.begin(), b.end());
  std::set<PredicateKey> keys;
  for (const Clause& cl : theory) keys.insert(cl.head.key());
  std::vector<Literal> out;
  for (Literal& l : least_model(all, depth_cap)) {
    if (keys.count(l.key())) out.push_back(std::move(l));
  }
  return out;
}

}  // namespace topmil
