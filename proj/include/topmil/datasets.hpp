#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "topmil/problem.hpp"

namespace topmil {

struct GridWorldSpec {
  int width = 4;   // x spans 0..width
  int height = 4;  // y spans 0..height
};

// Positives move([X/Y,GX/GY,W/H],[GX/GY,GX/GY,W/H]) for every ordered pair of
// cells; no negatives. Background: four primitive moves, the eight
// perpendicular two-step moves, and double_move/triple_move over apply/3.
MILProblem gen_grid_world(const GridWorldSpec& spec);

enum class NoiseKind { NoNoise, Ambiguities, FalsePositives, FalseNegatives };

struct Noise {
  NoiseKind kind = NoiseKind::NoNoise;
  double rate = 0.0;
};

const char* noise_name(NoiseKind kind);
NoiseKind parse_noise(const std::string& text);  // throws std::invalid_argument

struct GraphSpec {
  int node_count = 14;
  double edge_density = 0.3;
  std::uint64_t seed = 1;
  // Background offers parent/child and their coloured variants next to
  // ancestor/2; otherwise ancestor/2 is the only predicate hypotheses may use.
  bool redundant_background = true;
};

// Two-colour DAG; connected/2 labelled by its four-clause definition over
// ancestor/2, negatives are the other ordered pairs of distinct nodes.
MILProblem gen_coloured_graph(const GraphSpec& spec, const Noise& noise = {});
Program coloured_graph_target();

// Table-style mislabelling: floor(rate*|set|) atoms drawn without replacement
// from each side, then moved or copied to the opposite side.
std::pair<std::vector<Literal>, std::vector<Literal>> mislabel(const std::vector<Literal>& pos,
                                                               const std::vector<Literal>& neg, const Noise& noise,
                                                               std::mt19937_64& rng);

struct GrammarSpec {
  Symbol start{"ability"};
  Program productions;  // difference-list clauses, the start symbol's included
  std::size_t max_strings = 100000;
};

// The destroy/target/permanent-type fragment.
GrammarSpec bundled_grammar();

// Positives are start(Tokens,[]) for every generated string; the background
// is every production not defining the start symbol; Chain is the metarule.
MILProblem gen_grammar_problem(const GrammarSpec& spec);

// Token lists of every string the start symbol derives.
std::vector<std::vector<Symbol>> grammar_strings(const GrammarSpec& spec);

// Least Herbrand model of theory ∪ b restricted to the theory's predicates,
// over the constants of both programs with terms up to depth_cap. Throws
// std::length_error past 10^5 atoms.
std::vector<Literal> success_set(const Program& theory, const Program& b, std::size_t depth_cap = 0);

// Full least model of a program over its truncated Herbrand universe.
std::vector<Literal> least_model(const Program& program, std::size_t depth_cap = 0,
                                 std::size_t max_atoms = 100000);

// Uniform integer in [0, n) by rejection, identical across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);
template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_below(rng, i)]);
}

}  // namespace topmil
