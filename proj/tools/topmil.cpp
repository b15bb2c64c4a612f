// Command-line front end: learn, generate, experiment, bounds.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "topmil/datasets.hpp"
#include "topmil/experiments.hpp"
#include "topmil/learners.hpp"
#include "topmil/problem_io.hpp"

namespace {

using namespace topmil;

constexpr int kExitParse = 2;
constexpr int kExitDeadline = 3;
constexpr int kExitUsage = 64;
constexpr const char* kDeadlineEnv = "TOPMIL_DEADLINE";

struct DatasetOptions {
  std::string dataset;
  int width = 4, height = 4;
  int nodes = 14;
  double density = 0.3;
  std::string noise = "none";
  double rate = 0.0;
  bool non_redundant = false;
  std::uint64_t seed = 1;
};

void add_dataset_flags(CLI::App* cmd, DatasetOptions& d) {
  cmd->add_option("--width", d.width, "grid: x spans 0..width")->check(CLI::PositiveNumber);
  cmd->add_option("--height", d.height, "grid: y spans 0..height")->check(CLI::PositiveNumber);
  cmd->add_option("--nodes", d.nodes, "graph: node count")->check(CLI::Range(2, 1000));
  cmd->add_option("--density", d.density, "graph: edge probability")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--noise", d.noise, "graph: none|ambiguities|false-positives|false-negatives");
  cmd->add_option("--rate", d.rate, "graph: mislabelled fraction")->check(CLI::Range(0.0, 1.0));
  cmd->add_flag("--non-redundant", d.non_redundant, "graph: offer only ancestor/2 to hypotheses");
  cmd->add_option("--seed", d.seed, "rng seed");
}

MILProblem make_dataset(const DatasetOptions& d) {
  if (d.dataset == "grid") return gen_grid_world({d.width, d.height});
  if (d.dataset == "graph") {
    GraphSpec g;
    g.node_count = d.nodes;
    g.edge_density = d.density;
    g.seed = d.seed;
    g.redundant_background = !d.non_redundant;
    return gen_coloured_graph(g, {parse_noise(d.noise), d.rate});
  }
  if (d.dataset == "grammar") return gen_grammar_problem(bundled_grammar());
  throw std::invalid_argument("unknown dataset '" + d.dataset + "'");
}

std::optional<double> default_deadline() {
  const char* env = std::getenv(kDeadlineEnv);
  if (!env || !*env) return std::nullopt;
  char* end = nullptr;
  double v = std::strtod(env, &end);
  if (end == env || *end || !(v > 0)) throw std::invalid_argument(std::string(kDeadlineEnv) + " is not a positive number");
  return v;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  save_text(path, text);
}

std::vector<double> parse_ratios(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad ratio '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("no ratios given");
  return out;
}

int run_learn(const std::string& problem_path, const std::string& learner, bool no_reduce,
              std::optional<std::uint32_t> depth, std::optional<double> deadline, std::size_t max_clauses,
              const std::string& output) {
  MILProblem p;
  try {
    p = load_problem(problem_path);
  } catch (const ParseError& e) {
    std::cerr << problem_path << ": " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  }
  LearnerConfig config = learner == "louise" ? LearnerConfig{} : ExperimentConfig::unbounded_search();
  config.reduce = !no_reduce;
  config.max_hypothesis_size = max_clauses;
  if (depth) config.budget.max_depth = *depth;
  config.deadline_seconds = deadline ? deadline : default_deadline();

  Hypothesis h;
  if (parse_learner(learner) == LearnerId::Louise) {
    h = louise_learn(p, config);
  } else {
    bool expired = false;
    auto found = metagol_learn(p, config, &expired);
    if (found) {
      h = std::move(*found);
    } else {
      h.deadline_expired = expired;
      if (!expired) std::cerr << "no consistent hypothesis within " << max_clauses << " clauses\n";
    }
  }
  if (h.truncated) std::cerr << "warning: some proofs hit the depth or inference limit\n";
  write_output(output, serialize_hypothesis(h));
  if (h.deadline_expired) {
    std::cerr << "deadline expired; the hypothesis is empty\n";
    return kExitDeadline;
  }
  return 0;
}

int run_bounds(const std::string& problem_path, std::optional<std::uint64_t> theory_size,
               std::optional<std::uint64_t> k_override, std::vector<std::uint64_t> raw) {
  std::uint64_t m, p, k, c, n;
  if (!problem_path.empty()) {
    MILProblem prob;
    try {
      prob = load_problem(problem_path);
    } catch (const std::exception& e) {
      std::cerr << problem_path << ": " << e.what() << "\n";
      return kExitParse;
    }
    m = prob.metarules.size();
    p = prob.background_predicates().size();
    k = 0;
    for (const Metarule& mr : prob.metarules) k = std::max<std::uint64_t>(k, mr.body.size());
    c = prob.positive.size();
    n = theory_size.value_or(1);
  } else {
    if (raw.size() != 4) {
      std::cerr << "bounds needs --problem FILE or all of --m --p --k --c\n";
      return kExitUsage;
    }
    m = raw[0];
    p = raw[1];
    k = raw[2];
    c = raw[3];
    n = theory_size.value_or(1);
  }
  if (k_override) k = *k_override;
  if (!m || !p || !k || !c || !n) throw std::invalid_argument("bounds need m, p, k, c and n all at least 1");
  BoundsReport r = bounds(m, p, k, c, n);
  auto row = [](const char* name, const BigInt& v) {
    std::cout << name << " = " << v << "  (" << scientific(v) << ", log10 " << log10_big(v) << ")\n";
  };
  std::cout << "m = " << m << "\np = " << p << "\nk = " << k << "\nc = " << c << "\nn = " << n << "\n";
  row("max_language_lemma", r.max_language_lemma);
  row("max_language_table", r.max_language_table);
  row("max_hypothesis_space", r.max_hypothesis_space);
  row("construction_cost", r.construction_cost);
  row("search_cost", r.search_cost);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Top program construction and reduction for meta-interpretive learning"};
  app.require_subcommand(1);

  // learn
  auto* learn = app.add_subcommand("learn", "learn a hypothesis for a problem file");
  std::string learn_problem, learner = "louise", learn_output;
  bool no_reduce = false;
  std::optional<std::uint32_t> depth;
  std::optional<double> learn_deadline;
  std::size_t max_clauses = 8;
  learn->add_option("--problem", learn_problem, "problem file (.milp)")->required();
  learn->add_option("--learner", learner, "louise|baseline")->check(CLI::IsMember({"louise", "baseline"}));
  learn->add_flag("--no-reduce", no_reduce, "skip Plotkin reduction of the Top program");
  learn->add_option("--depth", depth, "maximum proof depth")->check(CLI::PositiveNumber);
  learn->add_option("--deadline", learn_deadline, "seconds before giving up")->check(CLI::PositiveNumber);
  learn->add_option("--max-clauses", max_clauses, "baseline: largest hypothesis tried")->check(CLI::PositiveNumber);
  learn->add_option("--output", learn_output, "hypothesis file (default: standard output)");

  // generate
  auto* generate = app.add_subcommand("generate", "write a generated problem file");
  DatasetOptions gen;
  std::string gen_out;
  generate->add_option("--dataset", gen.dataset, "grid|graph|grammar")
      ->required()
      ->check(CLI::IsMember({"grid", "graph", "grammar"}));
  add_dataset_flags(generate, gen);
  generate->add_option("--out", gen_out, "problem file (default: standard output)");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run learning curves");
  std::string exp_problem, exp_ratios, exp_csv, exp_records, exp_svg, exp_plot_dir, exp_learners = "louise,baseline";
  DatasetOptions exp_data;
  ExperimentConfig exp_config;
  std::optional<double> exp_deadline;
  auto* exp_problem_opt = experiment->add_option("--problem", exp_problem, "problem file (.milp)");
  experiment->add_option("--dataset", exp_data.dataset, "grid|graph|grammar")
      ->check(CLI::IsMember({"grid", "graph", "grammar"}))
      ->excludes(exp_problem_opt);
  add_dataset_flags(experiment, exp_data);
  experiment->add_option("--steps", exp_config.steps, "steps per ratio")->check(CLI::PositiveNumber);
  experiment->add_option("--ratios", exp_ratios, "comma-separated training ratios (default 0.1..0.9)");
  experiment->add_option("--deadline", exp_deadline, "training deadline in seconds")->check(CLI::PositiveNumber);
  experiment->add_option("--learners", exp_learners, "comma-separated subset of louise,baseline");
  experiment->add_option("--jobs", exp_config.jobs, "parallel steps")->check(CLI::PositiveNumber);
  experiment->add_option("--csv", exp_csv, "summary CSV (default: standard output)");
  experiment->add_option("--records", exp_records, "per-step CSV");
  experiment->add_option("--plot-dir", exp_plot_dir, "directory for per-learner plot data");
  experiment->add_option("--svg", exp_svg, "accuracy chart");

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "hypothesis-space size bounds");
  std::string bounds_problem;
  std::optional<std::uint64_t> theory_size, k_override, bm, bp, bc;
  bounds_cmd->add_option("--problem", bounds_problem, "problem file; m, p, k, c are read from it");
  bounds_cmd->add_option("--theory-size", theory_size, "target theory size n (default 1)")->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--k", k_override, "literals per metarule (default: longest body)")->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--m", bm, "number of metarules");
  bounds_cmd->add_option("--p", bp, "number of background predicates");
  bounds_cmd->add_option("--c", bc, "number of positive examples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return kExitUsage;
  }

  try {
    if (*learn) return run_learn(learn_problem, learner, no_reduce, depth, learn_deadline, max_clauses, learn_output);

    if (*generate) {
      write_output(gen_out, serialize_problem(make_dataset(gen)));
      return 0;
    }

    if (*experiment) {
      MILProblem p;
      if (!exp_problem.empty()) {
        try {
          p = load_problem(exp_problem);
        } catch (const std::exception& e) {
          std::cerr << exp_problem << ": " << e.what() << "\n";
          return kExitParse;
        }
      } else if (!exp_data.dataset.empty()) {
        p = make_dataset(exp_data);
      } else {
        std::cerr << "experiment needs --problem or --dataset\n\n" << experiment->help() << "\n";
        return kExitUsage;
      }
      if (!exp_ratios.empty()) exp_config.sampling_ratios = parse_ratios(exp_ratios);
      if (auto d = exp_deadline ? exp_deadline : default_deadline()) exp_config.deadline_seconds = *d;
      exp_config.seed = exp_data.seed;
      exp_config.learners.clear();
      std::stringstream names(exp_learners);
      for (std::string item; std::getline(names, item, ',');) exp_config.learners.push_back(parse_learner(item));
      std::vector<CurveRecord> records = run_learning_curve(p, exp_config);
      CurveSummary summary = summarize(records);
      std::ostringstream csv;
      emit_csv(summary, csv);
      write_output(exp_csv, csv.str());
      if (!exp_records.empty()) {
        std::ostringstream rec;
        emit_csv(records, rec);
        save_text(exp_records, rec.str());
      }
      if (!exp_plot_dir.empty()) {
        std::filesystem::create_directories(exp_plot_dir);
        for (LearnerId id : exp_config.learners) {
          std::ostringstream data;
          emit_plot_data(summary, id, data);
          save_text((std::filesystem::path(exp_plot_dir) / (std::string(learner_name(id)) + ".dat")).string(),
                    data.str());
        }
      }
      if (!exp_svg.empty()) save_text(exp_svg, render_svg(summary, "accuracy"));
      return 0;
    }

    if (*bounds_cmd) {
      std::vector<std::uint64_t> raw;
      if (bm && bp && k_override && bc) raw = {*bm, *bp, *k_override, *bc};
      return run_bounds(bounds_problem, theory_size, k_override, raw);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
