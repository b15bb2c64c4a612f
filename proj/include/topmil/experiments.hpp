#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "topmil/learners.hpp"

namespace topmil {

enum class LearnerId { Louise, Baseline };

const char* learner_name(LearnerId id);
LearnerId parse_learner(const std::string& text);  // throws std::invalid_argument

struct ExperimentConfig {
  std::size_t steps = 100;
  std::vector<double> sampling_ratios = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  double deadline_seconds = 300.0;
  std::uint64_t seed = 0;
  std::vector<LearnerId> learners = {LearnerId::Louise, LearnerId::Baseline};
  std::size_t jobs = 1;
  LearnerConfig louise;    // deadline_seconds here is overridden
  LearnerConfig baseline = unbounded_search();  // likewise

  // The baseline is cut off by the deadline, not by an inference count.
  static LearnerConfig unbounded_search() {
    LearnerConfig c;
    c.budget.max_inferences = std::numeric_limits<std::uint64_t>::max();
    return c;
  }
};

struct Partition {
  std::vector<Literal> train_pos, train_neg, test_pos, test_neg;
};

// floor(ratio*|E|) of each example set for training, stratified by target
// predicate, drawn without replacement; the rest is the test set. Throws
// std::invalid_argument when the training positives would be empty or both
// test sides would be.
Partition sample_partition(const std::vector<Literal>& pos, const std::vector<Literal>& neg, double ratio,
                           std::mt19937_64& rng);

// The rng stream of one (step, ratio) cell; learners share it, so the choice
// of learners never changes the partitions.
std::mt19937_64 partition_rng(std::uint64_t seed, std::size_t step, std::size_t ratio_index);

struct CurveRecord {
  LearnerId learner = LearnerId::Louise;
  double ratio = 0.0;
  std::size_t step = 0;
  double accuracy = 0.0;
  double train_seconds = 0.0;
  bool timed_out = false;
  std::size_t hypothesis_size = 0;
};

// Records ordered by (ratio, step, learner in config order).
std::vector<CurveRecord> run_learning_curve(const MILProblem& problem, const ExperimentConfig& config);

struct CurvePoint {
  LearnerId learner = LearnerId::Louise;
  double ratio = 0.0;
  std::size_t count = 0;
  double mean_accuracy = 0.0, stderr_accuracy = 0.0;
  double mean_seconds = 0.0, stderr_seconds = 0.0;
};

using CurveSummary = std::vector<CurvePoint>;

// Mean and sample-sd/sqrt(n) per (learner, ratio), ordered by learner then ratio.
CurveSummary summarize(const std::vector<CurveRecord>& records);

void emit_csv(const CurveSummary& summary, std::ostream& out);
void emit_csv(const std::vector<CurveRecord>& records, std::ostream& out);
// "ratio<TAB>mean<TAB>stderr" lines for one learner.
void emit_plot_data(const CurveSummary& summary, LearnerId learner, std::ostream& out);
// Accuracy against training ratio, one polyline with error bars per learner.
std::string render_svg(const CurveSummary& summary, const std::string& title = "");

}  // namespace topmil
