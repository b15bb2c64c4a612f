#include "doctest.h"

#include <sstream>

#include "helpers.hpp"
#include "topmil/experiments.hpp"

using namespace topmil;
using namespace topmil::testing;

namespace {

std::vector<Literal> atoms(const char* pred, int n, int offset = 0) {
  std::vector<Literal> out;
  for (int i = 0; i < n; ++i) out.push_back(Literal(pred, {Term::integer(offset + i)}));
  return out;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
  return n;
}

CurveRecord record(LearnerId l, double ratio, double acc, double secs = 1.0) {
  CurveRecord r;
  r.learner = l;
  r.ratio = ratio;
  r.accuracy = acc;
  r.train_seconds = secs;
  return r;
}

}  // namespace

TEST_CASE("sample_partition sizes and laws") {
  std::vector<Literal> pos = atoms("p", 10), neg = atoms("p", 7, 100);
  std::mt19937_64 rng(5);
  Partition part = sample_partition(pos, neg, 0.5, rng);
  CHECK(part.train_pos.size() == 5);
  CHECK(part.test_pos.size() == 5);
  CHECK(part.train_neg.size() == 3);
  CHECK(part.test_neg.size() == 4);
  std::set<Literal> all(part.train_pos.begin(), part.train_pos.end());
  all.insert(part.test_pos.begin(), part.test_pos.end());
  CHECK(all == std::set<Literal>(pos.begin(), pos.end()));
  CHECK_THROWS_AS(sample_partition(pos, neg, 0.05, rng), std::invalid_argument);
}

TEST_CASE("partition streams are deterministic") {
  std::vector<Literal> pos = atoms("p", 30), neg = atoms("p", 30, 100);
  std::mt19937_64 a = partition_rng(9, 3, 1), b = partition_rng(9, 3, 1);
  Partition x = sample_partition(pos, neg, 0.4, a), y = sample_partition(pos, neg, 0.4, b);
  CHECK(x.train_pos == y.train_pos);
  CHECK(x.test_neg == y.test_neg);
  std::mt19937_64 c = partition_rng(9, 4, 1);
  CHECK(sample_partition(pos, neg, 0.4, c).train_pos != x.train_pos);
}

TEST_CASE("summarize") {
  CurveSummary one = summarize({record(LearnerId::Louise, 0.5, 0.7)});
  REQUIRE(one.size() == 1);
  CHECK(one[0].stderr_accuracy == 0.0);

  CurveSummary two = summarize({record(LearnerId::Louise, 0.5, 0.4), record(LearnerId::Louise, 0.5, 0.6)});
  REQUIRE(two.size() == 1);
  CHECK(two[0].mean_accuracy == doctest::Approx(0.5));
  CHECK(two[0].stderr_accuracy == doctest::Approx(0.1));

  std::vector<CurveRecord> recs;
  for (double ratio : {0.2, 0.1})
    for (int i = 0; i < 3; ++i) {
      recs.push_back(record(LearnerId::Baseline, ratio, 0.25));
      recs.push_back(record(LearnerId::Louise, ratio, 1.0));
    }
  CurveSummary s = summarize(recs);
  REQUIRE(s.size() == 4);
  CHECK(s[0].learner == LearnerId::Louise);
  CHECK(s[0].ratio == 0.1);
  CHECK(s[3].learner == LearnerId::Baseline);
  CHECK(s[3].ratio == 0.2);
  for (const CurvePoint& p : s) CHECK(p.stderr_accuracy == 0.0);
}

TEST_CASE("csv, plot data and svg") {
  std::vector<CurveRecord> recs = {record(LearnerId::Louise, 0.1, 1.0), record(LearnerId::Baseline, 0.1, 0.5),
                                   record(LearnerId::Louise, 0.5, 1.0), record(LearnerId::Baseline, 0.5, 0.25)};
  CurveSummary s = summarize(recs);
  std::ostringstream csv;
  emit_csv(s, csv);
  std::string text = csv.str();
  CHECK(text.substr(0, text.find('\n')) == "learner,ratio,mean_accuracy,stderr_accuracy,mean_seconds,stderr_seconds");
  CHECK(count_of(text, "\n") == 1 + 4);
  CHECK(text.find("louise,0.5,1.000000,0.000000,1.000000,0.000000\n") != std::string::npos);

  std::ostringstream raw;
  emit_csv(recs, raw);
  CHECK(raw.str().rfind("learner,ratio,step,accuracy,train_seconds,timed_out,hypothesis_size\n", 0) == 0);

  std::ostringstream plot;
  emit_plot_data(s, LearnerId::Baseline, plot);
  CHECK(plot.str() == "0.1\t0.500000\t0.000000\n0.5\t0.250000\t0.000000\n");

  std::string svg = render_svg(s, "curve");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(count_of(svg, "<polyline") == 2);
  CHECK(count_of(svg, "<polyline class=\"louise\"") == 1);
  CHECK(count_of(svg, "<polyline class=\"baseline\"") == 1);
}

TEST_CASE("learner names") {
  CHECK(parse_learner("louise") == LearnerId::Louise);
  CHECK(parse_learner("baseline") == LearnerId::Baseline);
  CHECK_THROWS_AS(parse_learner("other"), std::invalid_argument);
}

TEST_CASE("learning curve record counts and the timeout rule") {
  MILProblem p = load_problem(data_path("coloured_graph.milp"));
  ExperimentConfig cfg;
  cfg.steps = 2;
  cfg.sampling_ratios = {0.3, 0.6};
  cfg.deadline_seconds = 30;
  cfg.seed = 4;
  std::vector<CurveRecord> recs = run_learning_curve(p, cfg);
  CHECK(recs.size() == 2 * 2 * 2);

  // A deadline that has already passed makes every learner time out.
  cfg.deadline_seconds = 0.0;
  std::vector<CurveRecord> timed = run_learning_curve(p, cfg);
  for (std::size_t i = 0; i < timed.size(); ++i) {
    const CurveRecord& r = timed[i];
    CHECK(r.timed_out);
    std::size_t ratio_index = r.ratio == 0.3 ? 0 : 1;
    std::mt19937_64 rng = partition_rng(cfg.seed, r.step, ratio_index);
    Partition part = sample_partition(p.positive, p.negative, r.ratio, rng);
    double empty = static_cast<double>(part.test_neg.size()) /
                   static_cast<double>(part.test_pos.size() + part.test_neg.size());
    CHECK(r.accuracy == empty);
  }
}

TEST_CASE("learning curves are reproducible and independent of the job count") {
  MILProblem p = load_problem(data_path("path.milp"));
  ExperimentConfig cfg;
  cfg.steps = 3;
  cfg.sampling_ratios = {0.5};
  cfg.deadline_seconds = 10;
  cfg.seed = 8;
  auto strip = [](std::vector<CurveRecord> v) {
    for (CurveRecord& r : v) r.train_seconds = 0;
    std::ostringstream out;
    emit_csv(v, out);
    return out.str();
  };
  std::string serial = strip(run_learning_curve(p, cfg));
  CHECK(strip(run_learning_curve(p, cfg)) == serial);
  cfg.jobs = 3;
  CHECK(strip(run_learning_curve(p, cfg)) == serial);
}

TEST_CASE("grammar accuracy curves coincide") {
  MILProblem p = load_problem(data_path("grammar.milp"));
  ExperimentConfig cfg;
  cfg.steps = 3;
  cfg.sampling_ratios = {0.2, 0.6};
  cfg.deadline_seconds = 10;
  std::vector<CurveRecord> recs = run_learning_curve(p, cfg);
  REQUIRE(recs.size() == 12);
  for (std::size_t i = 0; i < recs.size(); i += 2) {
    CHECK(recs[i].learner == LearnerId::Louise);
    CHECK(recs[i + 1].learner == LearnerId::Baseline);
    CHECK(recs[i].accuracy == recs[i + 1].accuracy);
  }
}
