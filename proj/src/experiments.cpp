#include "topmil/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "topmil/datasets.hpp"

namespace topmil {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// Training indices for one side, stratified by predicate with largest
// remainder rounding so the total is floor(ratio*n).
std::vector<char> choose_training(const std::vector<Literal>& examples, double ratio, std::mt19937_64& rng) {
  std::vector<PredicateKey> keys;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto it = std::find(keys.begin(), keys.end(), examples[i].key());
    if (it == keys.end()) {
      keys.push_back(examples[i].key());
      groups.emplace_back();
      it = keys.end() - 1;
    }
    groups[it - keys.begin()].push_back(i);
  }
  const auto total = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(examples.size()) + 1e-9));
  std::vector<std::size_t> quota(groups.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    double exact = ratio * static_cast<double>(groups[g].size());
    quota[g] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    assigned += quota[g];
    remainders.push_back({exact - static_cast<double>(quota[g]), g});
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total && k < remainders.size(); ++k) {
    std::size_t g = remainders[k].second;
    if (quota[g] < groups[g].size()) {
      ++quota[g];
      ++assigned;
    }
  }
  std::vector<char> train(examples.size(), 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<std::size_t> idx = groups[g];
    shuffle(idx, rng);
    for (std::size_t k = 0; k < quota[g]; ++k) train[idx[k]] = 1;
  }
  return train;
}

LearnerConfig with_deadline(LearnerConfig c, double seconds) {
  c.deadline_seconds = seconds;
  return c;
}

}  // namespace

const char* learner_name(LearnerId id) { return id == LearnerId::Louise ? "louise" : "baseline"; }

LearnerId parse_learner(const std::string& text) {
  if (text == "louise") return LearnerId::Louise;
  if (text == "baseline" || text == "metagol") return LearnerId::Baseline;
  throw std::invalid_argument("unknown learner '" + text + "'");
}

Partition sample_partition(const std::vector<Literal>& pos, const std::vector<Literal>& neg, double ratio,
                           std::mt19937_64& rng) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("sampling ratio must lie strictly between 0 and 1");
  std::vector<char> tp = choose_training(pos, ratio, rng);
  std::vector<char> tn = choose_training(neg, ratio, rng);
  Partition p;
  for (std::size_t i = 0; i < pos.size(); ++i) (tp[i] ? p.train_pos : p.test_pos).push_back(pos[i]);
  for (std::size_t i = 0; i < neg.size(); ++i) (tn[i] ? p.train_neg : p.test_neg).push_back(neg[i]);
  if (p.train_pos.empty()) throw std::invalid_argument("sampling ratio leaves no training positives");
  if (p.test_pos.empty() && p.test_neg.empty()) throw std::invalid_argument("sampling ratio leaves no test examples");
  return p;
}

std::mt19937_64 partition_rng(std::uint64_t seed, std::size_t step, std::size_t ratio_index) {
  std::uint64_t state = seed;
  std::uint64_t a = splitmix64(state);
  state = a ^ (static_cast<std::uint64_t>(step) * 0xd1b54a32d192ed03ULL);
  std::uint64_t b = splitmix64(state);
  state = b ^ (static_cast<std::uint64_t>(ratio_index) * 0x8cb92ba72f3d8dd7ULL);
  return std::mt19937_64(splitmix64(state));
}

std::vector<CurveRecord> run_learning_curve(const MILProblem& problem, const ExperimentConfig& config) {
  if (config.steps == 0) throw std::invalid_argument("steps must be positive");
  for (double r : config.sampling_ratios) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("sampling ratio must lie strictly between 0 and 1");
  }
  const std::size_t nr = config.sampling_ratios.size(), nl = config.learners.size();
  const std::size_t cells = nr * config.steps;
  std::vector<CurveRecord> records(cells * nl);

  auto run_cell = [&](std::size_t cell) {
    std::size_t r = cell / config.steps, step = cell % config.steps;
    double ratio = config.sampling_ratios[r];
    std::mt19937_64 rng = partition_rng(config.seed, step, r);
    Partition part = sample_partition(problem.positive, problem.negative, ratio, rng);
    MILProblem train = problem;
    train.positive = part.train_pos;
    train.negative = part.train_neg;
    for (std::size_t l = 0; l < nl; ++l) {
      CurveRecord rec;
      rec.learner = config.learners[l];
      rec.ratio = ratio;
      rec.step = step;
      Hypothesis h;
      auto t0 = Clock::now();
      if (rec.learner == LearnerId::Louise) {
        h = louise_learn(train, with_deadline(config.louise, config.deadline_seconds));
        rec.timed_out = h.deadline_expired;
      } else {
        bool expired = false;
        auto found = metagol_learn(train, with_deadline(config.baseline, config.deadline_seconds), &expired);
        if (found) h = std::move(*found);
        rec.timed_out = expired;
      }
      rec.train_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
      rec.hypothesis_size = h.size();
      rec.accuracy = evaluate(h, problem, part.test_pos, part.test_neg).accuracy;
      records[cell * nl + l] = rec;
    }
  };

  std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, cells));
  if (jobs == 1) {
    for (std::size_t c = 0; c < cells; ++c) run_cell(c);
    return records;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < cells; c = next++) {
        try {
          run_cell(c);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return records;
}

CurveSummary summarize(const std::vector<CurveRecord>& records) {
  std::map<std::pair<int, double>, std::vector<const CurveRecord*>> groups;
  for (const CurveRecord& r : records) groups[{static_cast<int>(r.learner), r.ratio}].push_back(&r);
  CurveSummary out;
  for (const auto& [key, rs] : groups) {
    CurvePoint p;
    p.learner = static_cast<LearnerId>(key.first);
    p.ratio = key.second;
    p.count = rs.size();
    auto stats = [&](auto field, double& mean, double& se) {
      double sum = 0.0;
      for (const CurveRecord* r : rs) sum += field(*r);
      mean = sum / static_cast<double>(rs.size());
      if (rs.size() < 2) {
        se = 0.0;
        return;
      }
      double ss = 0.0;
      for (const CurveRecord* r : rs) ss += (field(*r) - mean) * (field(*r) - mean);
      se = std::sqrt(ss / static_cast<double>(rs.size() - 1)) / std::sqrt(static_cast<double>(rs.size()));
    };
    stats([](const CurveRecord& r) { return r.accuracy; }, p.mean_accuracy, p.stderr_accuracy);
    stats([](const CurveRecord& r) { return r.train_seconds; }, p.mean_seconds, p.stderr_seconds);
    out.push_back(p);
  }
  return out;
}

void emit_csv(const CurveSummary& summary, std::ostream& out) {
  out << "learner,ratio,mean_accuracy,stderr_accuracy,mean_seconds,stderr_seconds\n";
  for (const CurvePoint& p : summary) {
    out << learner_name(p.learner) << ',' << fmt("%g", p.ratio) << ',' << fmt("%.6f", p.mean_accuracy) << ','
        << fmt("%.6f", p.stderr_accuracy) << ',' << fmt("%.6f", p.mean_seconds) << ','
        << fmt("%.6f", p.stderr_seconds) << '\n';
  }
}

void emit_csv(const std::vector<CurveRecord>& records, std::ostream& out) {
  out << "learner,ratio,step,accuracy,train_seconds,timed_out,hypothesis_size\n";
  for (const CurveRecord& r : records) {
    out << learner_name(r.learner) << ',' << fmt("%g", r.ratio) << ',' << r.step << ',' << fmt("%.6f", r.accuracy)
        << ',' << fmt("%.6f", r.train_seconds) << ',' << (r.timed_out ? 1 : 0) << ',' << r.hypothesis_size << '\n';
  }
}

void emit_plot_data(const CurveSummary& summary, LearnerId learner, std::ostream& out) {
  for (const CurvePoint& p : summary) {
    if (p.learner != learner) continue;
    out << fmt("%g", p.ratio) << '\t' << fmt("%.6f", p.mean_accuracy) << '\t' << fmt("%.6f", p.stderr_accuracy)
        << '\n';
  }
}

std::string render_svg(const CurveSummary& summary, const std::string& title) {
  const double w = 640, h = 420, left = 60, right = 20, top = 40, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  auto x_of = [&](double ratio) { return left + ratio * pw; };
  auto y_of = [&](double acc) { return top + (1.0 - std::clamp(acc, 0.0, 1.0)) * ph; };
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n";
  s += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  if (!title.empty()) {
    s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" + title +
         "</text>\n";
  }
  s += "<g stroke=\"black\" fill=\"none\"><line x1=\"" + fmt("%.1f", left) + "\" y1=\"" + fmt("%.1f", top + ph) +
       "\" x2=\"" + fmt("%.1f", left + pw) + "\" y2=\"" + fmt("%.1f", top + ph) + "\"/><line x1=\"" +
       fmt("%.1f", left) + "\" y1=\"" + fmt("%.1f", top) + "\" x2=\"" + fmt("%.1f", left) + "\" y2=\"" +
       fmt("%.1f", top + ph) + "\"/></g>\n";
  s += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 10; ++i) {
    double t = i / 10.0;
    s += "<text x=\"" + fmt("%.1f", x_of(t)) + "\" y=\"" + fmt("%.1f", top + ph + 16) +
         "\" text-anchor=\"middle\">" + fmt("%.1f", t) + "</text>\n";
    s += "<text x=\"" + fmt("%.1f", left - 6) + "\" y=\"" + fmt("%.1f", y_of(t) + 4) + "\" text-anchor=\"end\">" +
         fmt("%.1f", t) + "</text>\n";
  }
  s += "<text x=\"" + fmt("%.1f", left + pw / 2) + "\" y=\"" + fmt("%.1f", h - 10) +
       "\" text-anchor=\"middle\">training partition ratio</text>\n";
  s += "<text x=\"16\" y=\"" + fmt("%.1f", top + ph / 2) + "\" transform=\"rotate(-90 16 " +
       fmt("%.1f", top + ph / 2) + ")\" text-anchor=\"middle\">accuracy</text>\n</g>\n";
  const char* colours[] = {"#1f77b4", "#d62728"};
  for (LearnerId id : {LearnerId::Louise, LearnerId::Baseline}) {
    std::vector<const CurvePoint*> pts;
    for (const CurvePoint& p : summary) {
      if (p.learner == id) pts.push_back(&p);
    }
    if (pts.empty()) continue;
    const char* colour = colours[static_cast<int>(id)];
    s += "<polyline class=\"" + std::string(learner_name(id)) + "\" fill=\"none\" stroke=\"" + colour +
         "\" stroke-width=\"2\" points=\"";
    for (const CurvePoint* p : pts) s += fmt("%.1f", x_of(p->ratio)) + "," + fmt("%.1f", y_of(p->mean_accuracy)) + " ";
    s += "\"/>\n";
    for (const CurvePoint* p : pts) {
      double x = x_of(p->ratio);
      s += "<line stroke=\"" + std::string(colour) + "\" x1=\"" + fmt("%.1f", x) + "\" y1=\"" +
           fmt("%.1f", y_of(p->mean_accuracy - p->stderr_accuracy)) + "\" x2=\"" + fmt("%.1f", x) + "\" y2=\"" +
           fmt("%.1f", y_of(p->mean_accuracy + p->stderr_accuracy)) + "\"/>\n";
    }
    double ly = top + 14 + 16 * static_cast<int>(id);
    s += "<text x=\"" + fmt("%.1f", left + pw - 90) + "\" y=\"" + fmt("%.1f", ly) +
         "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + colour + "\">" + learner_name(id) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace topmil
