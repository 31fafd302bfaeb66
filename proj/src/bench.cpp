#include "astar_pursuit/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace astar_pursuit {

TrialRecord make_record(int trial, const std::string& label, const ProblemInstance& problem,
                        const AlgorithmOutcome& outcome, double exact_threshold,
                        double runtime_s) {
  TrialRecord r;
  r.trial = trial;
  r.algo = label;
  r.K = problem.K;
  r.M = static_cast<int>(problem.M());
  r.N = static_cast<int>(problem.N());
  if (!problem.x_true) throw std::invalid_argument("make_record: trial has no ground truth");
  r.nmse = nmse(*problem.x_true, outcome.x_hat);
  r.exact = r.nmse <= exact_threshold;
  r.misidentified = misidentified(support_of(*problem.x_true), outcome.support);
  r.iterations = outcome.iterations;
  r.eq_prunes = outcome.equivalent_prunes;
  r.runtime_s = runtime_s;
  return r;
}

std::vector<TrialRecord> run_cell(const RunConfig& config, const CellObserver& observer,
                                  std::ostream* progress) {
  config.validate();
  const auto algorithms = config.resolved_algorithms();
  const int trials = config.ensemble.trials;
  std::vector<std::vector<TrialRecord>> per_trial(static_cast<std::size_t>(trials));

  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::mutex progress_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const int t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        const ProblemInstance problem = make_trial(config.ensemble, t);
        auto& out = per_trial[static_cast<std::size_t>(t)];
        for (std::size_t a = 0; a < algorithms.size(); ++a) {
          const AlgorithmHooks hooks = observer.hooks ? observer.hooks(t, a) : AlgorithmHooks{};
          const auto start = std::chrono::steady_clock::now();
          const auto outcome = run_algorithm(algorithms[a], problem, hooks);
          const double elapsed =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          if (observer.on_outcome) observer.on_outcome(t, a, problem, outcome);
          out.push_back(make_record(t, algorithms[a].display_name(), problem, outcome,
                                    config.exact_threshold, config.timing ? elapsed : 0.0));
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(trials);
        return;
      }
      const int finished = ++done;
      if (progress && (finished == trials || finished % std::max(1, trials / 10) == 0)) {
        std::lock_guard lock(progress_mutex);
        *progress << "  " << finished << "/" << trials << " trials\n" << std::flush;
      }
    }
  };

  const int jobs = std::max(1, std::min(config.jobs, trials));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<TrialRecord> records;
  records.reserve(static_cast<std::size_t>(trials) * algorithms.size());
  for (auto& rs : per_trial)
    for (auto& r : rs) records.push_back(std::move(r));
  return records;
}

std::vector<EnsembleSummary> summarize_by_algorithm(std::span<const TrialRecord> records,
                                                    DistortionMode mode) {
  std::vector<std::string> order;
  std::vector<std::vector<TrialRecord>> groups;
  for (const auto& r : records) {
    auto it = std::find(order.begin(), order.end(), r.algo);
    if (it == order.end()) {
      order.push_back(r.algo);
      groups.emplace_back();
      groups.back().push_back(r);
    } else {
      groups[static_cast<std::size_t>(it - order.begin())].push_back(r);
    }
  }
  std::vector<EnsembleSummary> out;
  for (const auto& g : groups) out.push_back(summarize(g, mode));
  return out;
}

RunConfig sweep_point(const RunConfig& config, double value) {
  if (!config.axis) return config;
  RunConfig point = config;
  point.axis.reset();
  point.sweep_values.clear();
  const auto as_int = [&] {
    const double r = std::round(value);
    if (r != value) {
      throw std::invalid_argument("sweep: axis " + std::string(to_string(*config.axis)) +
                                  " needs integer values");
    }
    return static_cast<int>(r);
  };
  std::string key;
  switch (*config.axis) {
    case SweepAxis::K:
      point.ensemble.K = as_int();
      return point;
    case SweepAxis::M:
      point.ensemble.M = as_int();
      return point;
    case SweepAxis::Snr:
      point.ensemble.snr_db = value;
      key = "snr";
      break;
    case SweepAxis::Alpha:
      key = "alpha";
      break;
    case SweepAxis::B:
      as_int();
      key = "B";
      break;
    case SweepAxis::P:
      as_int();
      key = "P";
      break;
  }
  for (auto& a : point.algorithms) {
    if (key != "snr") a.overrides[key] = format_real(value);
    a.label += "@" + key + "=" + format_real(value);
  }
  return point;
}

BenchOutput run_benchmark(const RunConfig& config, const CellObserver& observer,
                          std::ostream* progress) {
  BenchOutput out;
  std::vector<double> points = config.axis ? config.sweep_values : std::vector<double>{0.0};
  for (double v : points) {
    const RunConfig point = sweep_point(config, v);
    if (progress) {
      *progress << "cell K=" << point.ensemble.K << " M=" << point.ensemble.M
                << " N=" << point.ensemble.N;
      if (config.axis) *progress << " " << to_string(*config.axis) << "=" << format_real(v);
      *progress << "\n";
    }
    auto records = run_cell(point, observer, progress);
    auto summaries = summarize_by_algorithm(records, config.distortion);
    out.trials.insert(out.trials.end(), records.begin(), records.end());
    out.summaries.insert(out.summaries.end(), summaries.begin(), summaries.end());
  }
  return out;
}

void write_outputs(const RunConfig& config, const BenchOutput& output) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  const auto trials_path = config.out_dir / "trials.csv";
  const auto summary_path = config.out_dir / "summary.csv";
  std::ofstream trials(trials_path, std::ios::binary);
  std::ofstream summary(summary_path, std::ios::binary);
  if (!trials || !summary) {
    throw std::runtime_error("cannot write outputs under " + config.out_dir.string());
  }
  write_trials_csv(trials, output.trials);
  write_summary_csv(summary, output.summaries);
  if (!trials || !summary) throw std::runtime_error("write to " + config.out_dir.string() + " failed");
}

}  // namespace astar_pursuit
