// Seeded Monte Carlo harness: trials x algorithms, optionally swept along
// one parameter axis, with trial-index-ordered output.
#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "astar_pursuit/config.hpp"

namespace astar_pursuit {

/// Optional instrumentation. With jobs > 1 the callbacks run on worker
/// threads and must be thread-safe.
struct CellObserver {
  std::function<AlgorithmHooks(int trial, std::size_t algo)> hooks;
  std::function<void(int trial, std::size_t algo, const ProblemInstance& problem,
                     const AlgorithmOutcome& outcome)>
      on_outcome;
};

/// One trial of one algorithm turned into a record.
TrialRecord make_record(int trial, const std::string& label, const ProblemInstance& problem,
                        const AlgorithmOutcome& outcome, double exact_threshold,
                        double runtime_s);

/// Runs every trial of `config.ensemble` through every algorithm. Records
/// are ordered by trial, then by algorithm position, whatever `jobs` is.
std::vector<TrialRecord> run_cell(const RunConfig& config, const CellObserver& observer = {},
                                  std::ostream* progress = nullptr);

/// One summary per algorithm label, in first-appearance order.
std::vector<EnsembleSummary> summarize_by_algorithm(std::span<const TrialRecord> records,
                                                    DistortionMode mode);

/// The config for one sweep point. Alpha/B/P/snr points relabel algorithms as
/// "<label>@<axis>=<value>" so CSV rows stay distinguishable.
RunConfig sweep_point(const RunConfig& config, double value);

struct BenchOutput {
  std::vector<TrialRecord> trials;
  std::vector<EnsembleSummary> summaries;
};

/// run_cell for a plain benchmark, or one cell per value when an axis is set.
BenchOutput run_benchmark(const RunConfig& config, const CellObserver& observer = {},
                          std::ostream* progress = nullptr);

/// Writes trials.csv and summary.csv into config.out_dir (created if needed).
void write_outputs(const RunConfig& config, const BenchOutput& output);

}  // namespace astar_pursuit
