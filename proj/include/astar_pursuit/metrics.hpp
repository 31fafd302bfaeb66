// Per-trial error measures and ensemble aggregation.
#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "astar_pursuit/linalg.hpp"

namespace astar_pursuit {

/// Default exactness threshold on the per-trial NMSE.
inline constexpr double kExactNmse = 1e-5;

/// ||x_hat - x_true|| / ||x_true||. Throws std::domain_error for a zero truth.
double nmse(const Vector& x_true, const Vector& x_hat);

bool is_exact(const Vector& x_true, const Vector& x_hat, double threshold = kExactNmse);

/// |support_true \ support_hat|.
std::size_t misidentified(std::span<const AtomIndex> support_true,
                          std::span<const AtomIndex> support_hat);

/// Indices of the nonzero entries, ascending.
std::vector<AtomIndex> support_of(const Vector& x);

struct TrialRecord {
  int trial = 0;
  std::string algo;
  int K = 0;
  int M = 0;
  int N = 0;
  double nmse = 0.0;
  bool exact = false;
  std::size_t misidentified = 0;
  std::size_t iterations = 0;
  std::size_t eq_prunes = 0;
  double runtime_s = 0.0;
};

enum class DistortionMode {
  DbOfMean,   // 10 log10(mean of squared ratios)
  MeanOfDb,   // mean over trials of 10 log10(squared ratio)
};

struct EnsembleSummary {
  std::string algo;
  int K = 0;
  int M = 0;
  int N = 0;
  std::size_t trials = 0;
  double mean_nmse = 0.0;
  double exact_rate = 0.0;
  double distortion_db = 0.0;
  double mean_iters = 0.0;
  double mean_eq_prunes = 0.0;
  /// misidentified count -> number of non-exact trials with that count
  std::map<std::size_t, std::size_t> misidentified_histogram;
  /// NMSE of each non-exact trial, in trial order (error-density export)
  std::vector<double> failure_nmse;

  double mean_misidentified_per_failure() const;
};

/// Folds the records of one algorithm. Throws if `records` is empty.
EnsembleSummary summarize(std::span<const TrialRecord> records,
                          DistortionMode mode = DistortionMode::DbOfMean);

/// 10 log10 of the mean squared NMSE; -infinity when every trial is exact.
double distortion_db(std::span<const TrialRecord> records,
                     DistortionMode mode = DistortionMode::DbOfMean);

inline constexpr const char* kTrialsHeader =
    "trial,algo,K,M,N,nmse,exact,misidentified,iterations,eq_prunes,runtime_s";
inline constexpr const char* kSummaryHeader =
    "algo,K,M,N,trials,mean_nmse,exact_rate,distortion_db,mean_iters,mean_eq_prunes";

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite.
std::string format_real(double v);

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records);
void write_summary_csv(std::ostream& out, std::span<const EnsembleSummary> summaries);

}  // namespace astar_pursuit
