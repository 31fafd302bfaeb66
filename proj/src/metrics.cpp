#include "astar_pursuit/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace astar_pursuit {

double nmse(const Vector& x_true, const Vector& x_hat) {
  if (x_true.size() != x_hat.size()) throw DimensionError("nmse: length mismatch");
  const double denom = x_true.norm();
  if (!(denom > 0.0)) throw std::domain_error("nmse: true signal has zero norm");
  return (x_hat - x_true).norm() / denom;
}

bool is_exact(const Vector& x_true, const Vector& x_hat, double threshold) {
  return nmse(x_true, x_hat) <= threshold;
}

std::size_t misidentified(std::span<const AtomIndex> support_true,
                          std::span<const AtomIndex> support_hat) {
  std::vector<AtomIndex> hat(support_hat.begin(), support_hat.end());
  std::sort(hat.begin(), hat.end());
  std::size_t missing = 0;
  for (AtomIndex n : support_true) {
    if (!std::binary_search(hat.begin(), hat.end(), n)) ++missing;
  }
  return missing;
}

std::vector<AtomIndex> support_of(const Vector& x) {
  std::vector<AtomIndex> out;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) out.push_back(i);
  }
  return out;
}

double EnsembleSummary::mean_misidentified_per_failure() const {
  std::size_t failures = 0;
  std::size_t total = 0;
  for (const auto& [count, trials] : misidentified_histogram) {
    failures += trials;
    total += count * trials;
  }
  return failures == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(failures);
}

double distortion_db(std::span<const TrialRecord> records, DistortionMode mode) {
  if (records.empty()) throw std::invalid_argument("distortion_db: no records");
  const bool all_exact =
      std::all_of(records.begin(), records.end(), [](const TrialRecord& r) { return r.exact; });
  if (all_exact) return -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (const auto& r : records) {
    const double sq = r.nmse * r.nmse;
    acc += mode == DistortionMode::DbOfMean ? sq : 10.0 * std::log10(sq);
  }
  acc /= static_cast<double>(records.size());
  return mode == DistortionMode::DbOfMean ? 10.0 * std::log10(acc) : acc;
}

EnsembleSummary summarize(std::span<const TrialRecord> records, DistortionMode mode) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  EnsembleSummary s;
  s.algo = records.front().algo;
  s.K = records.front().K;
  s.M = records.front().M;
  s.N = records.front().N;
  s.trials = records.size();
  std::size_t exact = 0;
  for (const auto& r : records) {
    s.mean_nmse += r.nmse;
    s.mean_iters += static_cast<double>(r.iterations);
    s.mean_eq_prunes += static_cast<double>(r.eq_prunes);
    if (r.exact) {
      ++exact;
    } else {
      ++s.misidentified_histogram[r.misidentified];
      s.failure_nmse.push_back(r.nmse);
    }
  }
  const auto n = static_cast<double>(records.size());
  s.mean_nmse /= n;
  s.mean_iters /= n;
  s.mean_eq_prunes /= n;
  s.exact_rate = static_cast<double>(exact) / n;
  s.distortion_db = distortion_db(records, mode);
  return s;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records) {
  out << kTrialsHeader << '\n';
  for (const auto& r : records) {
    out << r.trial << ',' << r.algo << ',' << r.K << ',' << r.M << ',' << r.N << ','
        << format_real(r.nmse) << ',' << (r.exact ? 1 : 0) << ',' << r.misidentified << ','
        << r.iterations << ',' << r.eq_prunes << ',' << format_real(r.runtime_s) << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const EnsembleSummary> summaries) {
  out << kSummaryHeader << '\n';
  for (const auto& s : summaries) {
    out << s.algo << ',' << s.K << ',' << s.M << ',' << s.N << ',' << s.trials << ','
        << format_real(s.mean_nmse) << ',' << format_real(s.exact_rate) << ','
        << format_real(s.distortion_db) << ',' << format_real(s.mean_iters) << ','
        << format_real(s.mean_eq_prunes) << '\n';
  }
}

}  // namespace astar_pursuit
