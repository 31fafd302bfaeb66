// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "astar_pursuit/astar_search.hpp"
#include "astar_pursuit/baselines.hpp"
#include "astar_pursuit/bench.hpp"
#include "astar_pursuit/config.hpp"
#include "astar_pursuit/cost_model.hpp"
#include "astar_pursuit/image_blocks.hpp"
#include "astar_pursuit/synth.hpp"

namespace ap = astar_pursuit;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 1;

// Lines are printed in criterion order once everything has run.
std::map<int, std::string> lines;
int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  char head[64];
  std::snprintf(head, sizeof head, "%s  %2d %-24s ", pass ? "PASS" : "FAIL", id, name.c_str());
  lines[id] = head + detail;
  std::fprintf(stderr, "criterion %d done\n", id);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Shared audits over every run in the suite.
struct Audit {
  // Residue orthogonality.
  std::size_t projections = 0;
  std::size_t ortho_violations = 0;
  double worst_ortho = 0.0;  // max |<r, s>| / ||y||
  // Iteration bound for B = 2 searches.
  std::size_t bounded_runs = 0;
  std::size_t bound_violations = 0;

  void projection(const ap::Matrix& dict, double y_norm, std::span<const ap::AtomIndex> atoms,
                  const ap::Vector& r) {
    ++projections;
    const double scale = y_norm > 0.0 ? y_norm : 1.0;
    for (ap::AtomIndex a : atoms) {
      const double rel = std::abs(dict.col(a).dot(r)) / scale;
      worst_ortho = std::max(worst_ortho, rel);
      if (rel > 1e-8) ++ortho_violations;
    }
  }

  void iterations(int I, int K, std::size_t iters) {
    ++bounded_runs;
    const std::uint64_t bound =
        static_cast<std::uint64_t>(I) * ((std::uint64_t{1} << (K - 1)) - 1);
    if (iters > bound) ++bound_violations;
  }
};

Audit audit;

ap::ProjectionObserver orthogonality(std::shared_ptr<const ap::ProblemInstance> problem) {
  const double y_norm = problem->y.norm();
  return [problem, y_norm](std::span<const ap::AtomIndex> atoms, const ap::Vector& r) {
    audit.projection(problem->phi, y_norm, atoms, r);
  };
}

ap::AlgorithmHooks audited_hooks(std::shared_ptr<const ap::ProblemInstance> problem) {
  ap::AlgorithmHooks hooks;
  hooks.on_projection = orthogonality(problem);
  hooks.search.on_projection = hooks.on_projection;
  return hooks;
}

// Problem cache so observers can see the instance a trial runs on.
std::shared_ptr<const ap::ProblemInstance> trial_problem(const ap::EnsembleSpec& spec, int trial) {
  return std::make_shared<const ap::ProblemInstance>(ap::make_trial(spec, trial));
}

std::vector<ap::AtomIndex> sorted(std::vector<ap::AtomIndex> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Least-squares residue of y on the given columns, solved from scratch.
ap::Vector fresh_residue(const ap::ProblemInstance& p, std::span<const ap::AtomIndex> atoms) {
  ap::Matrix S(p.M(), static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t j = 0; j < atoms.size(); ++j) S.col(static_cast<Eigen::Index>(j)) = p.phi.col(atoms[j]);
  const ap::Vector c = S.colPivHouseholderQr().solve(p.y);
  return p.y - S * c;
}

// ---------------------------------------------------------------------------

void unit_beam_equals_omp() {
  Stopwatch clock;
  ap::EnsembleSpec spec;
  spec.N = 64;
  spec.M = 32;
  spec.K = 5;
  spec.trials = 200;
  spec.seed = kSeed;
  const ap::CostModel models[] = {ap::CostModel::additive(1.25), ap::CostModel::adaptive(1.25),
                                  ap::CostModel::multiplicative(0.8)};
  int identical = 0;
  int runs = 0;
  for (int t = 0; t < spec.trials; ++t) {
    const auto problem = trial_problem(spec, t);
    ap::OmpOptions opts;
    opts.on_projection = orthogonality(problem);
    const auto omp = ap::recover_omp(*problem, spec.K, opts);
    for (const auto& model : models) {
      ap::SearchParams params;
      params.I = 1;
      params.B = 1;
      params.P = 1;
      params.model = model;
      ap::SearchHooks hooks;
      hooks.on_projection = orthogonality(problem);
      const auto r = ap::recover_astar_omp(*problem, params, hooks);
      ++runs;
      if (r.support == omp.support) ++identical;
    }
  }
  const double secs = clock.seconds();
  report(1, "omp-equivalence", identical == runs && secs < 5.0,
         std::to_string(identical) + "/" + std::to_string(runs) + " identical sequences, " +
             fmt("%.2f s (limit 5 s)", secs));
}

void brute_force_oracle() {
  Stopwatch clock;
  ap::EnsembleSpec spec;
  spec.N = 16;
  spec.M = 10;
  spec.K = 2;
  spec.trials = 100;
  spec.seed = kSeed;
  spec.coeff_dist = ap::CoeffDist::Uniform;
  int unique = 0;
  int astar_hits = 0;
  int omp_hits = 0;
  for (int t = 0; t < spec.trials; ++t) {
    const auto problem = trial_problem(spec, t);
    const auto& p = *problem;
    // Exhaustive l0 search over every pair.
    int zero_residue = 0;
    std::vector<ap::AtomIndex> best;
    for (ap::AtomIndex a = 0; a < p.N(); ++a) {
      for (ap::AtomIndex b = a + 1; b < p.N(); ++b) {
        const std::vector<ap::AtomIndex> pair{a, b};
        if (fresh_residue(p, pair).norm() < 1e-10 * p.y.norm()) {
          ++zero_residue;
          best = pair;
        }
      }
    }
    if (zero_residue != 1) continue;
    ++unique;

    ap::SearchParams params;
    params.P = 50;
    params.model = ap::CostModel::multiplicative(0.8);
    ap::SearchHooks hooks;
    hooks.on_projection = orthogonality(problem);
    const auto r = ap::recover_astar_omp(p, params, hooks);
    audit.iterations(params.I, spec.K, r.iterations);
    if (sorted(r.support) == best) ++astar_hits;

    ap::OmpOptions opts;
    opts.on_projection = orthogonality(problem);
    if (sorted(ap::recover_omp(p, spec.K, opts).support) == best) ++omp_hits;
  }
  const double secs = clock.seconds();
  const double rate = unique ? static_cast<double>(astar_hits) / unique : 0.0;
  const double omp_rate = unique ? static_cast<double>(omp_hits) / unique : 0.0;
  const bool pass = unique > 0 && rate >= 0.95 && omp_rate - rate <= 0.02 && secs < 30.0;
  report(2, "brute-force-oracle", pass,
         std::to_string(unique) + " unique optima, mul-aomp " + fmt("%.3f", rate) +
             " (need >= 0.95), omp " + fmt("%.3f", omp_rate) + ", " + fmt("%.2f s", secs));
}

// Criterion 3 run and its instrumentation for criteria 4, 6, 7 and 8.
struct PruneAudit {
  std::size_t events = 0;
  std::size_t unknown_key = 0;
  std::size_t sampled = 0;
  std::size_t replay_mismatch = 0;
  double worst_replay = 0.0;
};

struct UniformRun {
  std::vector<ap::TrialRecord> records;
  std::vector<ap::EnsembleSummary> summaries;
  double seconds = 0.0;
};

ap::RunConfig desk_scale_config() {
  ap::RunConfig cfg = ap::default_config();  // omp, sp, mul-aomp
  cfg.ensemble.N = 256;
  cfg.ensemble.M = 100;
  cfg.ensemble.K = 30;
  cfg.ensemble.trials = 200;
  cfg.ensemble.coeff_dist = ap::CoeffDist::Uniform;
  cfg.ensemble.seed = kSeed;
  cfg.jobs = 1;
  return cfg;
}

UniformRun run_desk_scale(PruneAudit& prunes) {
  const ap::RunConfig cfg = desk_scale_config();
  const auto algos = cfg.resolved_algorithms();
  Stopwatch clock;
  ap::CellObserver observer;
  observer.hooks = [&](int trial, std::size_t algo) {
    auto problem = trial_problem(cfg.ensemble, trial);
    ap::AlgorithmHooks hooks = audited_hooks(problem);
    if (!ap::is_astar(algos[algo].id)) return hooks;

    // Independent record of every materialized atom set and its residue.
    auto seen = std::make_shared<std::map<std::vector<ap::AtomIndex>, ap::Vector>>();
    auto ortho = hooks.search.on_projection;
    hooks.search.on_projection = [seen, ortho](std::span<const ap::AtomIndex> atoms,
                                               const ap::Vector& r) {
      ortho(atoms, r);
      std::vector<ap::AtomIndex> key(atoms.begin(), atoms.end());
      std::sort(key.begin(), key.end());
      seen->emplace(std::move(key), r);
    };
    hooks.search.on_equivalent_prune = [seen, problem, &prunes](const ap::EquivalentPrune& e) {
      const std::size_t n = prunes.events++;
      const std::vector<ap::AtomIndex> key(e.key.begin(), e.key.end());
      const auto it = seen->find(key);
      if (it == seen->end()) {
        ++prunes.unknown_key;
        return;
      }
      if (n % 100 != 0) return;
      ++prunes.sampled;
      std::vector<ap::AtomIndex> candidate(e.parent_atoms.begin(), e.parent_atoms.end());
      candidate.push_back(e.candidate);
      const ap::Vector implied = fresh_residue(*problem, candidate);
      const double rel = (implied - it->second).norm() / problem->y.norm();
      prunes.worst_replay = std::max(prunes.worst_replay, rel);
      if (rel > 1e-8) ++prunes.replay_mismatch;
    };
    return hooks;
  };
  observer.on_outcome = [&](int, std::size_t algo, const ap::ProblemInstance&,
                            const ap::AlgorithmOutcome& outcome) {
    if (ap::is_astar(algos[algo].id) && algos[algo].B == 2) {
      audit.iterations(algos[algo].I, cfg.ensemble.K, outcome.iterations);
    }
  };
  UniformRun out;
  out.records = ap::run_cell(cfg, observer);
  out.seconds = clock.seconds();
  out.summaries = ap::summarize_by_algorithm(out.records, cfg.distortion);
  return out;
}

const ap::EnsembleSummary& find(const std::vector<ap::EnsembleSummary>& s, const std::string& label) {
  for (const auto& e : s)
    if (e.algo == label) return e;
  throw std::logic_error("missing summary for " + label);
}

void desk_scale_ordering(const UniformRun& run) {
  const auto& omp = find(run.summaries, "omp");
  const auto& sp = find(run.summaries, "sp");
  const auto& mul = find(run.summaries, "mul-aomp");
  const bool pass = mul.mean_nmse < omp.mean_nmse && mul.mean_nmse < sp.mean_nmse &&
                    mul.exact_rate >= omp.exact_rate && run.seconds < 600.0;
  report(3, "uniform-k30-ordering", pass,
         "nmse mul " + fmt("%.4g", mul.mean_nmse) + " omp " + fmt("%.4g", omp.mean_nmse) + " sp " +
             fmt("%.4g", sp.mean_nmse) + "; exact mul " + fmt("%.3f", mul.exact_rate) + " omp " +
             fmt("%.3f", omp.exact_rate) + "; " + fmt("%.1f s (limit 600 s)", run.seconds));
}

void failure_profile(const UniformRun& run) {
  const auto& sp = find(run.summaries, "sp");
  const auto& mul = find(run.summaries, "mul-aomp");
  const double m = mul.mean_misidentified_per_failure();
  const double s = sp.mean_misidentified_per_failure();
  report(4, "failure-profile", m <= 4.0 && s >= 8.0,
         "missed per failure: mul-aomp " + fmt("%.2f", m) + " (<= 4), sp " + fmt("%.2f", s) +
             " (>= 8)");
}

void iteration_brackets() {
  Stopwatch clock;
  struct Bracket {
    int K;
    double lo;
    double hi;
    double mean = 0.0;
  };
  std::vector<Bracket> brackets{{10, 5.0, 50.0}, {20, 50.0, 600.0}};
  for (auto& b : brackets) {
    ap::RunConfig cfg = ap::default_config();
    cfg.algorithms = {{"mul-aomp", ap::AlgorithmId::MulAstar, {}}};
    cfg.ensemble.K = b.K;
    cfg.ensemble.trials = 100;
    cfg.ensemble.seed = kSeed;
    ap::CellObserver observer;
    observer.hooks = [&](int trial, std::size_t) {
      return audited_hooks(trial_problem(cfg.ensemble, trial));
    };
    observer.on_outcome = [&](int, std::size_t, const ap::ProblemInstance&,
                              const ap::AlgorithmOutcome& o) {
      audit.iterations(cfg.search.I, b.K, o.iterations);
    };
    const auto records = ap::run_cell(cfg, observer);
    b.mean = ap::summarize(records).mean_iters;
  }
  const double secs = clock.seconds();
  bool pass = secs < 300.0;
  std::string detail;
  for (const auto& b : brackets) {
    pass = pass && b.mean >= b.lo && b.mean <= b.hi;
    detail += "K=" + std::to_string(b.K) + " mean " + fmt("%.2f", b.mean) + " in [" +
              fmt("%g", b.lo) + ", " + fmt("%g", b.hi) + "]; ";
  }
  report(5, "iteration-brackets", pass, detail + fmt("%.1f s", secs));
}

void iteration_bound() {
  report(6, "iteration-upper-bound", audit.bound_violations == 0 && audit.bounded_runs > 0,
         std::to_string(audit.bounded_runs) + " B=2 runs, " +
             std::to_string(audit.bound_violations) + " above I*(2^(K-1)-1)");
}

void pruning_soundness(const PruneAudit& p) {
  const bool pass = p.events > 0 && p.unknown_key == 0 && p.sampled > 0 && p.replay_mismatch == 0;
  report(7, "pruning-soundness", pass,
         std::to_string(p.events) + " prunes, " + std::to_string(p.unknown_key) +
             " with unseen keys; " + std::to_string(p.sampled) + " replayed, worst " +
             fmt("%.2e", p.worst_replay) + " (<= 1e-8)");
}

void image_ordering() {
  Stopwatch clock;
  const int K = 14;
  const int M = 32;
  const ap::GrayImage reference = ap::sparsify_image(ap::synthetic_image(64, 64, kSeed), K);
  ap::Rng rng = ap::Rng::stream(kSeed, 3, 0);
  const ap::Matrix phi = ap::gen_matrix(M, ap::kBlockPixels, ap::MatrixKind::Gaussian, false, rng);
  const ap::BlockHooks hooks = [](int, int, const ap::ProblemInstance& p) {
    return audited_hooks(std::make_shared<const ap::ProblemInstance>(p));
  };

  const auto psnr_of = [&](ap::AlgorithmId id, int B) {
    ap::AlgorithmConfig cfg;
    cfg.id = id;
    cfg.alpha = 0.5;
    cfg.B = B;
    return ap::psnr(reference, ap::reconstruct_image(reference, phi, cfg, K, hooks).image);
  };
  const double mul2 = psnr_of(ap::AlgorithmId::MulAstar, 2);
  const double mul3 = psnr_of(ap::AlgorithmId::MulAstar, 3);
  const double omp = psnr_of(ap::AlgorithmId::Omp, 2);
  const double sp = psnr_of(ap::AlgorithmId::Sp, 2);
  const double secs = clock.seconds();
  const bool pass = mul2 > omp && omp > sp && mul3 >= mul2 - 0.1 && secs < 300.0;
  report(9, "image-psnr-ordering", pass,
         "psnr mul B=2 " + fmt("%.2f", mul2) + " > omp " + fmt("%.2f", omp) + " > sp " +
             fmt("%.2f", sp) + "; mul B=3 " + fmt("%.2f", mul3) + "; " + fmt("%.1f s", secs));
}

void noise_robustness() {
  Stopwatch clock;
  ap::RunConfig cfg = ap::default_config();
  cfg.ensemble.K = 25;
  cfg.ensemble.trials = 100;
  cfg.ensemble.coeff_dist = ap::CoeffDist::Gaussian;
  cfg.ensemble.snr_db = 30.0;
  cfg.ensemble.seed = kSeed;
  ap::CellObserver observer;
  observer.hooks = [&](int trial, std::size_t) {
    return audited_hooks(trial_problem(cfg.ensemble, trial));
  };
  const auto records = ap::run_cell(cfg, observer);
  const auto summaries = ap::summarize_by_algorithm(records, cfg.distortion);
  const double mul = find(summaries, "mul-aomp").distortion_db;
  const double omp = find(summaries, "omp").distortion_db;
  const double sp = find(summaries, "sp").distortion_db;
  const double secs = clock.seconds();
  report(10, "noise-robustness", mul <= omp && mul <= sp && secs < 300.0,
         "distortion dB mul " + fmt("%.2f", mul) + " omp " + fmt("%.2f", omp) + " sp " +
             fmt("%.2f", sp) + "; " + fmt("%.1f s", secs));
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void determinism(const UniformRun& first) {
  const fs::path root = fs::temp_directory_path() / "astar_pursuit_acceptance";
  fs::remove_all(root);
  ap::RunConfig a = desk_scale_config();
  a.out_dir = root / "a";
  ap::write_outputs(a, {first.records, first.summaries});

  ap::RunConfig b = desk_scale_config();
  b.out_dir = root / "b";
  ap::write_outputs(b, ap::run_benchmark(b));

  const std::string ta = read_file(a.out_dir / "trials.csv");
  const std::string tb = read_file(b.out_dir / "trials.csv");
  report(11, "determinism", !ta.empty() && ta == tb,
         std::to_string(ta.size()) + " bytes, " + (ta == tb ? "identical" : "different"));
  fs::remove_all(root);
}

void cost_model_suite() {
  const double eps = std::numeric_limits<double>::epsilon();
  bool pass = true;
  std::string detail;
  const auto check = [&](const char* what, double got, double want, double scale) {
    const bool ok = std::abs(got - want) <= 4.0 * eps * scale;
    pass = pass && ok;
    if (!ok) detail += std::string(what) + " = " + fmt("%.17g", got) + "; ";
  };
  // Tolerances scale with the operand magnitudes of each formula.
  check("additive", ap::cost(ap::CostModel::additive(1.25), {0.5, 0.6, 1.0, 10, 5}), -0.125,
        0.5 + 0.625);
  check("adaptive", ap::cost(ap::CostModel::adaptive(1.25), {0.5, 0.6, 1.0, 10, 5}), -0.125,
        0.5 + 0.625);
  check("multiplicative", ap::cost(ap::CostModel::multiplicative(0.8), {0.5, 0.6, 1.0, 10, 8}),
        0.32, 0.32);
  for (const auto& m : {ap::CostModel::additive(1.25), ap::CostModel::adaptive(1.25),
                        ap::CostModel::multiplicative(0.8)}) {
    for (double r : {0.0, 0.37, 1.0, 12.5}) {
      if (ap::cost(m, {r, r + 0.3, 2.0, 10, 10}) != r) {
        pass = false;
        detail += "complete path (" + std::string(ap::to_string(m.kind)) + ") != r; ";
      }
    }
  }
  report(12, "cost-model-suite", pass, detail.empty() ? "examples exact, complete paths cost ||r||" : detail);
}

}  // namespace

int main() {
  try {
    unit_beam_equals_omp();
    brute_force_oracle();
    PruneAudit prunes;
    const UniformRun desk = run_desk_scale(prunes);
    desk_scale_ordering(desk);
    failure_profile(desk);
    iteration_brackets();
    iteration_bound();
    pruning_soundness(prunes);
    image_ordering();
    noise_robustness();
    report(8, "residue-orthogonality", audit.ortho_violations == 0 && audit.projections > 0,
           std::to_string(audit.projections) + " projections, worst |<r,s>|/||y|| " +
               fmt("%.2e", audit.worst_ortho));
    determinism(desk);
    cost_model_suite();
  } catch (const std::exception& e) {
    for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
    std::printf("FAIL  acceptance aborted: %s\n", e.what());
    return 1;
  }
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
