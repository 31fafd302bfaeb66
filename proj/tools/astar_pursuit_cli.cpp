// astar-pursuit: sparse recovery runs, seeded benchmarks, parameter sweeps
// and block-image reconstruction.
//
// Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "astar_pursuit/bench.hpp"
#include "astar_pursuit/image_blocks.hpp"

namespace ap = astar_pursuit;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("ASTAR_PURSUIT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("ASTAR_PURSUIT_SEED is not an integer: ") + env);
    }
  }
  return 1;
}

// Flags shared by every subcommand that runs an algorithm.
struct AlgoFlags {
  std::vector<std::string> algos;
  std::optional<int> I, B, P;
  std::optional<double> alpha, beta;
  std::optional<std::size_t> max_iterations;
  std::optional<std::string> equivalence;

  void attach(CLI::App* app, bool multiple) {
    auto* opt = app->add_option("--algo", algos, "omp | sp | add-aomp | adap-aomp | mul-aomp")
                    ->delimiter(',');
    if (!multiple) opt->expected(1);
    app->add_option("--I", I, "initial paths");
    app->add_option("--B", B, "extensions per path");
    app->add_option("--P", P, "beam width");
    app->add_option("--alpha", alpha, "multiplicative cost parameter");
    app->add_option("--beta", beta, "additive/adaptive cost parameter");
    app->add_option("--max-iterations", max_iterations, "A*OMP iteration cap (0 = 10*I*K*P)");
    app->add_option("--equivalence", equivalence, "trie | live");
  }

  void apply(ap::SearchDefaults& s) const {
    if (I) s.I = *I;
    if (B) s.B = *B;
    if (P) s.P = *P;
    if (alpha) s.alpha = *alpha;
    if (beta) s.beta = *beta;
    if (max_iterations) s.max_iterations = *max_iterations;
    if (equivalence) {
      if (*equivalence == "trie") s.equivalence = ap::EquivalenceMode::VisitedTrie;
      else if (*equivalence == "live") s.equivalence = ap::EquivalenceMode::LiveSlots;
      else throw UsageError("--equivalence must be 'trie' or 'live'");
    }
  }

  std::vector<ap::AlgorithmEntry> entries() const {
    std::vector<ap::AlgorithmEntry> out;
    for (const auto& name : algos) {
      try {
        out.push_back({name, ap::parse_algorithm(name), {}});
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
    return out;
  }
};

// Ensemble flags; unset ones leave the config untouched.
struct EnsembleFlags {
  std::optional<int> N, M, K, trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> matrix, dist, sharing;
  std::optional<double> snr_db;
  bool normalize = false;

  void attach(CLI::App* app) {
    app->add_option("--N", N, "signal length");
    app->add_option("--M", M, "observation length");
    app->add_option("--K", K, "sparsity");
    app->add_option("--trials", trials, "number of trials");
    app->add_option("--seed", seed, "base seed (default $ASTAR_PURSUIT_SEED or 1)");
    app->add_option("--matrix", matrix, "gaussian | bernoulli");
    app->add_option("--dist", dist, "uniform | gaussian | binary");
    app->add_option("--sharing", sharing, "per_sample | shared");
    app->add_option("--snr-db", snr_db, "observation SNR in dB (omit for noiseless)");
    app->add_flag("--normalize-columns", normalize, "scale matrix columns to unit norm");
  }

  void apply(ap::EnsembleSpec& e) const {
    try {
      if (N) e.N = *N;
      if (M) e.M = *M;
      if (K) e.K = *K;
      if (trials) e.trials = *trials;
      if (seed) e.seed = *seed;
      if (matrix) e.matrix_kind = ap::parse_matrix_kind(*matrix);
      if (dist) e.coeff_dist = ap::parse_coeff_dist(*dist);
      if (sharing) e.matrix_sharing = ap::parse_matrix_sharing(*sharing);
    } catch (const std::invalid_argument& ex) {
      throw UsageError(ex.what());
    }
    if (snr_db) e.snr_db = *snr_db;
    if (normalize) e.normalize_columns = true;
  }
};

// "N=64,M=32,K=5" -> ensemble fields.
void apply_gen_spec(const std::string& spec, ap::EnsembleSpec& e) {
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--gen expects key=value pairs, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    int value = 0;
    try {
      value = std::stoi(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--gen value for " + key + " is not an integer");
    }
    if (key == "N") e.N = value;
    else if (key == "M") e.M = value;
    else if (key == "K") e.K = value;
    else throw UsageError("--gen accepts N, M and K, not '" + key + "'");
  }
}

std::string join_support(std::vector<ap::AtomIndex> support) {
  std::sort(support.begin(), support.end());
  std::string out;
  for (auto n : support) {
    if (!out.empty()) out += ' ';
    out += std::to_string(n);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct RecoverCmd {
  AlgoFlags algo;
  EnsembleFlags ensemble;
  std::string gen;
  std::string problem_file;
  std::string save_problem;
  int trial = 0;
  std::string out;

  int run() const {
    ap::RunConfig cfg = ap::default_config();
    cfg.ensemble.seed = default_seed();
    cfg.ensemble.trials = 1;
    if (!gen.empty()) apply_gen_spec(gen, cfg.ensemble);
    ensemble.apply(cfg.ensemble);
    algo.apply(cfg.search);
    cfg.algorithms = algo.algos.empty()
                         ? std::vector<ap::AlgorithmEntry>{{"mul-aomp", ap::AlgorithmId::MulAstar, {}}}
                         : algo.entries();
    const auto config = cfg.resolved_algorithms().front();

    ap::ProblemInstance problem;
    std::string origin;
    if (!problem_file.empty()) {
      std::ifstream in(problem_file);
      if (!in) throw std::runtime_error("cannot open problem file " + problem_file);
      problem = ap::read_problem(in);
      if (ensemble.K) problem.K = *ensemble.K;
      origin = "file " + problem_file;
    } else {
      cfg.ensemble.validate();
      problem = ap::make_trial(cfg.ensemble, trial);
      origin = "generated seed=" + std::to_string(cfg.ensemble.seed) +
               " trial=" + std::to_string(trial) + " dist=" +
               std::string(ap::to_string(cfg.ensemble.coeff_dist)) +
               " matrix=" + std::string(ap::to_string(cfg.ensemble.matrix_kind));
    }
    problem.validate();
    if (!save_problem.empty()) {
      std::ofstream os(save_problem);
      if (!os) throw std::runtime_error("cannot write " + save_problem);
      ap::write_problem(os, problem);
    }

    const auto outcome = ap::run_algorithm(config, problem);

    std::cout << "algorithm: " << config.display_name() << '\n';
    if (ap::is_astar(config.id)) {
      const auto model = config.cost_model();
      std::cout << "cost_model: " << ap::to_string(model.kind);
      if (model.kind == ap::CostKind::Multiplicative) {
        std::cout << " alpha=" << ap::format_real(model.alpha);
      } else {
        std::cout << " beta=" << ap::format_real(model.beta);
      }
      std::cout << " I=" << config.I << " B=" << config.B << " P=" << config.P << '\n';
    } else {
      std::cout << "cost_model: none\n";
    }
    std::cout << "problem: N=" << problem.N() << " M=" << problem.M() << " K=" << problem.K << " ("
              << origin << ")\n";
    std::cout << "support: " << join_support(outcome.support) << '\n';
    std::cout << "iterations: " << outcome.iterations << '\n';
    if (ap::is_astar(config.id)) {
      std::cout << "equivalent_prunes: " << outcome.equivalent_prunes << '\n';
      std::cout << "terminated_by: " << (outcome.capped ? "iteration_cap" : "search_complete") << '\n';
    }
    std::cout << "residue_norm: " << ap::format_real(outcome.residue_norm) << '\n';
    if (problem.x_true && problem.x_true->norm() > 0.0) {
      const auto record = ap::make_record(trial, config.display_name(), problem, outcome,
                                          cfg.exact_threshold, 0.0);
      std::cout << "nmse: " << ap::format_real(record.nmse) << '\n';
      std::cout << "exact: " << (record.exact ? "yes" : "no") << '\n';
      std::cout << "misidentified: " << record.misidentified << '\n';
      if (!out.empty()) {
        std::ofstream csv(out, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write " + out);
        std::vector<ap::TrialRecord> records{record};
        ap::write_trials_csv(csv, records);
      }
    }
    return 0;
  }
};

struct BenchCmd {
  AlgoFlags algo;
  EnsembleFlags ensemble;
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<std::string> out;
  std::optional<int> jobs;
  bool timing = false;
  bool quiet = false;
  std::optional<std::string> axis;
  std::optional<std::string> values;
  bool is_sweep = false;

  ap::RunConfig build() const {
    ap::RunConfig cfg = ap::default_config();
    cfg.ensemble.seed = default_seed();
    if (!config_file.empty()) cfg = ap::RunConfig::load(config_file);
    // Flags win over the config file.
    ensemble.apply(cfg.ensemble);
    algo.apply(cfg.search);
    if (!algo.algos.empty()) cfg.algorithms = algo.entries();
    if (out) cfg.out_dir = *out;
    if (jobs) cfg.jobs = *jobs;
    if (timing) cfg.timing = true;
    try {
      if (axis) cfg.axis = ap::parse_sweep_axis(*axis);
      if (values) cfg.sweep_values = ap::parse_value_list(*values);
      for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects section.key=value");
        cfg.set(s.substr(0, eq), s.substr(eq + 1));
      }
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (is_sweep && !cfg.axis) throw UsageError("sweep requires --axis (or [sweep] axis in the config)");
    if (!is_sweep) {
      cfg.axis.reset();
      cfg.sweep_values.clear();
    }
    return cfg;
  }

  int run() const {
    const ap::RunConfig cfg = build();
    try {
      cfg.validate();
      if (cfg.axis) {
        for (double v : cfg.sweep_values) ap::sweep_point(cfg, v).validate();
      }
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    const auto output = ap::run_benchmark(cfg, {}, quiet ? nullptr : &std::cerr);
    ap::write_outputs(cfg, output);
    ap::write_summary_csv(std::cout, output.summaries);
    return 0;
  }
};

struct ImageCmd {
  AlgoFlags algo;
  std::string input;
  std::string synthetic;
  std::string output;
  std::string stats;
  std::optional<std::uint64_t> phi_seed;
  int K = 14;
  int M = 32;
  bool normalize = false;

  int run() const {
    ap::SearchDefaults search;
    search.alpha = 0.5;
    algo.apply(search);
    const auto entries = algo.algos.empty()
                             ? std::vector<ap::AlgorithmEntry>{{"mul-aomp", ap::AlgorithmId::MulAstar, {}}}
                             : algo.entries();
    ap::RunConfig cfg;
    cfg.search = search;
    cfg.algorithms = entries;
    const auto config = cfg.resolved_algorithms().front();
    if (ap::is_astar(config.id)) {
      try {
        config.search_params(K).validate(M, ap::kBlockPixels, K);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
    if (K < 1 || K > ap::kBlockPixels) throw UsageError("--K must lie in [1, 64]");
    if (M < 1 || M > ap::kBlockPixels) throw UsageError("--M must lie in [1, 64]");

    ap::GrayImage original;
    if (!input.empty()) {
      original = ap::read_pgm(std::filesystem::path(input));
    } else if (!synthetic.empty()) {
      const auto x = synthetic.find('x');
      if (x == std::string::npos) throw UsageError("--synthetic expects WIDTHxHEIGHT");
      int w = 0, h = 0;
      try {
        w = std::stoi(synthetic.substr(0, x));
        h = std::stoi(synthetic.substr(x + 1));
      } catch (const std::exception&) {
        throw UsageError("--synthetic expects WIDTHxHEIGHT");
      }
      original = ap::synthetic_image(w, h, phi_seed.value_or(default_seed()));
    } else {
      throw UsageError("image needs --input or --synthetic");
    }

    const std::uint64_t seed = phi_seed.value_or(default_seed());
    ap::Rng rng = ap::Rng::stream(seed, 3, 0);
    const ap::Matrix phi = ap::gen_matrix(M, ap::kBlockPixels, ap::MatrixKind::Gaussian, normalize, rng);

    const ap::GrayImage reference = ap::sparsify_image(original, K);
    const auto result = ap::reconstruct_image(reference, phi, config, K);

    if (!output.empty()) ap::write_pgm(std::filesystem::path(output), result.image);
    if (!stats.empty()) {
      std::ofstream os(stats, std::ios::binary);
      if (!os) throw std::runtime_error("cannot write " + stats);
      ap::write_block_stats_csv(os, result.blocks);
    }
    std::size_t exact = 0, capped = 0, iterations = 0;
    for (const auto& b : result.blocks) {
      exact += b.exact;
      capped += b.capped;
      iterations += b.iterations;
    }
    std::cout << "algorithm: " << config.display_name() << '\n';
    std::cout << "image: " << original.width() << "x" << original.height() << " blocks="
              << result.blocks.size() << " K=" << K << " M=" << M << " phi_seed=" << seed << '\n';
    std::cout << "psnr_vs_sparsified_db: " << ap::format_real(ap::psnr(reference, result.image)) << '\n';
    std::cout << "psnr_vs_original_db: " << ap::format_real(ap::psnr(original, result.image)) << '\n';
    std::cout << "exact_blocks: " << exact << '\n';
    std::cout << "capped_blocks: " << capped << '\n';
    std::cout << "total_iterations: " << iterations << '\n';
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"A*OMP sparse recovery and benchmarking"};
  app.require_subcommand(1);

  RecoverCmd recover;
  auto* rec = app.add_subcommand("recover", "recover one generated or loaded problem");
  recover.algo.attach(rec, false);
  recover.ensemble.attach(rec);
  rec->add_option("--gen", recover.gen, "generated instance, e.g. N=64,M=32,K=5");
  rec->add_option("--problem", recover.problem_file, "problem file to load instead of generating");
  rec->add_option("--save-problem", recover.save_problem, "write the instance to a problem file");
  rec->add_option("--trial", recover.trial, "trial index of the generated instance");
  rec->add_option("--out", recover.out, "write a one-row trials CSV here");

  BenchCmd bench;
  auto* ben = app.add_subcommand("benchmark", "run trials x algorithms, write trials.csv and summary.csv");
  BenchCmd sweep;
  sweep.is_sweep = true;
  auto* swp = app.add_subcommand("sweep", "benchmark once per value of one parameter axis");
  for (auto [cmd, sub] : {std::pair{&bench, ben}, std::pair{&sweep, swp}}) {
    cmd->algo.attach(sub, true);
    cmd->ensemble.attach(sub);
    sub->add_option("--config", cmd->config_file, "INI run configuration");
    sub->add_option("--set", cmd->sets, "override a config key: section.key=value");
    sub->add_option("--out", cmd->out, "output directory");
    sub->add_option("--jobs", cmd->jobs, "worker threads");
    sub->add_flag("--timing", cmd->timing, "record wall-clock runtime (makes CSVs non-reproducible)");
    sub->add_flag("--quiet", cmd->quiet, "no progress on standard error");
  }
  swp->add_option("--axis", sweep.axis, "K | M | alpha | B | P | snr");
  swp->add_option("--values", sweep.values, "comma list; a:b:step ranges allowed");

  ImageCmd image;
  auto* img = app.add_subcommand("image", "block-wise compressed sensing of a PGM image");
  image.algo.attach(img, false);
  img->add_option("--input", image.input, "P5 PGM input");
  img->add_option("--synthetic", image.synthetic, "use a seeded synthetic scene, e.g. 64x64");
  img->add_option("--output", image.output, "reconstructed P5 PGM");
  img->add_option("--stats", image.stats, "per-block stats CSV");
  img->add_option("--phi-seed,--seed", image.phi_seed, "seed of the shared observation matrix");
  img->add_option("--K", image.K, "per-block sparsity (default 14)");
  img->add_option("--M", image.M, "measurements per block (default 32)");
  img->add_flag("--normalize-columns", image.normalize, "scale phi columns to unit norm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (app.got_subcommand(rec)) return recover.run();
    if (app.got_subcommand(ben)) return bench.run();
    if (app.got_subcommand(swp)) return sweep.run();
    if (app.got_subcommand(img)) return image.run();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
