// Uniform front end over every recovery algorithm in the library.
#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "astar_pursuit/astar_search.hpp"
#include "astar_pursuit/baselines.hpp"

namespace astar_pursuit {

enum class AlgorithmId { Omp, Sp, AddAstar, AdapAstar, MulAstar };

/// CLI names: omp, sp, add-aomp, adap-aomp, mul-aomp.
std::string_view to_string(AlgorithmId id);
AlgorithmId parse_algorithm(std::string_view name);
bool is_astar(AlgorithmId id);

struct AlgorithmConfig {
  AlgorithmId id = AlgorithmId::MulAstar;
  int I = 3;
  int B = 2;
  int P = 200;
  double alpha = 0.8;
  double beta = 1.25;
  std::size_t max_iterations = 0;
  std::optional<double> residue_stop;
  EquivalenceMode equivalence = EquivalenceMode::VisitedTrie;
  /// Shown in CSV output; defaults to the algorithm name.
  std::string label;

  std::string display_name() const;
  CostModel cost_model() const;
  SearchParams search_params(int K) const;
};

struct AlgorithmHooks {
  SearchHooks search;
  ProjectionObserver on_projection;  // baselines only; A*OMP uses search.on_projection
};

struct AlgorithmOutcome {
  Vector x_hat;
  std::vector<AtomIndex> support;
  std::size_t iterations = 0;
  std::size_t equivalent_prunes = 0;
  bool capped = false;
  double residue_norm = 0.0;
};

AlgorithmOutcome run_algorithm(const AlgorithmConfig& config, const ProblemInstance& problem,
                               const AlgorithmHooks& hooks = {});

}  // namespace astar_pursuit
