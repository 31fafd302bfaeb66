// Reference greedy solvers: Orthogonal Matching Pursuit and Subspace Pursuit.
#pragma once

#include <optional>
#include <vector>

#include "astar_pursuit/linalg.hpp"
#include "astar_pursuit/problem.hpp"

namespace astar_pursuit {

struct BaselineResult {
  Vector x_hat;
  std::vector<AtomIndex> support;  // OMP: selection order; SP: ascending
  std::size_t iterations = 0;
  std::size_t degenerate_skips = 0;
  double residue_norm = 0.0;
};

struct OmpOptions {
  /// Stop early once ||r|| <= residue_stop * ||y||. Off by default: OMP runs
  /// exactly K selections even when the residue vanishes.
  std::optional<double> residue_stop;
  ProjectionObserver on_projection;
};

/// K rounds of argmax |<r, v_n>| (ties to the lower index). An atom that is
/// numerically dependent on the current support is skipped in favour of the
/// next-best one.
BaselineResult recover_omp(const ProblemInstance& problem, int K, const OmpOptions& options = {});

struct SpOptions {
  int max_iterations = 100;
  ProjectionObserver on_projection;
};

/// Subspace Pursuit. Iterates merge-project-prune until the residue norm
/// stops strictly decreasing, returning the last improving support.
/// `iterations` counts refinement passes, including the final rejected one.
BaselineResult recover_sp(const ProblemInstance& problem, int K, const SpOptions& options = {});

}  // namespace astar_pursuit
