#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>

#include "astar_pursuit/linalg.hpp"

namespace astar_pursuit {

/// y = phi * x (+ noise) with x assumed K-sparse.
struct ProblemInstance {
  Matrix phi;
  Vector y;
  std::optional<Vector> x_true;
  int K = 1;

  Eigen::Index M() const { return phi.rows(); }
  Eigen::Index N() const { return phi.cols(); }

  /// Checks shapes, finiteness and 1 <= K <= M.
  void validate() const;
};

/// Called with the support (in selection order) and residue of every
/// projection an algorithm computes. Used for invariant auditing.
using ProjectionObserver =
    std::function<void(std::span<const AtomIndex> support, const Vector& residue)>;

/// Whitespace-separated text form: a header line "M N K has_truth", then phi
/// row by row, then y, then x_true when has_truth is 1. '#' starts a comment.
ProblemInstance read_problem(std::istream& in);
void write_problem(std::ostream& out, const ProblemInstance& problem);

/// Scatters support coefficients into a length-n vector.
Vector scatter(std::span<const AtomIndex> support, const Vector& coeffs, Eigen::Index n);

}  // namespace astar_pursuit
