#include "astar_pursuit/baselines.hpp"

#include <algorithm>
#include <stdexcept>

namespace astar_pursuit {

namespace {

void check_k(const ProblemInstance& problem, int K) {
  problem.validate();
  if (K < 1 || K > problem.M()) throw std::invalid_argument("baseline: K must satisfy 1 <= K <= M");
}

struct Fit {
  std::vector<AtomIndex> support;
  Vector coeffs;
  Vector residue;
  double r_norm = 0.0;
  std::size_t skipped = 0;
};

// Projects y onto `atoms`, dropping any atom dependent on its predecessors.
Fit fit_support(const ProblemInstance& problem, std::span<const AtomIndex> atoms,
                const ProjectionObserver& observer) {
  Fit fit;
  QrState qr(problem.M());
  for (AtomIndex n : atoms) {
    try {
      qr.append(problem.phi.col(n));
      fit.support.push_back(n);
    } catch (const DegenerateAtomError&) {
      ++fit.skipped;
    }
  }
  auto proj = project_residue(qr, problem.y);
  fit.coeffs = std::move(proj.coeffs);
  fit.residue = std::move(proj.residue);
  fit.r_norm = fit.residue.norm();
  if (observer) observer(fit.support, fit.residue);
  return fit;
}

// K atoms with the largest |<r, v_n>| outside `excluded`.
std::vector<AtomIndex> top_atoms(const Matrix& phi, const Vector& r,
                                 std::span<const AtomIndex> excluded, int K) {
  std::vector<AtomIndex> out;
  for (const auto& c : top_correlations(phi, r, excluded, static_cast<std::size_t>(K))) {
    out.push_back(c.index);
  }
  return out;
}

}  // namespace

BaselineResult recover_omp(const ProblemInstance& problem, int K, const OmpOptions& options) {
  check_k(problem, K);
  const double y_norm = problem.y.norm();

  BaselineResult result;
  QrState qr(problem.M());
  Vector residue = problem.y;
  Vector coeffs;
  double r_norm = y_norm;
  for (int it = 0; it < K; ++it) {
    if (options.residue_stop && r_norm <= *options.residue_stop * y_norm) break;
    bool selected = false;
    for (const auto& c : correlate_abs(problem.phi, residue, result.support)) {
      try {
        qr.append(problem.phi.col(c.index));
      } catch (const DegenerateAtomError&) {
        ++result.degenerate_skips;
        continue;
      }
      result.support.push_back(c.index);
      selected = true;
      break;
    }
    if (!selected) break;
    auto proj = project_residue(qr, problem.y);
    coeffs = std::move(proj.coeffs);
    residue = std::move(proj.residue);
    r_norm = residue.norm();
    ++result.iterations;
    if (options.on_projection) options.on_projection(result.support, residue);
  }
  result.residue_norm = r_norm;
  result.x_hat = result.support.empty() ? Vector(Vector::Zero(problem.N()))
                                        : scatter(result.support, coeffs, problem.N());
  return result;
}

BaselineResult recover_sp(const ProblemInstance& problem, int K, const SpOptions& options) {
  check_k(problem, K);

  auto initial = top_atoms(problem.phi, problem.y, {}, K);
  std::sort(initial.begin(), initial.end());
  Fit current = fit_support(problem, initial, options.on_projection);

  BaselineResult result;
  result.degenerate_skips = current.skipped;
  for (int it = 0; it < options.max_iterations; ++it) {
    ++result.iterations;
    std::vector<AtomIndex> merged = current.support;
    const auto extra = top_atoms(problem.phi, current.residue, current.support, K);
    merged.insert(merged.end(), extra.begin(), extra.end());
    std::sort(merged.begin(), merged.end());

    const Fit wide = fit_support(problem, merged, options.on_projection);
    result.degenerate_skips += wide.skipped;

    // Keep the K largest |coefficient| atoms; ties go to the lower index.
    std::vector<std::size_t> order(wide.support.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto keep = std::min<std::size_t>(static_cast<std::size_t>(K), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double ma = std::abs(wide.coeffs[static_cast<Eigen::Index>(a)]);
                        const double mb = std::abs(wide.coeffs[static_cast<Eigen::Index>(b)]);
                        if (ma != mb) return ma > mb;
                        return wide.support[a] < wide.support[b];
                      });
    std::vector<AtomIndex> pruned;
    for (std::size_t i = 0; i < keep; ++i) pruned.push_back(wide.support[order[i]]);
    std::sort(pruned.begin(), pruned.end());

    Fit next = fit_support(problem, pruned, options.on_projection);
    result.degenerate_skips += next.skipped;
    if (!(next.r_norm < current.r_norm)) break;
    current = std::move(next);
  }

  result.support = current.support;
  result.residue_norm = current.r_norm;
  result.x_hat = scatter(current.support, current.coeffs, problem.N());
  return result;
}

}  // namespace astar_pursuit
