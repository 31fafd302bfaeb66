// A*OMP: best-first search over OMP-style support expansions.
//
// The beam holds exactly P slots. Each iteration selects the cheapest slot
// and replaces it with up to B children (the atoms best correlated with its
// residue). The first surviving child takes the parent's slot; every other
// child evicts the most expensive slot only if it is cheaper. Children whose
// atom set was already materialized somewhere in the search are dropped
// before projection.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "astar_pursuit/cost_model.hpp"
#include "astar_pursuit/linalg.hpp"
#include "astar_pursuit/problem.hpp"

namespace astar_pursuit {

struct Path {
  std::vector<AtomIndex> atoms;  // selection order
  Vector coeffs;
  QrState qr;
  Vector residue;  // left empty for an empty slot
  double r_norm = 0.0;
  double prev_r_norm = 0.0;
  double cost = 0.0;

  std::size_t length() const { return atoms.size(); }
  bool empty() const { return atoms.empty(); }

  static Path empty_slot(double y_norm);
};

/// Set of canonical (ascending) atom-index keys stored as a prefix tree.
class VisitedTrie {
 public:
  VisitedTrie();

  static std::vector<AtomIndex> canonical_key(std::span<const AtomIndex> atoms);

  /// Returns false if the key was already present.
  bool insert(std::span<const AtomIndex> key);
  bool contains(std::span<const AtomIndex> key) const;

  std::size_t size() const { return keys_; }
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    std::vector<std::pair<AtomIndex, std::uint32_t>> children;  // sorted by atom
    bool terminal = false;
  };
  std::vector<Node> nodes_;
  std::size_t keys_ = 0;
};

/// Fixed-capacity collection of paths; empty slots cost ||y||.
class Beam {
 public:
  Beam(std::size_t capacity, double y_norm);

  std::size_t capacity() const { return slots_.size(); }
  std::size_t size() const { return slots_.size(); }
  std::size_t live() const;
  double y_norm() const { return y_norm_; }

  const Path& operator[](std::size_t slot) const { return slots_.at(slot); }
  std::span<const Path> slots() const { return slots_; }

  /// Argmin cost; ties go to the longer path, then the lower slot.
  std::size_t best_slot() const;
  /// Argmax cost; ties go to the shorter path, then the lower slot.
  std::size_t worst_slot() const;

  void place(std::size_t slot, Path path);
  Path take(std::size_t slot);
  void clear(std::size_t slot);
  /// Tree-size pruning: overwrites the worst slot when `path` is cheaper.
  /// Returns the slot used, or nothing if the path was rejected.
  std::optional<std::size_t> offer(Path path);

 private:
  std::vector<Path> slots_;
  double y_norm_;
};

enum class EquivalenceMode {
  VisitedTrie,  // every materialized atom set, including evicted paths
  LiveSlots,    // only the atom sets currently held in the beam
};

struct SearchParams {
  int I = 3;
  int B = 2;
  int P = 200;
  int K = 0;  // 0 takes the problem's K
  CostModel model = CostModel::multiplicative(0.8);
  std::size_t max_iterations = 0;  // 0 selects 10 * I * K * P
  std::optional<double> residue_stop;  // relative to ||y||
  EquivalenceMode equivalence = EquivalenceMode::VisitedTrie;

  int effective_K(const ProblemInstance& problem) const { return K > 0 ? K : problem.K; }
  std::size_t effective_max_iterations(int k) const;
  void validate(Eigen::Index M, Eigen::Index N, int k) const;
};

enum class Termination { CompletePath, ResidueThreshold, IterationCap, ZeroObservation };

std::string_view to_string(Termination t);

struct RecoveryResult {
  Vector x_hat;
  std::vector<AtomIndex> support;  // selection order
  std::size_t iterations = 0;
  std::size_t equivalent_prunes = 0;
  std::size_t degenerate_candidates = 0;
  double residue_norm = 0.0;
  Termination terminated_by = Termination::CompletePath;
};

struct EquivalentPrune {
  std::span<const AtomIndex> parent_atoms;
  AtomIndex candidate = 0;
  std::span<const AtomIndex> key;  // canonical key of parent + candidate
};

struct SearchHooks {
  std::function<void(const EquivalentPrune&)> on_equivalent_prune;
  ProjectionObserver on_projection;
};

struct SearchState {
  Beam beam;
  VisitedTrie trie;
  double y_norm = 0.0;
  int K = 1;
};

struct ExpandStats {
  std::size_t equivalent_prunes = 0;
  std::size_t degenerate = 0;
  std::size_t inserted = 0;
  bool cleared = false;  // no child survived; the parent slot was emptied
};

/// Builds the beam: I length-1 paths on the atoms best correlated with y,
/// the remaining P - I slots empty. Requires ||y|| > 0.
SearchState initialize(const ProblemInstance& problem, const SearchParams& params,
                       const SearchHooks& hooks = {});

inline std::size_t select_best(const Beam& beam) { return beam.best_slot(); }

/// Extends `parent` by one atom with a fresh projection and cost.
/// Throws DegenerateAtomError when the atom adds no direction.
Path extend_path(const Path& parent, AtomIndex atom, const ProblemInstance& problem,
                 const CostModel& model, int K, double y_norm);

/// One search iteration on the slot chosen by select_best.
ExpandStats expand(SearchState& state, const ProblemInstance& problem,
                   const SearchParams& params, std::size_t best,
                   const SearchHooks& hooks = {});

RecoveryResult recover_astar_omp(const ProblemInstance& problem, const SearchParams& params,
                                 const SearchHooks& hooks = {});

}  // namespace astar_pursuit
