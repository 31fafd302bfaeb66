#include "astar_pursuit/astar_search.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace astar_pursuit {

Path Path::empty_slot(double y_norm) {
  Path p;
  p.r_norm = y_norm;
  p.prev_r_norm = y_norm;
  p.cost = empty_slot_cost(y_norm);
  return p;
}

// ---------------------------------------------------------------------------
// VisitedTrie

VisitedTrie::VisitedTrie() : nodes_(1) {}

std::vector<AtomIndex> VisitedTrie::canonical_key(std::span<const AtomIndex> atoms) {
  std::vector<AtomIndex> key(atoms.begin(), atoms.end());
  std::sort(key.begin(), key.end());
  return key;
}

namespace {

template <typename Children>
auto find_child(Children& children, AtomIndex atom) {
  return std::lower_bound(children.begin(), children.end(), atom,
                          [](const auto& entry, AtomIndex a) { return entry.first < a; });
}

}  // namespace

bool VisitedTrie::insert(std::span<const AtomIndex> key) {
  std::uint32_t node = 0;
  for (AtomIndex atom : key) {
    auto& children = nodes_[node].children;
    auto it = find_child(children, atom);
    if (it != children.end() && it->first == atom) {
      node = it->second;
      continue;
    }
    const auto next = static_cast<std::uint32_t>(nodes_.size());
    children.insert(it, {atom, next});
    nodes_.emplace_back();
    node = next;
  }
  if (nodes_[node].terminal) return false;
  nodes_[node].terminal = true;
  ++keys_;
  return true;
}

bool VisitedTrie::contains(std::span<const AtomIndex> key) const {
  std::uint32_t node = 0;
  for (AtomIndex atom : key) {
    const auto& children = nodes_[node].children;
    auto it = find_child(children, atom);
    if (it == children.end() || it->first != atom) return false;
    node = it->second;
  }
  return nodes_[node].terminal;
}

// ---------------------------------------------------------------------------
// Beam

Beam::Beam(std::size_t capacity, double y_norm) : slots_(capacity, Path::empty_slot(y_norm)), y_norm_(y_norm) {
  if (capacity == 0) throw std::invalid_argument("beam: capacity must be at least 1");
}

std::size_t Beam::live() const {
  return static_cast<std::size_t>(
      std::count_if(slots_.begin(), slots_.end(), [](const Path& p) { return !p.empty(); }));
}

std::size_t Beam::best_slot() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < slots_.size(); ++i) {
    const Path& a = slots_[i];
    const Path& b = slots_[best];
    if (a.cost < b.cost || (a.cost == b.cost && a.length() > b.length())) best = i;
  }
  return best;
}

std::size_t Beam::worst_slot() const {
  std::size_t worst = 0;
  for (std::size_t i = 1; i < slots_.size(); ++i) {
    const Path& a = slots_[i];
    const Path& b = slots_[worst];
    if (a.cost > b.cost || (a.cost == b.cost && a.length() < b.length())) worst = i;
  }
  return worst;
}

void Beam::place(std::size_t slot, Path path) { slots_.at(slot) = std::move(path); }

Path Beam::take(std::size_t slot) {
  Path out = std::move(slots_.at(slot));
  slots_[slot] = Path::empty_slot(y_norm_);
  return out;
}

void Beam::clear(std::size_t slot) { slots_.at(slot) = Path::empty_slot(y_norm_); }

std::optional<std::size_t> Beam::offer(Path path) {
  const std::size_t worst = worst_slot();
  if (!(path.cost < slots_[worst].cost)) return std::nullopt;
  slots_[worst] = std::move(path);
  return worst;
}

// ---------------------------------------------------------------------------
// Parameters

std::size_t SearchParams::effective_max_iterations(int k) const {
  if (max_iterations > 0) return max_iterations;
  return 10u * static_cast<std::size_t>(I) * static_cast<std::size_t>(k) *
         static_cast<std::size_t>(P);
}

void SearchParams::validate(Eigen::Index M, Eigen::Index N, int k) const {
  if (I < 1 || I > N) throw std::invalid_argument("search: I must satisfy 1 <= I <= N");
  if (B < 1) throw std::invalid_argument("search: B must be at least 1");
  if (P < I) throw std::invalid_argument("search: P must be at least I");
  if (k < 1 || k > M) throw std::invalid_argument("search: K must satisfy 1 <= K <= M");
  if (residue_stop && !(*residue_stop >= 0.0)) {
    throw std::invalid_argument("search: residue_stop must be non-negative");
  }
  model.validate();
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::CompletePath:
      return "complete_path";
    case Termination::ResidueThreshold:
      return "residue_threshold";
    case Termination::IterationCap:
      return "iteration_cap";
    case Termination::ZeroObservation:
      return "zero_observation";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Search

Path extend_path(const Path& parent, AtomIndex atom, const ProblemInstance& problem,
                 const CostModel& model, int K, double y_norm) {
  Path child;
  child.qr = parent.empty() ? QrState(problem.M()) : parent.qr;
  child.qr.append(problem.phi.col(atom));
  child.atoms.reserve(parent.atoms.size() + 1);
  child.atoms = parent.atoms;
  child.atoms.push_back(atom);
  auto proj = project_residue(child.qr, problem.y);
  child.coeffs = std::move(proj.coeffs);
  child.residue = std::move(proj.residue);
  child.r_norm = child.residue.norm();
  child.prev_r_norm = parent.empty() ? y_norm : parent.r_norm;
  child.cost = cost(model, {child.r_norm, child.prev_r_norm, y_norm, K,
                            static_cast<int>(child.atoms.size())});
  return child;
}

SearchState initialize(const ProblemInstance& problem, const SearchParams& params,
                       const SearchHooks& hooks) {
  const int K = params.effective_K(problem);
  params.validate(problem.M(), problem.N(), K);
  const double y_norm = problem.y.norm();
  if (!(y_norm > 0.0)) throw std::invalid_argument("initialize: observation must be nonzero");

  SearchState state{Beam(static_cast<std::size_t>(params.P), y_norm), VisitedTrie{}, y_norm, K};
  const Path root = Path::empty_slot(y_norm);
  const auto ranked = correlate_abs(problem.phi, problem.y, {});
  std::size_t slot = 0;
  for (const auto& c : ranked) {
    if (slot == static_cast<std::size_t>(params.I)) break;
    Path p;
    try {
      p = extend_path(root, c.index, problem, params.model, K, y_norm);
    } catch (const DegenerateAtomError&) {
      continue;
    }
    if (hooks.on_projection) hooks.on_projection(p.atoms, p.residue);
    state.trie.insert(p.atoms);
    state.beam.place(slot++, std::move(p));
  }
  return state;
}

namespace {

bool matches_live_slot(const Beam& beam, std::span<const AtomIndex> key) {
  for (const Path& p : beam.slots()) {
    if (p.length() != key.size()) continue;
    if (VisitedTrie::canonical_key(p.atoms) == std::vector<AtomIndex>(key.begin(), key.end())) {
      return true;
    }
  }
  return false;
}

}  // namespace

ExpandStats expand(SearchState& state, const ProblemInstance& problem,
                   const SearchParams& params, std::size_t best, const SearchHooks& hooks) {
  ExpandStats stats;
  Beam& beam = state.beam;
  const Path parent = beam.take(best);
  if (parent.length() >= static_cast<std::size_t>(state.K)) {
    throw std::logic_error("expand: selected path is already complete");
  }
  const Vector& residue = parent.empty() ? problem.y : parent.residue;
  const auto children =
      top_correlations(problem.phi, residue, parent.atoms, static_cast<std::size_t>(params.B));

  bool placed_first = false;
  std::vector<AtomIndex> key;
  for (const auto& child_atom : children) {
    key = parent.atoms;
    key.push_back(child_atom.index);
    std::sort(key.begin(), key.end());

    const bool equivalent = params.equivalence == EquivalenceMode::VisitedTrie
                                ? state.trie.contains(key)
                                : matches_live_slot(beam, key);
    if (equivalent) {
      ++stats.equivalent_prunes;
      if (hooks.on_equivalent_prune) {
        hooks.on_equivalent_prune({parent.atoms, child_atom.index, key});
      }
      continue;
    }

    Path child;
    try {
      child = extend_path(parent, child_atom.index, problem, params.model, state.K, state.y_norm);
    } catch (const DegenerateAtomError&) {
      ++stats.degenerate;
      continue;
    }
    if (hooks.on_projection) hooks.on_projection(child.atoms, child.residue);
    state.trie.insert(key);

    if (!placed_first) {
      beam.place(best, std::move(child));
      placed_first = true;
      ++stats.inserted;
    } else if (beam.offer(std::move(child))) {
      ++stats.inserted;
    }
  }
  // take() already left an empty slot behind when nothing survived.
  stats.cleared = !placed_first;

  if (beam.size() != static_cast<std::size_t>(params.P)) {
    throw std::logic_error("expand: beam size drifted from P");
  }
  return stats;
}

RecoveryResult recover_astar_omp(const ProblemInstance& problem, const SearchParams& params,
                                 const SearchHooks& hooks) {
  problem.validate();
  const int K = params.effective_K(problem);
  params.validate(problem.M(), problem.N(), K);

  RecoveryResult result;
  result.x_hat = Vector::Zero(problem.N());
  const double y_norm = problem.y.norm();
  if (!(y_norm > 0.0)) {
    result.terminated_by = Termination::ZeroObservation;
    return result;
  }

  SearchState state = initialize(problem, params, hooks);
  const std::size_t cap = params.effective_max_iterations(K);
  std::size_t best = 0;
  while (true) {
    best = select_best(state.beam);
    const Path& path = state.beam[best];
    if (path.length() == static_cast<std::size_t>(K)) {
      result.terminated_by = Termination::CompletePath;
      break;
    }
    if (params.residue_stop && !path.empty() && path.r_norm <= *params.residue_stop * y_norm) {
      result.terminated_by = Termination::ResidueThreshold;
      break;
    }
    if (result.iterations >= cap) {
      result.terminated_by = Termination::IterationCap;
      break;
    }
    const auto stats = expand(state, problem, params, best, hooks);
    ++result.iterations;
    result.equivalent_prunes += stats.equivalent_prunes;
    result.degenerate_candidates += stats.degenerate;
  }

  const Path& path = state.beam[best];
  result.support = path.atoms;
  result.residue_norm = path.empty() ? y_norm : path.r_norm;
  if (!path.empty()) result.x_hat = scatter(path.atoms, path.coeffs, problem.N());
  return result;
}

}  // namespace astar_pursuit
