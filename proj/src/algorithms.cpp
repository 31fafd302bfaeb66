#include "astar_pursuit/algorithms.hpp"

#include <stdexcept>

namespace astar_pursuit {

std::string_view to_string(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::Omp: return "omp";
    case AlgorithmId::Sp: return "sp";
    case AlgorithmId::AddAstar: return "add-aomp";
    case AlgorithmId::AdapAstar: return "adap-aomp";
    case AlgorithmId::MulAstar: return "mul-aomp";
  }
  return "unknown";
}

AlgorithmId parse_algorithm(std::string_view name) {
  for (auto id : {AlgorithmId::Omp, AlgorithmId::Sp, AlgorithmId::AddAstar, AlgorithmId::AdapAstar,
                  AlgorithmId::MulAstar}) {
    if (name == to_string(id)) return id;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

bool is_astar(AlgorithmId id) {
  return id == AlgorithmId::AddAstar || id == AlgorithmId::AdapAstar || id == AlgorithmId::MulAstar;
}

std::string AlgorithmConfig::display_name() const {
  return label.empty() ? std::string(to_string(id)) : label;
}

CostModel AlgorithmConfig::cost_model() const {
  switch (id) {
    case AlgorithmId::AddAstar: return CostModel::additive(beta);
    case AlgorithmId::AdapAstar: return CostModel::adaptive(beta);
    default: return CostModel::multiplicative(alpha);
  }
}

SearchParams AlgorithmConfig::search_params(int K) const {
  SearchParams p;
  p.I = I;
  p.B = B;
  p.P = P;
  p.K = K;
  p.model = cost_model();
  p.max_iterations = max_iterations;
  p.residue_stop = residue_stop;
  p.equivalence = equivalence;
  return p;
}

AlgorithmOutcome run_algorithm(const AlgorithmConfig& config, const ProblemInstance& problem,
                               const AlgorithmHooks& hooks) {
  AlgorithmOutcome out;
  if (is_astar(config.id)) {
    auto r = recover_astar_omp(problem, config.search_params(problem.K), hooks.search);
    out.x_hat = std::move(r.x_hat);
    out.support = std::move(r.support);
    out.iterations = r.iterations;
    out.equivalent_prunes = r.equivalent_prunes;
    out.capped = r.terminated_by == Termination::IterationCap;
    out.residue_norm = r.residue_norm;
    return out;
  }
  BaselineResult r;
  if (config.id == AlgorithmId::Omp) {
    OmpOptions opts;
    opts.residue_stop = config.residue_stop;
    opts.on_projection = hooks.on_projection;
    r = recover_omp(problem, problem.K, opts);
  } else {
    SpOptions opts;
    opts.on_projection = hooks.on_projection;
    r = recover_sp(problem, problem.K, opts);
  }
  out.x_hat = std::move(r.x_hat);
  out.support = std::move(r.support);
  out.iterations = r.iterations;
  out.residue_norm = r.residue_norm;
  return out;
}

}  // namespace astar_pursuit
