#include "astar_pursuit/cost_model.hpp"

#include <cmath>
#include <stdexcept>

namespace astar_pursuit {

std::string_view to_string(CostKind kind) {
  switch (kind) {
    case CostKind::Additive:
      return "additive";
    case CostKind::Adaptive:
      return "adaptive";
    case CostKind::Multiplicative:
      return "multiplicative";
  }
  return "unknown";
}

CostModel CostModel::additive(double beta) {
  CostModel m{CostKind::Additive, beta, 0.8};
  m.validate();
  return m;
}

CostModel CostModel::adaptive(double beta) {
  CostModel m{CostKind::Adaptive, beta, 0.8};
  m.validate();
  return m;
}

CostModel CostModel::multiplicative(double alpha) {
  CostModel m{CostKind::Multiplicative, 1.25, alpha};
  m.validate();
  return m;
}

void CostModel::validate() const {
  switch (kind) {
    case CostKind::Additive:
    case CostKind::Adaptive:
      if (!(beta > 1.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("cost model: beta must be a finite value > 1");
      }
      break;
    case CostKind::Multiplicative:
      if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("cost model: alpha must lie in (0, 1)");
      }
      break;
  }
}

double cost(const CostModel& model, const PathCostInputs& in) {
  const int remaining = in.K - in.length;
  switch (model.kind) {
    case CostKind::Additive:
      return in.r_norm - model.beta * (static_cast<double>(remaining) / in.K) * in.y_norm;
    case CostKind::Adaptive:
      return in.r_norm - model.beta * (in.prev_r_norm - in.r_norm) * remaining;
    case CostKind::Multiplicative:
      return std::pow(model.alpha, remaining) * in.r_norm;
  }
  return in.r_norm;
}

}  // namespace astar_pursuit
