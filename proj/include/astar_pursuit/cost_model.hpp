// Path cost F used to rank partial paths of different lengths.
#pragma once

#include <string>
#include <string_view>

namespace astar_pursuit {

enum class CostKind { Additive, Adaptive, Multiplicative };

std::string_view to_string(CostKind kind);

struct CostModel {
  CostKind kind = CostKind::Multiplicative;
  double beta = 1.25;  // Additive, Adaptive; must exceed 1
  double alpha = 0.8;  // Multiplicative; must lie in (0, 1)

  static CostModel additive(double beta);
  static CostModel adaptive(double beta);
  static CostModel multiplicative(double alpha);

  /// Throws std::invalid_argument if the parameter for `kind` is out of range.
  void validate() const;
};

/// Residue statistics of one path. `prev_r_norm` is the residue norm one
/// node earlier (||y|| for a length-1 path).
struct PathCostInputs {
  double r_norm = 0.0;
  double prev_r_norm = 0.0;
  double y_norm = 0.0;
  int K = 1;
  int length = 0;
};

/// Additive:       ||r|| - beta * (K - l) / K * ||y||
/// Adaptive:       ||r|| - beta * (||r_prev|| - ||r||) * (K - l)
/// Multiplicative: alpha^(K - l) * ||r||
/// A complete path (l = K) costs exactly ||r|| under every model.
double cost(const CostModel& model, const PathCostInputs& in);

/// Cost of an empty beam slot; equals ||y|| so empty slots are evicted first.
inline double empty_slot_cost(double y_norm) { return y_norm; }

}  // namespace astar_pursuit
