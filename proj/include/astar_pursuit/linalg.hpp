// Dense kernels shared by every recovery algorithm: absolute-correlation
// scans over dictionary columns and an incrementally grown QR factorization
// used for orthogonal projection of the observation onto a support.
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace astar_pursuit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using AtomIndex = Eigen::Index;

/// Thrown when operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown by QrState::append when the column adds no new direction.
class DegenerateAtomError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejects NaN/Inf entries; `what` names the offending operand.
void require_finite(const Eigen::Ref<const Matrix>& values, const std::string& what);

struct Correlation {
  AtomIndex index = 0;
  double magnitude = 0.0;
};

/// Descending magnitude, then ascending index.
inline bool correlation_before(const Correlation& a, const Correlation& b) {
  if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
  return a.index < b.index;
}

/// |<column n, r>| accumulated in row order, one column at a time.
double abs_inner(const Matrix& dict, AtomIndex column, const Vector& r);

/// All non-excluded columns with |<r, v_n>|, sorted by correlation_before.
std::vector<Correlation> correlate_abs(const Matrix& dict, const Vector& r,
                                       std::span<const AtomIndex> excluded);

/// The first `count` entries of correlate_abs without sorting the full list.
std::vector<Correlation> top_correlations(const Matrix& dict, const Vector& r,
                                          std::span<const AtomIndex> excluded,
                                          std::size_t count);

struct Projection {
  Vector coeffs;
  Vector residue;
};

/// Thin QR factorization grown one column at a time with modified
/// Gram-Schmidt plus one reorthogonalization pass. Q is stored column-major
/// and R packed by columns (column j holds j + 1 entries).
class QrState {
 public:
  /// Columns whose residual after orthogonalization falls at or below this
  /// fraction of their own norm are rejected as degenerate.
  static constexpr double kDegenerateTolerance = 1e-12;

  QrState() = default;
  explicit QrState(Eigen::Index rows) : rows_(rows) {}

  Eigen::Index rows() const { return rows_; }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  /// Appends one column. Throws DegenerateAtomError if it lies numerically in
  /// the span of the columns already appended; the state is unchanged then.
  void append(const Eigen::Ref<const Vector>& column);

  /// Orthonormal column j.
  Eigen::Map<const Vector> q(std::size_t j) const;
  /// R(i, j) for i <= j.
  double r(std::size_t i, std::size_t j) const;

  Matrix q_matrix() const;
  Matrix r_matrix() const;

 private:
  Eigen::Index rows_ = 0;
  std::size_t count_ = 0;
  std::vector<double> q_;
  std::vector<double> r_;
};

/// Returns a copy of `state` with `column` appended.
QrState qr_append(QrState state, const Eigen::Ref<const Vector>& column);

/// Least-squares coefficients of y over the appended columns and the
/// corresponding residue y - S c.
Projection project_residue(const QrState& state, const Vector& y);

/// QR of the given dictionary columns in the given order.
QrState factor_columns(const Matrix& dict, std::span<const AtomIndex> atoms);

}  // namespace astar_pursuit
