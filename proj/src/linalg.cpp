#include "astar_pursuit/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace astar_pursuit {

void require_finite(const Eigen::Ref<const Matrix>& values, const std::string& what) {
  if (!values.allFinite()) {
    throw std::invalid_argument(what + " contains non-finite entries");
  }
}

double abs_inner(const Matrix& dict, AtomIndex column, const Vector& r) {
  const double* col = dict.data() + column * dict.rows();
  const double* rv = r.data();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < dict.rows(); ++i) {
    sum += col[i] * rv[i];
  }
  return std::abs(sum);
}

namespace {

std::vector<Correlation> all_correlations(const Matrix& dict, const Vector& r,
                                          std::span<const AtomIndex> excluded) {
  if (dict.rows() != r.size()) {
    throw DimensionError("correlate: dictionary has " + std::to_string(dict.rows()) +
                         " rows but residue has " + std::to_string(r.size()) + " entries");
  }
  std::vector<char> skip(static_cast<std::size_t>(dict.cols()), 0);
  for (AtomIndex n : excluded) {
    if (n < 0 || n >= dict.cols()) {
      throw DimensionError("correlate: excluded index " + std::to_string(n) + " out of range");
    }
    skip[static_cast<std::size_t>(n)] = 1;
  }
  std::vector<Correlation> out;
  out.reserve(static_cast<std::size_t>(dict.cols()));
  for (AtomIndex n = 0; n < dict.cols(); ++n) {
    if (skip[static_cast<std::size_t>(n)]) continue;
    out.push_back({n, abs_inner(dict, n, r)});
  }
  return out;
}

}  // namespace

std::vector<Correlation> correlate_abs(const Matrix& dict, const Vector& r,
                                       std::span<const AtomIndex> excluded) {
  auto out = all_correlations(dict, r, excluded);
  std::sort(out.begin(), out.end(), correlation_before);
  return out;
}

std::vector<Correlation> top_correlations(const Matrix& dict, const Vector& r,
                                          std::span<const AtomIndex> excluded,
                                          std::size_t count) {
  auto out = all_correlations(dict, r, excluded);
  count = std::min(count, out.size());
  std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(count), out.end(),
                    correlation_before);
  out.resize(count);
  return out;
}

void QrState::append(const Eigen::Ref<const Vector>& column) {
  if (column.size() != rows_) {
    throw DimensionError("qr_append: column length " + std::to_string(column.size()) +
                         " does not match " + std::to_string(rows_) + " rows");
  }
  const double column_norm = column.norm();
  Vector v = column;
  std::vector<double> rcol(count_ + 1, 0.0);
  // Two MGS passes keep Q orthonormal to working precision.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < count_; ++j) {
      const auto qj = q(j);
      const double h = qj.dot(v);
      v.noalias() -= h * qj;
      rcol[j] += h;
    }
  }
  const double tail = v.norm();
  if (!(tail > kDegenerateTolerance * column_norm)) {
    throw DegenerateAtomError("qr_append: column lies in the span of the current support");
  }
  rcol[count_] = tail;
  v /= tail;
  q_.insert(q_.end(), v.data(), v.data() + rows_);
  r_.insert(r_.end(), rcol.begin(), rcol.end());
  ++count_;
}

Eigen::Map<const Vector> QrState::q(std::size_t j) const {
  return Eigen::Map<const Vector>(q_.data() + j * static_cast<std::size_t>(rows_), rows_);
}

double QrState::r(std::size_t i, std::size_t j) const {
  if (i > j) return 0.0;
  return r_[j * (j + 1) / 2 + i];
}

Matrix QrState::q_matrix() const {
  Matrix out(rows_, static_cast<Eigen::Index>(count_));
  for (std::size_t j = 0; j < count_; ++j) out.col(static_cast<Eigen::Index>(j)) = q(j);
  return out;
}

Matrix QrState::r_matrix() const {
  const auto n = static_cast<Eigen::Index>(count_);
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < count_; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r(i, j);
    }
  }
  return out;
}

QrState qr_append(QrState state, const Eigen::Ref<const Vector>& column) {
  state.append(column);
  return state;
}

Projection project_residue(const QrState& state, const Vector& y) {
  if (y.size() != state.rows()) {
    throw DimensionError("project_residue: observation length " + std::to_string(y.size()) +
                         " does not match " + std::to_string(state.rows()) + " rows");
  }
  const std::size_t l = state.size();
  Projection out;
  out.residue = y;
  Vector qty(static_cast<Eigen::Index>(l));
  for (std::size_t j = 0; j < l; ++j) {
    const auto qj = state.q(j);
    const double h = qj.dot(out.residue);
    out.residue.noalias() -= h * qj;
    qty[static_cast<Eigen::Index>(j)] = h;
  }
  // Back substitution R c = Q^T y.
  out.coeffs.resize(static_cast<Eigen::Index>(l));
  for (std::size_t jj = l; jj-- > 0;) {
    double s = qty[static_cast<Eigen::Index>(jj)];
    for (std::size_t k = jj + 1; k < l; ++k) {
      s -= state.r(jj, k) * out.coeffs[static_cast<Eigen::Index>(k)];
    }
    out.coeffs[static_cast<Eigen::Index>(jj)] = s / state.r(jj, jj);
  }
  return out;
}

QrState factor_columns(const Matrix& dict, std::span<const AtomIndex> atoms) {
  QrState state(dict.rows());
  for (AtomIndex n : atoms) state.append(dict.col(n));
  return state;
}

}  // namespace astar_pursuit
