#include "astar_pursuit/synth.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace astar_pursuit {

namespace {

constexpr std::uint64_t kTrialStream = 1;
constexpr std::uint64_t kSharedMatrixStream = 2;

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(splitmix64(seed) ^ tag) ^ index));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

double Rng::normal() {
  if (spare_normal_) {
    const double v = *spare_normal_;
    spare_normal_.reset();
    return v;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

std::string_view to_string(CoeffDist d) {
  switch (d) {
    case CoeffDist::Uniform: return "uniform";
    case CoeffDist::Gaussian: return "gaussian";
    case CoeffDist::Binary: return "binary";
  }
  return "unknown";
}

std::string_view to_string(MatrixKind k) {
  return k == MatrixKind::Gaussian ? "gaussian" : "bernoulli";
}

std::string_view to_string(MatrixSharing s) {
  return s == MatrixSharing::PerSample ? "per_sample" : "shared";
}

std::string_view to_string(GaussianScale s) {
  return s == GaussianScale::InvN ? "inv_n" : "inv_sqrt_m";
}

CoeffDist parse_coeff_dist(std::string_view s) {
  if (s == "uniform") return CoeffDist::Uniform;
  if (s == "gaussian") return CoeffDist::Gaussian;
  if (s == "binary") return CoeffDist::Binary;
  throw std::invalid_argument("unknown coefficient distribution '" + std::string(s) + "'");
}

MatrixKind parse_matrix_kind(std::string_view s) {
  if (s == "gaussian") return MatrixKind::Gaussian;
  if (s == "bernoulli") return MatrixKind::Bernoulli;
  throw std::invalid_argument("unknown matrix kind '" + std::string(s) + "'");
}

MatrixSharing parse_matrix_sharing(std::string_view s) {
  if (s == "per_sample") return MatrixSharing::PerSample;
  if (s == "shared") return MatrixSharing::Shared;
  throw std::invalid_argument("unknown matrix sharing '" + std::string(s) + "'");
}

GaussianScale parse_gaussian_scale(std::string_view s) {
  if (s == "inv_n") return GaussianScale::InvN;
  if (s == "inv_sqrt_m") return GaussianScale::InvSqrtM;
  throw std::invalid_argument("unknown gaussian scale '" + std::string(s) + "'");
}

void EnsembleSpec::validate() const {
  if (!(K >= 1 && K < M && M < N)) {
    throw std::invalid_argument("ensemble: requires 1 <= K < M < N (got K=" + std::to_string(K) +
                                ", M=" + std::to_string(M) + ", N=" + std::to_string(N) + ")");
  }
  if (trials < 1) throw std::invalid_argument("ensemble: trials must be at least 1");
  if (snr_db && !std::isfinite(*snr_db)) {
    throw std::invalid_argument("ensemble: snr_db must be finite (omit it for noiseless runs)");
  }
}

Vector gen_sparse_signal(int N, int K, CoeffDist dist, Rng& rng) {
  if (K < 0 || K > N) throw std::invalid_argument("gen_sparse_signal: requires 0 <= K <= N");
  // Partial Fisher-Yates over positions.
  std::vector<int> positions(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) positions[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < K; ++i) {
    const auto j = static_cast<std::size_t>(i) +
                   rng.uniform_index(static_cast<std::uint64_t>(N - i));
    std::swap(positions[static_cast<std::size_t>(i)], positions[j]);
  }
  Vector x = Vector::Zero(N);
  for (int i = 0; i < K; ++i) {
    double v = 1.0;
    switch (dist) {
      case CoeffDist::Uniform:
        do {
          v = 2.0 * rng.uniform() - 1.0;
        } while (v == 0.0);
        break;
      case CoeffDist::Gaussian:
        v = rng.normal();
        break;
      case CoeffDist::Binary:
        v = 1.0;
        break;
    }
    x[positions[static_cast<std::size_t>(i)]] = v;
  }
  return x;
}

Matrix gen_matrix(int M, int N, MatrixKind kind, bool normalize_columns, Rng& rng,
                  GaussianScale scale) {
  if (M < 1 || N < 1) throw std::invalid_argument("gen_matrix: dimensions must be positive");
  Matrix phi(M, N);
  if (kind == MatrixKind::Gaussian) {
    const double sigma = scale == GaussianScale::InvN ? 1.0 / N : 1.0 / std::sqrt(double(M));
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < M; ++i) phi(i, j) = sigma * rng.normal();
  } else {
    const double amp = 1.0 / std::sqrt(static_cast<double>(M));
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < M; ++i) phi(i, j) = (rng.next_u64() >> 63) ? amp : -amp;
  }
  if (normalize_columns) {
    for (int j = 0; j < N; ++j) {
      const double norm = phi.col(j).norm();
      if (norm > 0.0) phi.col(j) /= norm;
    }
  }
  return phi;
}

Vector observe(const Matrix& phi, const Vector& x, std::optional<double> snr_db, Rng& rng) {
  if (phi.cols() != x.size()) {
    throw DimensionError("observe: phi has " + std::to_string(phi.cols()) + " columns but x has " +
                         std::to_string(x.size()) + " entries");
  }
  // Explicit accumulation order keeps y independent of Eigen's SIMD path.
  Vector y = Vector::Zero(phi.rows());
  for (Eigen::Index j = 0; j < phi.cols(); ++j) {
    if (x[j] == 0.0) continue;
    for (Eigen::Index i = 0; i < phi.rows(); ++i) y[i] += phi(i, j) * x[j];
  }
  if (snr_db) {
    const double signal_power = y.squaredNorm() / static_cast<double>(y.size());
    const double sigma = std::sqrt(signal_power / std::pow(10.0, *snr_db / 10.0));
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sigma * rng.normal();
  }
  return y;
}

Matrix shared_matrix(const EnsembleSpec& spec) {
  Rng rng = Rng::stream(spec.seed, kSharedMatrixStream, static_cast<std::uint64_t>(spec.M));
  return gen_matrix(spec.M, spec.N, spec.matrix_kind, spec.normalize_columns, rng,
                    spec.gaussian_scale);
}

ProblemInstance make_trial(const EnsembleSpec& spec, int trial) {
  spec.validate();
  Rng rng = Rng::stream(spec.seed, kTrialStream, static_cast<std::uint64_t>(trial));
  ProblemInstance p;
  p.K = spec.K;
  p.phi = spec.matrix_sharing == MatrixSharing::Shared
              ? shared_matrix(spec)
              : gen_matrix(spec.M, spec.N, spec.matrix_kind, spec.normalize_columns, rng,
                           spec.gaussian_scale);
  p.x_true = gen_sparse_signal(spec.N, spec.K, spec.coeff_dist, rng);
  p.y = observe(p.phi, *p.x_true, spec.snr_db, rng);
  return p;
}

}  // namespace astar_pursuit
