// Seeded generation of synthetic sparse-recovery ensembles.
//
// Random streams are std::mt19937_64 engines whose seed is derived from
// (base seed, stream tag, stream index) through SplitMix64. Real-valued
// draws use explicit transforms (53-bit uniforms, Box-Muller normals), so an
// ensemble is bit-identical across standard libraries and thread counts.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

#include "astar_pursuit/linalg.hpp"
#include "astar_pursuit/problem.hpp"

namespace astar_pursuit {

std::uint64_t splitmix64(std::uint64_t x);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Stream `index` of family `tag` under `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer on [0, n); n > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

enum class CoeffDist { Uniform, Gaussian, Binary };
enum class MatrixKind { Gaussian, Bernoulli };
enum class MatrixSharing { PerSample, Shared };
/// Standard deviation of Gaussian matrix entries.
enum class GaussianScale { InvN, InvSqrtM };

std::string_view to_string(CoeffDist d);
std::string_view to_string(MatrixKind k);
std::string_view to_string(MatrixSharing s);
std::string_view to_string(GaussianScale s);
CoeffDist parse_coeff_dist(std::string_view s);
MatrixKind parse_matrix_kind(std::string_view s);
MatrixSharing parse_matrix_sharing(std::string_view s);
GaussianScale parse_gaussian_scale(std::string_view s);

struct EnsembleSpec {
  int N = 256;
  int M = 100;
  int K = 10;
  CoeffDist coeff_dist = CoeffDist::Uniform;
  MatrixKind matrix_kind = MatrixKind::Gaussian;
  MatrixSharing matrix_sharing = MatrixSharing::PerSample;
  GaussianScale gaussian_scale = GaussianScale::InvN;
  int trials = 500;
  std::uint64_t seed = 1;
  std::optional<double> snr_db;
  bool normalize_columns = false;

  /// Requires K < M < N and trials >= 1.
  void validate() const;
};

/// Exactly K nonzeros at distinct uniformly drawn positions.
Vector gen_sparse_signal(int N, int K, CoeffDist dist, Rng& rng);

/// Gaussian: i.i.d. N(0, sigma^2) with sigma = 1/N (or 1/sqrt(M));
/// Bernoulli: equiprobable +-1/sqrt(M). Entries are drawn column by column.
Matrix gen_matrix(int M, int N, MatrixKind kind, bool normalize_columns, Rng& rng,
                  GaussianScale scale = GaussianScale::InvN);

/// phi * x, plus white Gaussian noise of variance ||phi x||^2 / (M 10^(snr/10))
/// when snr_db is set.
Vector observe(const Matrix& phi, const Vector& x, std::optional<double> snr_db, Rng& rng);

/// Trial `trial` of the ensemble. Shared mode draws one matrix per (seed, M).
ProblemInstance make_trial(const EnsembleSpec& spec, int trial);

/// The matrix every trial uses in shared mode.
Matrix shared_matrix(const EnsembleSpec& spec);

}  // namespace astar_pursuit
