// Block-wise compressed sensing of grayscale images in an 8x8 Haar basis.
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "astar_pursuit/algorithms.hpp"
#include "astar_pursuit/linalg.hpp"

namespace astar_pursuit {

inline constexpr int kBlockSize = 8;
inline constexpr int kBlockPixels = kBlockSize * kBlockSize;

/// Row-major pixel grid. Width and height are multiples of 8. Intensities
/// are nominally in [0, 255]; intermediate (sparsified or reconstructed)
/// images may leave that range and are only clamped when written as PGM.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  int block_rows() const { return height_ / kBlockSize; }
  int block_cols() const { return width_ / kBlockSize; }

  double& at(int row, int col) { return pixels_[index(row, col)]; }
  double at(int row, int col) const { return pixels_[index(row, col)]; }
  const std::vector<double>& pixels() const { return pixels_; }

  /// Pixels of block (br, bc), row-major.
  Vector block(int br, int bc) const;
  void set_block(int br, int bc, const Vector& values);

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }
  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

/// 8x8 orthonormal 1D Haar analysis matrix (rows are basis vectors,
/// coarse to fine, three levels).
const Matrix& haar_1d();

/// 64x64 synthesis matrix Psi: block pixels (row-major) = Psi * coefficients.
/// Coefficient index r * 8 + c is entry (r, c) of H * block * H^T; index 0
/// is the scaling coefficient.
const Matrix& haar_basis();

Vector haar_analyze(const Vector& block);
Vector haar_synthesize(const Vector& coeffs);

/// Keeps the K largest-magnitude entries (ties to the lower index).
Vector sparsify(const Vector& coeffs, int K);

/// Makes every block exactly (at most) K-sparse in the Haar basis.
GrayImage sparsify_image(const GrayImage& img, int K);

struct BlockStats {
  int block_row = 0;
  int block_col = 0;
  std::size_t iterations = 0;
  double nmse = 0.0;
  bool exact = false;
  bool capped = false;
};

struct ImageReconstruction {
  GrayImage image;
  std::vector<BlockStats> blocks;  // raster order
};

/// Instrumentation for the recovery of block (br, bc).
using BlockHooks =
    std::function<AlgorithmHooks(int block_row, int block_col, const ProblemInstance& problem)>;

/// Measures each block as y = phi * pixels and recovers its Haar
/// coefficients over the holographic dictionary V = phi * Psi. `phi` must be
/// M x 64. K is the per-block sparsity handed to the algorithm.
ImageReconstruction reconstruct_image(const GrayImage& img, const Matrix& phi,
                                      const AlgorithmConfig& algorithm, int K,
                                      const BlockHooks& hooks = {});

/// 10 log10(255^2 / MSE); +infinity for identical images.
double psnr(const GrayImage& a, const GrayImage& b);

/// Binary PGM (P5, maxval 255). Throws std::runtime_error on malformed input.
GrayImage read_pgm(std::istream& in);
GrayImage read_pgm(const std::filesystem::path& path);
/// Rounds and clamps to [0, 255].
void write_pgm(std::ostream& out, const GrayImage& img);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

void write_block_stats_csv(std::ostream& out, const std::vector<BlockStats>& blocks);

/// Seeded test scene: smooth shading, a few flat shapes and mild texture.
GrayImage synthetic_image(int width, int height, std::uint64_t seed);

}  // namespace astar_pursuit
