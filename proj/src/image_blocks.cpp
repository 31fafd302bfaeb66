#include "astar_pursuit/image_blocks.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "astar_pursuit/metrics.hpp"
#include "astar_pursuit/synth.hpp"

namespace astar_pursuit {

using BlockMatrix = Eigen::Matrix<double, kBlockSize, kBlockSize, Eigen::RowMajor>;

GrayImage::GrayImage(int width, int height, double fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0 || width % kBlockSize != 0 || height % kBlockSize != 0) {
    throw std::invalid_argument("image dimensions must be positive multiples of 8 (got " +
                                std::to_string(width) + "x" + std::to_string(height) + ")");
  }
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Vector GrayImage::block(int br, int bc) const {
  Vector out(kBlockPixels);
  for (int r = 0; r < kBlockSize; ++r)
    for (int c = 0; c < kBlockSize; ++c)
      out[r * kBlockSize + c] = at(br * kBlockSize + r, bc * kBlockSize + c);
  return out;
}

void GrayImage::set_block(int br, int bc, const Vector& values) {
  if (values.size() != kBlockPixels) throw DimensionError("set_block: expected 64 values");
  for (int r = 0; r < kBlockSize; ++r)
    for (int c = 0; c < kBlockSize; ++c)
      at(br * kBlockSize + r, bc * kBlockSize + c) = values[r * kBlockSize + c];
}

const Matrix& haar_1d() {
  static const Matrix h = [] {
    Matrix m = Matrix::Zero(kBlockSize, kBlockSize);
    // Row 0 is the scaling function; each later level halves the support.
    m.row(0).setConstant(1.0 / std::sqrt(8.0));
    int row = 1;
    for (int width = kBlockSize; width >= 2; width /= 2) {
      const double amp = 1.0 / std::sqrt(static_cast<double>(width));
      for (int start = 0; start < kBlockSize; start += width) {
        for (int i = 0; i < width / 2; ++i) m(row, start + i) = amp;
        for (int i = width / 2; i < width; ++i) m(row, start + i) = -amp;
        ++row;
      }
    }
    return m;
  }();
  return h;
}

Vector haar_analyze(const Vector& block) {
  if (block.size() != kBlockPixels) throw DimensionError("haar_analyze: expected 64 values");
  const Matrix& h = haar_1d();
  const BlockMatrix b = Eigen::Map<const BlockMatrix>(block.data());
  const BlockMatrix c = h * b * h.transpose();
  return Eigen::Map<const Vector>(c.data(), kBlockPixels);
}

Vector haar_synthesize(const Vector& coeffs) {
  if (coeffs.size() != kBlockPixels) throw DimensionError("haar_synthesize: expected 64 values");
  const Matrix& h = haar_1d();
  const BlockMatrix c = Eigen::Map<const BlockMatrix>(coeffs.data());
  const BlockMatrix b = h.transpose() * c * h;
  return Eigen::Map<const Vector>(b.data(), kBlockPixels);
}

const Matrix& haar_basis() {
  static const Matrix psi = [] {
    Matrix m(kBlockPixels, kBlockPixels);
    for (int k = 0; k < kBlockPixels; ++k) m.col(k) = haar_synthesize(Vector::Unit(kBlockPixels, k));
    return m;
  }();
  return psi;
}

Vector sparsify(const Vector& coeffs, int K) {
  if (K < 0 || K > coeffs.size()) throw std::invalid_argument("sparsify: K out of range");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(coeffs.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(coeffs[a]) > std::abs(coeffs[b]);
  });
  Vector out = Vector::Zero(coeffs.size());
  for (int i = 0; i < K; ++i) out[order[static_cast<std::size_t>(i)]] = coeffs[order[static_cast<std::size_t>(i)]];
  return out;
}

GrayImage sparsify_image(const GrayImage& img, int K) {
  GrayImage out(img.width(), img.height());
  for (int br = 0; br < img.block_rows(); ++br)
    for (int bc = 0; bc < img.block_cols(); ++bc)
      out.set_block(br, bc, haar_synthesize(sparsify(haar_analyze(img.block(br, bc)), K)));
  return out;
}

ImageReconstruction reconstruct_image(const GrayImage& img, const Matrix& phi,
                                      const AlgorithmConfig& algorithm, int K,
                                      const BlockHooks& hooks) {
  if (phi.cols() != kBlockPixels) throw DimensionError("reconstruct_image: phi must have 64 columns");
  const Matrix dictionary = phi * haar_basis();

  ImageReconstruction out{GrayImage(img.width(), img.height()), {}};
  out.blocks.reserve(static_cast<std::size_t>(img.block_rows() * img.block_cols()));
  for (int br = 0; br < img.block_rows(); ++br) {
    for (int bc = 0; bc < img.block_cols(); ++bc) {
      const Vector pixels = img.block(br, bc);
      ProblemInstance problem;
      problem.phi = dictionary;
      problem.y = phi * pixels;
      problem.x_true = haar_analyze(pixels);
      problem.K = K;
      const auto outcome =
          run_algorithm(algorithm, problem, hooks ? hooks(br, bc, problem) : AlgorithmHooks{});
      out.image.set_block(br, bc, haar_synthesize(outcome.x_hat));

      BlockStats stats{br, bc, outcome.iterations, 0.0, false, outcome.capped};
      if (problem.x_true->norm() > 0.0) {
        stats.nmse = nmse(*problem.x_true, outcome.x_hat);
      } else {
        stats.nmse = outcome.x_hat.norm();
      }
      stats.exact = stats.nmse <= kExactNmse;
      out.blocks.push_back(stats);
    }
  }
  return out;
}

double psnr(const GrayImage& a, const GrayImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionError("psnr: image dimensions differ");
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < a.pixels().size(); ++i) {
    const double d = a.pixels()[i] - b.pixels()[i];
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(a.pixels().size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

int pgm_int(std::istream& in, const char* what) {
  const std::string tok = pgm_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("pgm: bad ") + what + " '" + tok + "'");
  }
}

}  // namespace

GrayImage read_pgm(std::istream& in) {
  if (pgm_token(in) != "P5") throw std::runtime_error("pgm: missing P5 magic");
  const int width = pgm_int(in, "width");
  const int height = pgm_int(in, "height");
  const int maxval = pgm_int(in, "maxval");
  if (maxval != 255) throw std::runtime_error("pgm: only maxval 255 is supported");
  if (width <= 0 || height <= 0 || width % kBlockSize || height % kBlockSize) {
    throw std::runtime_error("pgm: dimensions must be positive multiples of 8");
  }
  GrayImage img(width, height);
  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw std::runtime_error("pgm: truncated pixel data");
  }
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      img.at(r, c) = raw[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) +
                         static_cast<std::size_t>(c)];
  return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("pgm: cannot open " + path.string());
  return read_pgm(in);
}

void write_pgm(std::ostream& out, const GrayImage& img) {
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  for (double v : img.pixels()) {
    const double clamped = std::clamp(std::round(v), 0.0, 255.0);
    out.put(static_cast<char>(static_cast<unsigned char>(clamped)));
  }
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("pgm: cannot write " + path.string());
  write_pgm(out, img);
}

void write_block_stats_csv(std::ostream& out, const std::vector<BlockStats>& blocks) {
  out << "block_row,block_col,iterations,nmse,exact,capped\n";
  for (const auto& b : blocks) {
    out << b.block_row << ',' << b.block_col << ',' << b.iterations << ',' << format_real(b.nmse)
        << ',' << (b.exact ? 1 : 0) << ',' << (b.capped ? 1 : 0) << '\n';
  }
}

GrayImage synthetic_image(int width, int height, std::uint64_t seed) {
  GrayImage img(width, height);
  Rng rng(splitmix64(seed));
  const double gx = 40.0 + 60.0 * rng.uniform();
  const double gy = 30.0 + 50.0 * rng.uniform();
  struct Disc {
    double cx, cy, radius, level;
  };
  std::vector<Disc> discs;
  for (int i = 0; i < 4; ++i) {
    discs.push_back({width * rng.uniform(), height * rng.uniform(),
                     (0.1 + 0.2 * rng.uniform()) * std::min(width, height),
                     40.0 + 170.0 * rng.uniform()});
  }
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double v = 60.0 + gx * c / width + gy * r / height +
                 12.0 * std::sin(0.35 * c) * std::cos(0.21 * r);
      for (const auto& d : discs) {
        const double dx = c - d.cx;
        const double dy = r - d.cy;
        if (dx * dx + dy * dy <= d.radius * d.radius) v = d.level + 0.3 * (v - 60.0);
      }
      v += 4.0 * rng.normal();
      img.at(r, c) = std::clamp(v, 0.0, 255.0);
    }
  }
  return img;
}

}  // namespace astar_pursuit
