#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "astar_pursuit/image_blocks.hpp"
#include "astar_pursuit/synth.hpp"

namespace astar_pursuit {
namespace {

Vector random_block(std::uint64_t seed) {
  Rng rng(seed);
  Vector b(kBlockPixels);
  for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = 255.0 * rng.uniform();
  return b;
}

TEST(Haar, ConstantBlockIsPureDc) {
  const Vector c = haar_analyze(Vector::Constant(kBlockPixels, 3.5));
  EXPECT_NEAR(c[0], 28.0, 1e-12);
  EXPECT_LE(c.tail(63).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Haar, ZeroBlock) {
  EXPECT_TRUE(haar_analyze(Vector::Zero(kBlockPixels)).isZero(0.0));
}

TEST(Haar, RoundTripAndParseval) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Vector b = random_block(seed);
    const Vector c = haar_analyze(b);
    EXPECT_LE((haar_synthesize(c) - b).norm(), 1e-10 * b.norm());
    EXPECT_NEAR(c.norm(), b.norm(), 1e-10 * b.norm());
  }
}

TEST(Haar, BasisIsOrthonormal) {
  const Matrix& psi = haar_basis();
  ASSERT_EQ(psi.rows(), 64);
  EXPECT_LE((psi.transpose() * psi - Matrix::Identity(64, 64)).cwiseAbs().maxCoeff(), 1e-12);
  const Matrix& h = haar_1d();
  EXPECT_LE((h * h.transpose() - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-12);
}

// Separable definition: coefficient (r, c) of H * B * H^T.
TEST(Haar, MatchesSeparableTransform) {
  const Vector b = random_block(77);
  Matrix block(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) block(r, c) = b[r * 8 + c];
  const Matrix C = haar_1d() * block * haar_1d().transpose();
  const Vector got = haar_analyze(b);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) EXPECT_NEAR(got[r * 8 + c], C(r, c), 1e-10);
}

TEST(Sparsify, FullKIsIdentity) {
  const Vector c = random_block(1);
  EXPECT_TRUE(sparsify(c, 64) == c);
}

TEST(Sparsify, AlreadySparseUnchanged) {
  Vector c = Vector::Zero(64);
  c[3] = 2.0;
  c[40] = -1.0;
  c[63] = 0.5;
  EXPECT_TRUE(sparsify(c, 3) == c);
  EXPECT_TRUE(sparsify(c, 5) == c);
}

TEST(Sparsify, EnergyMatchesSortOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    Vector c(64);
    for (Eigen::Index i = 0; i < 64; ++i) c[i] = rng.normal();
    std::vector<double> sq(64);
    for (int i = 0; i < 64; ++i) sq[static_cast<std::size_t>(i)] = c[i] * c[i];
    std::sort(sq.rbegin(), sq.rend());
    double want = 0.0;
    for (int i = 0; i < 14; ++i) want += sq[static_cast<std::size_t>(i)];
    const Vector s = sparsify(c, 14);
    EXPECT_NEAR(s.squaredNorm(), want, 1e-12 * want);
    EXPECT_EQ((s.array() != 0.0).count(), 14);
  }
}

TEST(Sparsify, TiesKeepLowerIndex) {
  Vector c = Vector::Zero(64);
  c[5] = 1.0;
  c[9] = -1.0;
  c[20] = 1.0;
  const Vector s = sparsify(c, 2);
  EXPECT_EQ(s[5], 1.0);
  EXPECT_EQ(s[9], -1.0);
  EXPECT_EQ(s[20], 0.0);
}

TEST(Psnr, Anchors) {
  GrayImage a(8, 8, 0.0);
  EXPECT_EQ(psnr(a, a), std::numeric_limits<double>::infinity());
  EXPECT_NEAR(psnr(a, GrayImage(8, 8, 255.0)), 0.0, 1e-12);
  EXPECT_NEAR(psnr(a, GrayImage(8, 8, 1.0)), 10.0 * std::log10(65025.0), 1e-12);
  EXPECT_NEAR(psnr(a, GrayImage(8, 8, 1.0)), 48.1308, 1e-4);
  EXPECT_THROW(psnr(a, GrayImage(16, 8)), DimensionError);
}

TEST(Image, DimensionsMustBeBlockAligned) {
  EXPECT_THROW(GrayImage(10, 8), std::invalid_argument);
  EXPECT_NO_THROW(GrayImage(16, 24));
}

TEST(Image, ReassemblyIsLossless) {
  const GrayImage img = sparsify_image(synthetic_image(32, 24, 5), 14);
  GrayImage out(img.width(), img.height());
  for (int br = 0; br < img.block_rows(); ++br)
    for (int bc = 0; bc < img.block_cols(); ++bc)
      out.set_block(br, bc, haar_synthesize(haar_analyze(img.block(br, bc))));
  for (std::size_t i = 0; i < img.pixels().size(); ++i)
    EXPECT_NEAR(out.pixels()[i], img.pixels()[i], 1e-10);
}

TEST(Image, SparsifiedBlocksHaveAtMostKCoefficients) {
  const GrayImage img = sparsify_image(synthetic_image(64, 64, 2), 14);
  for (int br = 0; br < img.block_rows(); ++br)
    for (int bc = 0; bc < img.block_cols(); ++bc) {
      const Vector c = haar_analyze(img.block(br, bc));
      EXPECT_LE((c.array().abs() > 1e-9).count(), 14);
    }
}

TEST(Reconstruct, PiecewiseConstantTiles) {
  GrayImage img(32, 32);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) img.at(r, c) = 20.0 + 7.0 * ((r / 8) * 4 + c / 8);
  Rng rng = Rng::stream(1, 3, 0);
  const Matrix phi = gen_matrix(32, 64, MatrixKind::Gaussian, false, rng);
  for (auto id : {AlgorithmId::Omp, AlgorithmId::Sp, AlgorithmId::MulAstar}) {
    AlgorithmConfig cfg;
    cfg.id = id;
    const auto rec = reconstruct_image(img, phi, cfg, 1);
    EXPECT_GE(psnr(img, rec.image), 100.0) << to_string(id);
    EXPECT_EQ(rec.blocks.size(), 16u);
    for (const auto& b : rec.blocks) EXPECT_TRUE(b.exact);
  }
}

TEST(Reconstruct, RejectsWrongPhiShape) {
  const GrayImage img(8, 8, 1.0);
  EXPECT_THROW(reconstruct_image(img, Matrix::Zero(32, 60), AlgorithmConfig{}, 1), DimensionError);
}

TEST(Pgm, RoundTrip) {
  GrayImage img(16, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 16; ++c) img.at(r, c) = (r * 16 + c) % 256;
  std::stringstream buf;
  write_pgm(buf, img);
  const GrayImage back = read_pgm(buf);
  EXPECT_EQ(back.width(), 16);
  EXPECT_EQ(back.height(), 8);
  EXPECT_EQ(back.pixels(), img.pixels());
}

TEST(Pgm, ClampsOnWrite) {
  GrayImage img(8, 8, 300.0);
  img.at(0, 0) = -4.0;
  img.at(0, 1) = 12.6;
  std::stringstream buf;
  write_pgm(buf, img);
  const GrayImage back = read_pgm(buf);
  EXPECT_EQ(back.at(0, 0), 0.0);
  EXPECT_EQ(back.at(0, 1), 13.0);
  EXPECT_EQ(back.at(5, 5), 255.0);
}

TEST(Pgm, CommentsInHeader) {
  std::string data = "P5\n# made by hand\n8 8\n255\n" + std::string(64, '\x07');
  std::istringstream in(data);
  const GrayImage img = read_pgm(in);
  EXPECT_EQ(img.at(7, 7), 7.0);
}

TEST(Pgm, MalformedInput) {
  std::istringstream wrong_magic("P2\n8 8\n255\n");
  EXPECT_THROW(read_pgm(wrong_magic), std::runtime_error);
  std::istringstream truncated("P5\n8 8\n255\n" + std::string(10, 'a'));
  EXPECT_THROW(read_pgm(truncated), std::runtime_error);
  std::istringstream bad_size("P5\n9 8\n255\n" + std::string(72, 'a'));
  EXPECT_THROW(read_pgm(bad_size), std::runtime_error);
  EXPECT_THROW(read_pgm(std::filesystem::path("/nonexistent/x.pgm")), std::runtime_error);
}

TEST(BlockStatsCsv, Header) {
  std::ostringstream out;
  write_block_stats_csv(out, {BlockStats{0, 1, 3, 0.0, true, false}});
  EXPECT_EQ(out.str(), "block_row,block_col,iterations,nmse,exact,capped\n0,1,3,0,1,0\n");
}

TEST(SyntheticImage, SeededAndInRange) {
  const GrayImage a = synthetic_image(64, 64, 9);
  const GrayImage b = synthetic_image(64, 64, 9);
  EXPECT_EQ(a.pixels(), b.pixels());
  EXPECT_NE(a.pixels(), synthetic_image(64, 64, 10).pixels());
  for (double v : a.pixels()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 255.0);
  }
}

}  // namespace
}  // namespace astar_pursuit
