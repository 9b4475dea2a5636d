#include "ffp/datagen.hpp"

#include "ffp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace ffp {

namespace {

// splitmix64 finalizer; gives independent streams from one user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
  return g;
}

void require_dims(int d, int n) {
  if (d < 1 || n < 1)
    throw InvalidArgument("dimensions must be positive, got " + std::to_string(d) + "x" +
                          std::to_string(n));
}

} // namespace

Matrix gen_low_rank(int d, int n, int r, double scale, std::uint64_t seed) {
  require_dims(d, n);
  if (r < 0 || r > std::min(d, n))
    throw InvalidArgument("gen_low_rank: rank " + std::to_string(r) +
                          " exceeds min(d, n) = " + std::to_string(std::min(d, n)));
  if (!std::isfinite(scale)) throw InvalidArgument("gen_low_rank: scale must be finite");
  if (r == 0) return Matrix::Zero(d, n);
  std::mt19937_64 rng(seed);
  const Matrix a = gaussian(d, r, rng);
  const Matrix b = gaussian(n, r, rng);
  return scale * (a * b.transpose());
}

Matrix gen_sparse(int d, int n, double fraction, double magnitude, std::uint64_t seed) {
  require_dims(d, n);
  if (!(fraction >= 0.0 && fraction < 1.0))
    throw InvalidArgument("gen_sparse: fraction must lie in [0, 1)");
  if (!(magnitude > 0.0) || !std::isfinite(magnitude))
    throw InvalidArgument("gen_sparse: magnitude must be positive");

  const auto total = static_cast<std::size_t>(d) * static_cast<std::size_t>(n);
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
  Matrix s = Matrix::Zero(d, n);
  if (count == 0) return s;

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> all(total);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> picked;
  picked.reserve(count);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), count, rng);

  std::uniform_real_distribution<double> value(-magnitude, magnitude);
  for (const std::size_t idx : picked) {
    double v = 0.0;
    while (v == 0.0) v = value(rng);
    s(static_cast<Eigen::Index>(idx % d), static_cast<Eigen::Index>(idx / d)) = v;
  }
  return s;
}

SyntheticProblem make_problem(int d, int n, int r, double fraction, double magnitude,
                              std::uint64_t seed) {
  SyntheticProblem p;
  const double scale = r > 0 ? 1.0 / std::sqrt(static_cast<double>(r)) : 1.0;
  p.L_star = gen_low_rank(d, n, r, scale, derive_seed(seed, 0));
  const Matrix corruption = fraction > 0.0
                                ? gen_sparse(d, n, fraction, magnitude, derive_seed(seed, 1))
                                : Matrix::Zero(d, n);
  p.X = p.L_star + corruption;
  // The corruption as actually applied, so X - L_star - S_star is exactly zero.
  p.S_star = p.X - p.L_star;
  p.true_rank = r;
  p.corruption_fraction = fraction;
  return p;
}

PlantedOutliers make_planted_outliers(int d, int inliers, int outliers, std::uint64_t seed) {
  require_dims(d, inliers + outliers);
  if (inliers < 1 || outliers < 0)
    throw InvalidArgument("make_planted_outliers: need at least one inlier column");
  std::mt19937_64 rng(seed);
  const Vector inlier_dir = gaussian(d, 1, rng).col(0);
  const Vector outlier_dir = gaussian(d, 1, rng).col(0);
  std::uniform_real_distribution<double> weight(0.5, 1.5);

  PlantedOutliers out;
  out.X.resize(d, inliers + outliers);
  for (int j = 0; j < inliers; ++j) out.X.col(j) = weight(rng) * inlier_dir;
  for (int j = 0; j < outliers; ++j) {
    out.X.col(inliers + j) = weight(rng) * outlier_dir;
    out.outlier_columns.push_back(inliers + j);
  }
  return out;
}

SyntheticVideo make_moving_block_video(int height, int width, int frames, int block,
                                       std::uint64_t seed) {
  require_dims(height * width, frames);
  if (height < 1 || width < 1 || block < 1 || block > std::min(height, width))
    throw InvalidArgument("make_moving_block_video: block must fit inside the frame");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pixel(50.0, 200.0);
  std::uniform_real_distribution<double> gain(0.9, 1.1);
  Vector background(static_cast<Eigen::Index>(height) * width);
  for (Eigen::Index i = 0; i < background.size(); ++i) background(i) = pixel(rng);
  Vector gains(frames);
  for (int j = 0; j < frames; ++j) gains(j) = gain(rng);

  SyntheticVideo v;
  v.height = height;
  v.width = width;
  v.L_star = background * gains.transpose();
  v.X = v.L_star;
  const int top = (height - block) / 2;
  for (int j = 0; j < frames; ++j) {
    const int left = frames > 1 ? (j * (width - block)) / (frames - 1) : 0;
    for (int c = left; c < left + block; ++c)
      for (int r = top; r < top + block; ++r)
        v.X(static_cast<Eigen::Index>(c) * height + r, j) = 255.0;
  }
  v.S_star = v.X - v.L_star;
  return v;
}

} // namespace ffp
