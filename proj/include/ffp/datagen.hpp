#pragma once

#include "ffp/linalg.hpp"

#include <cstdint>
#include <vector>

namespace ffp {

/// X = L* + S* with the ground truth kept for recovery checks.
struct SyntheticProblem {
  Matrix X;
  Matrix L_star;
  Matrix S_star;
  int true_rank = 0;
  double corruption_fraction = 0.0;
};

/// A * B^T with A (d x r), B (n x r) i.i.d. N(0, 1) entries times `scale`.
Matrix gen_low_rank(int d, int n, int r, double scale, std::uint64_t seed);

/// Exactly round(fraction * d * n) nonzeros at uniformly random positions with
/// values uniform on [-magnitude, magnitude].
Matrix gen_sparse(int d, int n, double fraction, double magnitude, std::uint64_t seed);

/// Low-rank part scaled to unit-variance entries plus an independent sparse
/// corruption. Support and values are drawn from a stream distinct from the
/// factors.
SyntheticProblem make_problem(int d, int n, int r, double fraction, double magnitude,
                              std::uint64_t seed);

/// `inliers` columns spanning a single direction plus `outliers` columns drawn
/// from an independent random direction, appended last. Used to exercise
/// column-outlier detection.
struct PlantedOutliers {
  Matrix X;
  std::vector<int> outlier_columns;
};

PlantedOutliers make_planted_outliers(int d, int inliers, int outliers, std::uint64_t seed);

/// Grayscale clip of a static scene under a per-frame gain (rank-1 background)
/// with an opaque `block` x `block` square of value 255 sliding left to right
/// across the middle rows. Frames are vectorized column-major as columns of X.
/// The foreground is spatially contiguous and persistent, so the background
/// lacks the incoherence that convex RPCA relies on.
struct SyntheticVideo {
  Matrix X;
  Matrix L_star;
  Matrix S_star;
  int height = 0;
  int width = 0;
};

SyntheticVideo make_moving_block_video(int height, int width, int frames, int block,
                                       std::uint64_t seed);

} // namespace ffp
