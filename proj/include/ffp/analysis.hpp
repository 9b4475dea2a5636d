#pragma once

#include "ffp/linalg.hpp"
#include "ffp/solvers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ffp {

inline constexpr double kDefaultRankTol = 1e-6;

/// Number of singular values above rel_tol * sigma_1. Zero matrix -> 0.
int numerical_rank(const Eigen::Ref<const Matrix> &m, double rel_tol = kDefaultRankTol);

/// Same counting rule applied to an already-computed spectrum (non-increasing).
int rank_from_spectrum(const Vector &sigma, double rel_tol = kDefaultRankTol);

/// Fraction of entries with |s_ij| > abs_tol.
double sparsity_ratio(const Eigen::Ref<const Matrix> &s, double abs_tol = 0.0);

struct Metrics {
  int rank_L = 0;
  double sparsity_ratio = 0.0;
  double residual = 0.0;
  std::optional<double> recovery_error;
};

Metrics compute_metrics(const Matrix &x, const Matrix &l, const Matrix &s,
                        const Matrix *l_star = nullptr, double rank_tol = kDefaultRankTol,
                        double sparsity_tol = 0.0);

/// ||L - L*||_F / ||L*||_F
double recovery_error(const Matrix &l, const Matrix &l_star);

struct AnomalyResult {
  Vector scores;              // l2 norm of each column of S
  std::vector<int> flagged;   // ascending column indices
};

/// Flags every column whose score is >= threshold.
AnomalyResult anomaly_detect(const Matrix &s, double threshold);

/// Flags the `m` highest-scoring columns (ties broken by lower index). Columns
/// with a zero score are never flagged.
AnomalyResult anomaly_top_m(const Matrix &s, int m);

// ---------------------------------------------------------------------------
// Scaling benchmark

enum class ScalingAxis { Samples, Dimension };

std::string to_string(ScalingAxis a);
ScalingAxis scaling_axis_from_string(const std::string &s);

struct ScalingParams {
  int base_d = 1000;
  int base_n = 1000;
  int rank = 5;
  double fraction = 0.05;
  double magnitude = 10.0;
  std::uint64_t seed = 1;
  int k = 5;
  /// U-FFP only; defaults to the middle of default_lambda_grid when unset.
  std::optional<double> lambda;
  int repeats = 3;
};

struct ScalingRow {
  double factor;
  int d;
  int n;
  /// The scaled dimension (n for Samples, d for Dimension).
  int size;
  double seconds;
};

/// For each factor, scales one axis of the base problem, runs the solver for
/// exactly `iters` iterations and records the median wall time of
/// `params.repeats` runs. Generation is excluded from the timing.
std::vector<ScalingRow> scaling_benchmark(const ScalingParams &params, ScalingAxis axis,
                                          const std::vector<double> &factors, int iters,
                                          Method method = Method::FFFP);

struct LinearFit {
  double slope;
  double intercept;
  double r_squared;
};

/// Ordinary least squares of seconds against size.
LinearFit fit_linear(const std::vector<ScalingRow> &rows);

} // namespace ffp
