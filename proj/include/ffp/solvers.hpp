#pragma once

#include "ffp/linalg.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ffp {

/// L = U C V^T with orthonormal U (d x k) and V (n x k) and a k x k core.
struct FactoredLowRank {
  Matrix U;
  Matrix C;
  Matrix V;

  Matrix materialize() const { return U * C * V.transpose(); }
};

enum class Method { FFFP, UFFP, IALM };

std::string to_string(Method m);
Method method_from_string(const std::string &s);

enum class InitStrategy { TruncatedSvd, RandomOrthonormal };

std::string to_string(InitStrategy s);
InitStrategy init_strategy_from_string(const std::string &s);

struct SolverConfig {
  int k = 1;
  /// U-FFP: weight on ||C||_ld (required). IALM: weight on ||S||_1, defaults
  /// to 1/sqrt(max(d, n)). Ignored by F-FFP.
  std::optional<double> lambda;
  double rho0 = 1e-4;
  double kappa = 1.5;
  double tol = 1e-3;
  int max_iter = 200;
  double rho_cap = 1e10;
  InitStrategy init = InitStrategy::TruncatedSvd;
  std::uint64_t seed = 0;
  /// Run exactly max_iter iterations regardless of the residual (benchmarks).
  bool ignore_tol = false;
  /// Threads for the O(dn) kernels; 1 selects the serial reference path.
  int threads = 1;
};

/// Throws InvalidArgument describing the first violated constraint.
void validate(const SolverConfig &cfg, Eigen::Index d, Eigen::Index n, bool needs_k);

struct SolveReport {
  std::string method;
  int iterations = 0;
  bool converged = false;
  /// Total thin_svd invocations and their split by update step.
  int svd_count = 0;
  int svd_count_v = 0;
  int svd_count_u = 0;
  int svd_count_c = 0;
  std::vector<double> per_iter_residual;
  /// max(||U^T U - I||_F, ||V^T V - I||_F) after each iteration (factored solvers).
  std::vector<double> per_iter_orthonormality;
  std::vector<double> per_iter_rho;
  int final_rank = 0;
  double sparsity_ratio = 0.0;
  double final_residual = 0.0;
  double wall_time = 0.0;
  /// ||S||_1 (F-FFP), ||S||_1 + lambda ||C||_ld (U-FFP), ||L||_* + lambda ||S||_1 (IALM).
  double final_objective = 0.0;
  double lambda = 0.0;
};

struct FactoredSolution {
  FactoredLowRank factors;
  Matrix S;
  SolveReport report;
};

struct DenseSolution {
  Matrix L;
  Matrix S;
  SolveReport report;
};

/// Read-only view of one iteration, handed to an observer just before the
/// multiplier update. `theta` and `low_rank_before` are the values the
/// S-update used; `target` is X - S + theta/rho with the new S.
struct IterationView {
  int iteration;
  double rho;
  const Matrix &x;
  const Matrix &theta;
  const Matrix &low_rank_before;
  const Matrix &sparse;
  const Matrix &target;
  const FactoredLowRank &before;
  const FactoredLowRank &after;
};

using IterationObserver = std::function<void(const IterationView &)>;

FactoredLowRank init_factors(const Matrix &x, int k, InitStrategy strategy,
                             std::uint64_t seed);

FactoredSolution solve_fffp(const Matrix &x, const SolverConfig &cfg,
                            const IterationObserver &observer = {});
FactoredSolution solve_uffp(const Matrix &x, const SolverConfig &cfg,
                            const IterationObserver &observer = {});
DenseSolution solve_ialm(const Matrix &x, const SolverConfig &cfg);

/// ||X - L - S||_F / ||X||_F. Throws InvalidArgument if X is zero.
double relative_residual(const Matrix &x, const Matrix &l, const Matrix &s);

struct LambdaSweepEntry {
  double lambda;
  FactoredSolution solution;
};

struct LambdaSweep {
  std::vector<LambdaSweepEntry> runs;
  /// Index into `runs` of the selected solution.
  std::size_t selected = 0;
};

/// Default U-FFP lambda grid: quarter decades c in [1e-2, 1e1] times
/// rho0 * ||X||_F^2. The first core shrinkage uses tau = lambda / rho0, so this
/// is the range where tau is comparable to the squared leading singular values
/// of X; larger lambdas zero the core before the sparse part can separate.
std::vector<double> default_lambda_grid(const Matrix &x, double rho0);

/// Fraction of nonzeros above which a sweep run counts as degenerate: S has
/// absorbed the data instead of the outliers.
inline constexpr double kDenseSparseRatio = 0.5;

/// Runs U-FFP for every lambda in `grid` and selects the largest lambda whose
/// run converged with rank(L) >= 1 and a non-dense S. Falls back to the
/// smallest-residual run if none qualifies. `jobs` > 1 runs grid points
/// concurrently.
LambdaSweep sweep_lambda(const Matrix &x, const SolverConfig &cfg,
                         const std::vector<double> &grid, int jobs = 1);

} // namespace ffp
