#include "ffp/solvers.hpp"

#include "ffp/analysis.hpp"
#include "ffp/errors.hpp"
#include "ffp/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

namespace ffp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Matrix orthonormal_gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

double relative(double residual_sq, double x_norm) {
  // X = 0 has no scale; fall back to the absolute residual.
  const double r = std::sqrt(residual_sq);
  return x_norm > 0.0 ? r / x_norm : r;
}

FactoredSolution solve_factored(const Matrix &x, const SolverConfig &cfg, bool unfixed,
                                const IterationObserver &observer) {
  validate(cfg, x.rows(), x.cols(), true);
  require_finite(x, unfixed ? "solve_uffp" : "solve_fffp");
  double lambda = 0.0;
  if (unfixed) {
    if (!cfg.lambda) throw InvalidArgument("solve_uffp: lambda is required");
    lambda = *cfg.lambda;
  }

  const auto start = Clock::now();
  const int threads = cfg.threads;
  const double x_norm = std::sqrt(kernels::squared_norm(x, threads));

  SolveReport report;
  report.method = unfixed ? "uffp" : "fffp";
  report.lambda = lambda;

  FactoredLowRank f = init_factors(x, cfg.k, cfg.init, cfg.seed);
  if (cfg.init == InitStrategy::TruncatedSvd) ++report.svd_count;

  Matrix sparse = Matrix::Zero(x.rows(), x.cols());
  Matrix theta = Matrix::Zero(x.rows(), x.cols());
  Matrix low_rank = f.materialize();
  Matrix next_low_rank;
  Matrix target;
  FactoredLowRank before;
  double rho = cfg.rho0;

  for (int it = 1; it <= cfg.max_iter; ++it) {
    kernels::shrink_residual(x, low_rank, theta, rho, 1.0 / rho, sparse, threads);
    kernels::shifted_target(x, sparse, theta, rho, target, threads);
    if (!target.allFinite()) throw DivergenceError(it, "non-finite sparse part or multiplier");
    if (observer) before = f;

    f.V = polar_orthogonal(target.transpose() * (f.U * f.C));
    ++report.svd_count_v;
    const Matrix target_v = target * f.V;
    f.U = polar_orthogonal(target_v * f.C.transpose());
    ++report.svd_count_u;
    Matrix core = f.U.transpose() * target_v;
    const double tau = lambda / rho;
    if (unfixed && tau > 0.0) {
      f.C = ld_shrink(core, tau);
      ++report.svd_count_c;
    } else {
      f.C = std::move(core);
    }
    if (!f.C.allFinite()) throw DivergenceError(it, "non-finite core matrix");

    const double orth = std::max(orthonormality_error(f.U), orthonormality_error(f.V));
    assert(orth <= 1e-8);
    next_low_rank.noalias() = f.U * (f.C * f.V.transpose());

    if (observer)
      observer(IterationView{it, rho, x, theta, low_rank, sparse, target, before, f});

    const double r2 = kernels::update_multiplier(x, next_low_rank, sparse, rho, theta, threads);
    low_rank.swap(next_low_rank);
    const double residual = relative(r2, x_norm);
    if (!std::isfinite(residual)) throw DivergenceError(it, "non-finite residual");

    report.iterations = it;
    report.per_iter_residual.push_back(residual);
    report.per_iter_orthonormality.push_back(orth);
    report.per_iter_rho.push_back(rho);
    rho = std::min(rho * cfg.kappa, cfg.rho_cap);

    if (!cfg.ignore_tol && residual <= cfg.tol) {
      report.converged = true;
      break;
    }
  }

  report.svd_count += report.svd_count_v + report.svd_count_u + report.svd_count_c;
  report.final_residual = report.per_iter_residual.back();
  report.final_rank = numerical_rank(f.C);
  report.sparsity_ratio = sparsity_ratio(sparse);
  report.final_objective = kernels::l1_norm(sparse, threads);
  if (unfixed) report.final_objective += lambda * log_det_surrogate(f.C);
  report.wall_time = seconds_since(start);
  return FactoredSolution{std::move(f), std::move(sparse), std::move(report)};
}

} // namespace

std::string to_string(Method m) {
  switch (m) {
  case Method::FFFP: return "fffp";
  case Method::UFFP: return "uffp";
  case Method::IALM: return "ialm";
  }
  return "?";
}

Method method_from_string(const std::string &s) {
  if (s == "fffp") return Method::FFFP;
  if (s == "uffp") return Method::UFFP;
  if (s == "ialm") return Method::IALM;
  throw InvalidArgument("unknown method '" + s + "'");
}

std::string to_string(InitStrategy s) {
  return s == InitStrategy::TruncatedSvd ? "truncated-svd" : "random-orthonormal";
}

InitStrategy init_strategy_from_string(const std::string &s) {
  if (s == "truncated-svd") return InitStrategy::TruncatedSvd;
  if (s == "random-orthonormal") return InitStrategy::RandomOrthonormal;
  throw InvalidArgument("unknown init strategy '" + s + "'");
}

void validate(const SolverConfig &cfg, Eigen::Index d, Eigen::Index n, bool needs_k) {
  if (d < 1 || n < 1) throw InvalidArgument("input matrix must be nonempty");
  if (needs_k && (cfg.k < 1 || cfg.k > std::min(d, n)))
    throw InvalidArgument("k must lie in [1, min(d, n)] = [1, " +
                          std::to_string(std::min(d, n)) + "], got " +
                          std::to_string(cfg.k));
  if (cfg.lambda && !(*cfg.lambda >= 0.0 && std::isfinite(*cfg.lambda)))
    throw InvalidArgument("lambda must be finite and nonnegative");
  if (!(cfg.rho0 > 0.0) || !std::isfinite(cfg.rho0))
    throw InvalidArgument("rho0 must be positive");
  if (!(cfg.kappa > 1.0) || !std::isfinite(cfg.kappa))
    throw InvalidArgument("kappa must exceed 1");
  if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) throw InvalidArgument("tol must lie in (0, 1)");
  if (cfg.max_iter < 1) throw InvalidArgument("max_iter must be positive");
  if (!(cfg.rho_cap >= cfg.rho0) || !std::isfinite(cfg.rho_cap))
    throw InvalidArgument("rho_cap must be finite and >= rho0");
  if (cfg.threads < 1) throw InvalidArgument("threads must be positive");
}

FactoredLowRank init_factors(const Matrix &x, int k, InitStrategy strategy,
                             std::uint64_t seed) {
  if (k < 1 || k > std::min(x.rows(), x.cols()))
    throw InvalidArgument("init_factors: k must lie in [1, min(d, n)]");
  FactoredLowRank f;
  if (strategy == InitStrategy::TruncatedSvd) {
    const ThinSvd svd = thin_svd(x);
    f.U = svd.left.leftCols(k);
    f.V = svd.right.leftCols(k);
    f.C = svd.sigma.head(k).asDiagonal();
  } else {
    require_finite(x, "init_factors");
    std::mt19937_64 rng(seed);
    f.U = orthonormal_gaussian(x.rows(), k, rng);
    f.V = orthonormal_gaussian(x.cols(), k, rng);
    f.C = f.U.transpose() * (x * f.V);
  }
  return f;
}

FactoredSolution solve_fffp(const Matrix &x, const SolverConfig &cfg,
                            const IterationObserver &observer) {
  return solve_factored(x, cfg, false, observer);
}

FactoredSolution solve_uffp(const Matrix &x, const SolverConfig &cfg,
                            const IterationObserver &observer) {
  return solve_factored(x, cfg, true, observer);
}

DenseSolution solve_ialm(const Matrix &x, const SolverConfig &cfg) {
  validate(cfg, x.rows(), x.cols(), false);
  require_finite(x, "solve_ialm");
  const auto start = Clock::now();
  const int threads = cfg.threads;
  const double lambda =
      cfg.lambda.value_or(1.0 / std::sqrt(static_cast<double>(std::max(x.rows(), x.cols()))));
  const double x_norm = std::sqrt(kernels::squared_norm(x, threads));

  SolveReport report;
  report.method = "ialm";
  report.lambda = lambda;

  Matrix sparse = Matrix::Zero(x.rows(), x.cols());
  Matrix theta = Matrix::Zero(x.rows(), x.cols());
  Matrix low_rank = Matrix::Zero(x.rows(), x.cols());
  Matrix target;
  Vector shrunk;
  double rho = cfg.rho0;

  for (int it = 1; it <= cfg.max_iter; ++it) {
    kernels::shifted_target(x, sparse, theta, rho, target, threads);
    if (!target.allFinite()) throw DivergenceError(it, "non-finite sparse part or multiplier");
    const ThinSvd svd = thin_svd(target);
    ++report.svd_count;
    shrunk = (svd.sigma.array() - 1.0 / rho).max(0.0).matrix();
    const Eigen::Index kept = (shrunk.array() > 0.0).count();
    low_rank.noalias() = svd.left.leftCols(kept) * shrunk.head(kept).asDiagonal() *
                         svd.right.leftCols(kept).transpose();

    kernels::shrink_residual(x, low_rank, theta, rho, lambda / rho, sparse, threads);
    const double r2 = kernels::update_multiplier(x, low_rank, sparse, rho, theta, threads);
    const double residual = relative(r2, x_norm);
    if (!std::isfinite(residual)) throw DivergenceError(it, "non-finite residual");

    report.iterations = it;
    report.per_iter_residual.push_back(residual);
    report.per_iter_rho.push_back(rho);
    rho = std::min(rho * cfg.kappa, cfg.rho_cap);

    if (!cfg.ignore_tol && residual <= cfg.tol) {
      report.converged = true;
      break;
    }
  }

  report.final_residual = report.per_iter_residual.back();
  report.final_rank = rank_from_spectrum(shrunk);
  report.sparsity_ratio = sparsity_ratio(sparse);
  report.final_objective = shrunk.sum() + lambda * kernels::l1_norm(sparse, threads);
  report.wall_time = seconds_since(start);
  return DenseSolution{std::move(low_rank), std::move(sparse), std::move(report)};
}

double relative_residual(const Matrix &x, const Matrix &l, const Matrix &s) {
  if (x.rows() != l.rows() || x.cols() != l.cols() || x.rows() != s.rows() ||
      x.cols() != s.cols())
    throw InvalidArgument("relative_residual: dimension mismatch");
  const double x_norm = x.norm();
  if (x_norm == 0.0) throw InvalidArgument("relative_residual: ||X||_F is zero");
  return (x - l - s).norm() / x_norm;
}

std::vector<double> default_lambda_grid(const Matrix &x, double rho0) {
  const double scale = rho0 * x.squaredNorm();
  std::vector<double> grid;
  for (int q = -8; q <= 4; ++q) grid.push_back(std::pow(10.0, q / 4.0) * scale);
  return grid;
}

LambdaSweep sweep_lambda(const Matrix &x, const SolverConfig &cfg,
                         const std::vector<double> &grid, int jobs) {
  if (grid.empty()) throw InvalidArgument("sweep_lambda: empty grid");
  validate(cfg, x.rows(), x.cols(), true);

  std::vector<std::optional<FactoredSolution>> results(grid.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        SolverConfig c = cfg;
        c.lambda = grid[i];
        results[i] = solve_uffp(x, c);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int n_workers = std::clamp(jobs, 1, static_cast<int>(grid.size()));
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  LambdaSweep sweep;
  for (std::size_t i = 0; i < grid.size(); ++i)
    sweep.runs.push_back(LambdaSweepEntry{grid[i], std::move(*results[i])});

  std::optional<std::size_t> pick;
  for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
    const auto &r = sweep.runs[i].solution.report;
    if (r.converged && r.final_rank > 0 && r.sparsity_ratio < kDenseSparseRatio &&
        (!pick || sweep.runs[i].lambda > sweep.runs[*pick].lambda))
      pick = i;
  }
  if (!pick) {
    pick = 0;
    for (std::size_t i = 1; i < sweep.runs.size(); ++i)
      if (sweep.runs[i].solution.report.final_residual <
          sweep.runs[*pick].solution.report.final_residual)
        pick = i;
  }
  sweep.selected = *pick;
  return sweep;
}

} // namespace ffp
