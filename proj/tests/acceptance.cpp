// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "ffp/analysis.hpp"
#include "ffp/datagen.hpp"
#include "ffp/dataio.hpp"
#include "ffp/linalg.hpp"
#include "ffp/solvers.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace ffp;
namespace fs = std::filesystem;
using ffp::testing::grid_minimize;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Worst per-iteration orthonormality seen by any factored solve in this suite.
double g_worst_orth = 0.0;
int g_orth_runs = 0;
int g_orth_iters = 0;

void track(const SolveReport &r) {
  ++g_orth_runs;
  for (double e : r.per_iter_orthonormality) {
    g_worst_orth = std::max(g_worst_orth, e);
    ++g_orth_iters;
  }
}

const SyntheticProblem &problem400() {
  static const SyntheticProblem p = make_problem(400, 400, 5, 0.05, 10.0, 7);
  return p;
}

Outcome shrinkage_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> sig(0.0, 20.0), ta(0.0, 10.0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double s = sig(rng), tau = ta(rng);
    const double x = grid_minimize(
        [&](double v) { return ffp::testing::log_det_objective(v, s, tau); }, 0.0, 2 * s + 1, 1e-5);
    Matrix d(1, 1);
    d(0, 0) = s;
    worst = std::max(worst, std::abs(ld_shrink(d, tau)(0, 0) - x));
  }
  std::mt19937_64 mrng(7);
  const Matrix d = ffp::testing::random_matrix(12, 9, mrng, 5.0);
  const double identity_err = (ld_shrink(d, 0.0) - d).cwiseAbs().maxCoeff();
  const double secs = since(start);
  return {worst <= 1e-4 && identity_err <= 1e-10 && secs < 10.0,
          fmt("max |closed form - grid| = %.2e (<= 1e-4), |ld_shrink(D,0) - D| = %.1e, %.2f s (< 10 s)",
              worst, identity_err, secs)};
}

Outcome prox_oracles() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ta(0.0, 3.0);
  double worst_soft = 0.0, worst_svt = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double tau = ta(rng);
    const Matrix m = ffp::testing::random_matrix(4, 3, rng, 2.0);
    const Matrix soft = soft_threshold(m, tau);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double v = m.data()[i], lim = std::abs(v) + tau + 1.0;
      const double x = grid_minimize(
          [&](double u) { return ffp::testing::l1_objective(u, v, tau); }, -lim, lim, 1e-7);
      worst_soft = std::max(worst_soft, std::abs(soft.data()[i] - x));
    }
    const ThinSvd svd = thin_svd(m);
    Vector shrunk(svd.sigma.size());
    for (Eigen::Index i = 0; i < shrunk.size(); ++i) {
      const double s = svd.sigma(i);
      shrunk(i) = grid_minimize([&](double u) { return ffp::testing::l1_objective(u, s, tau); },
                                0.0, s + 1.0, 1e-7);
    }
    const Matrix expected = svd.left * shrunk.asDiagonal() * svd.right.transpose();
    worst_svt = std::max(worst_svt, (svt(m, tau) - expected).cwiseAbs().maxCoeff());
  }
  return {worst_soft <= 1e-6 && worst_svt <= 1e-6,
          fmt("100 instances: soft_threshold max err %.1e, svt max err %.1e (<= 1e-6)", worst_soft,
              worst_svt)};
}

Outcome procrustes() {
  std::mt19937_64 rng(31);
  int wins = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 100; ++t) {
    const Matrix a = ffp::testing::random_matrix(8, 3, rng);
    const double best = (polar_orthogonal(a).transpose() * a).trace();
    bool all = true;
    for (int c = 0; c < 1000; ++c) {
      const double cand = (ffp::testing::random_orthonormal(8, 3, rng).transpose() * a).trace();
      min_margin = std::min(min_margin, best - cand);
      all = all && best >= cand;
    }
    wins += all;
  }
  return {wins == 100, fmt("%d/100 matrices beat all 1000 candidates (min margin %.3e)", wins, min_margin)};
}

Outcome fffp_recovery() {
  const auto &p = problem400();
  SolverConfig cfg;
  cfg.k = 5;
  const auto sol = solve_fffp(p.X, cfg);
  track(sol.report);
  const double err = recovery_error(sol.factors.materialize(), p.L_star);
  const auto &r = sol.report;
  return {err <= 1e-3 && r.final_rank == 5 && r.converged && r.final_residual <= 1e-3 &&
              r.iterations <= 200 && r.wall_time <= 30.0,
          fmt("recovery %.2e (<= 1e-3), rank %d (= 5), residual %.2e (<= 1e-3), %d iterations, %.2f s",
              err, r.final_rank, r.final_residual, r.iterations, r.wall_time)};
}

Outcome uffp_rank() {
  const auto &p = problem400();
  SolverConfig cfg;
  cfg.k = 25;
  const auto sweep = sweep_lambda(p.X, cfg, default_lambda_grid(p.X, cfg.rho0));
  int hits = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (const auto &run : sweep.runs) {
    track(run.solution.report);
    const double err = recovery_error(run.solution.factors.materialize(), p.L_star);
    if (run.solution.report.final_rank == 5 && err <= 1e-2) {
      ++hits;
      best_err = std::min(best_err, err);
    }
  }
  const auto &chosen = sweep.runs[sweep.selected];
  return {hits > 0,
          fmt("%d/%zu lambdas give rank 5 with recovery <= 1e-2 (best %.2e); selected lambda %.4g -> rank %d",
              hits, sweep.runs.size(), best_err, chosen.lambda, chosen.solution.report.final_rank)};
}

Outcome degeneracy() {
  const auto &p = problem400();
  SolverConfig cfg;
  cfg.k = 5;
  std::vector<std::array<Matrix, 4>> fffp_iters;
  std::size_t mismatches = 0, compared = 0;
  const auto a = solve_fffp(p.X, cfg, [&](const IterationView &v) {
    fffp_iters.push_back({v.after.U, v.after.C, v.after.V, v.sparse});
  });
  cfg.lambda = 0.0;
  const auto b = solve_uffp(p.X, cfg, [&](const IterationView &v) {
    const auto idx = static_cast<std::size_t>(v.iteration - 1);
    if (idx >= fffp_iters.size()) {
      ++mismatches;
      return;
    }
    const auto &f = fffp_iters[idx];
    ++compared;
    if (!(f[0] == v.after.U && f[1] == v.after.C && f[2] == v.after.V && f[3] == v.sparse)) ++mismatches;
  });
  track(a.report);
  track(b.report);
  const bool same_len = compared == fffp_iters.size();
  return {mismatches == 0 && same_len && a.S == b.S,
          fmt("%zu iterations compared, %zu differ bitwise", compared, mismatches)};
}

Outcome ialm_baseline() {
  const auto &p = problem400();
  const auto dense = solve_ialm(p.X, SolverConfig{});
  const double err = recovery_error(dense.L, p.L_star);

  const SyntheticVideo v = make_moving_block_video(32, 32, 100, 8, 5);
  SolverConfig cfg;
  cfg.k = 1;
  const auto f = solve_fffp(v.X, cfg);
  track(f.report);
  const auto i = solve_ialm(v.X, SolverConfig{});
  return {err <= 1e-2 && i.report.final_rank > 1 && f.report.final_rank == 1,
          fmt("random instance recovery %.2e (<= 1e-2); moving-block video (r = 1): IALM rank %d, F-FFP rank %d",
              err, i.report.final_rank, f.report.final_rank)};
}

Outcome anomaly() {
  int ok = 0;
  std::string misses;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = make_planted_outliers(256, 190, 10, seed);
    SolverConfig cfg;
    cfg.k = 1;
    const auto sol = solve_fffp(p.X, cfg);
    track(sol.report);
    if (anomaly_top_m(sol.S, 10).flagged == p.outlier_columns)
      ++ok;
    else
      misses += " " + std::to_string(seed);
  }
  return {ok == 10, fmt("%d/10 seeds flag exactly the planted columns%s", ok,
                        misses.empty() ? "" : (" (missed:" + misses + ")").c_str())};
}

Outcome scaling() {
  const std::vector<double> factors{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  ScalingParams params; // base d = n = 1000, k = 5, median of 3
  bool pass = true;
  std::string detail;
  for (ScalingAxis axis : {ScalingAxis::Samples, ScalingAxis::Dimension}) {
    const auto rows = scaling_benchmark(params, axis, factors, 50);
    const LinearFit fit = fit_linear(rows);
    std::map<int, double> by_size;
    for (const auto &r : rows) by_size[r.size] = r.seconds;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto &[size, secs] : by_size)
      if (by_size.count(2 * size)) {
        const double ratio = by_size[2 * size] / secs;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    pass = pass && fit.r_squared >= 0.95 && lo >= 1.4 && hi <= 2.8;
    detail += fmt("%s%s: R^2 %.4f (>= 0.95), doubling ratios [%.2f, %.2f] (within [1.4, 2.8]), t(1.0) %.2f s",
                  detail.empty() ? "" : "; ", to_string(axis).c_str(), fit.r_squared, lo, hi,
                  rows.back().seconds);
  }
  return {pass, detail};
}

Outcome orthonormality() {
  return {g_orth_runs > 0 && g_worst_orth <= 1e-8,
          fmt("%d factored runs, %d iterations, worst max(|U'U-I|, |V'V-I|) = %.2e (<= 1e-8)",
              g_orth_runs, g_orth_iters, g_worst_orth)};
}

Outcome io_round_trips() {
  const fs::path dir = fs::temp_directory_path() / "ffp_acceptance_io";
  fs::remove_all(dir);
  fs::create_directories(dir / "frames");
  fs::create_directories(dir / "rewritten");

  std::mt19937_64 rng(5);
  Matrix m = ffp::testing::random_matrix(37, 23, rng, 1e6);
  m(0, 0) = -0.0;
  m(1, 0) = std::numeric_limits<double>::denorm_min();
  m(2, 0) = std::numeric_limits<double>::infinity();
  m(3, 0) = std::numeric_limits<double>::quiet_NaN();
  write_ffpm(dir / "m.ffpm", m);
  const Matrix back = read_ffpm(dir / "m.ffpm");
  const bool ffpm_ok = back.rows() == m.rows() && back.cols() == m.cols() &&
                       std::memcmp(back.data(), m.data(), sizeof(double) * m.size()) == 0;

  const int h = 24, w = 18, frames = 6;
  std::uniform_int_distribution<int> px(0, 255);
  Matrix original(h * w, frames);
  for (Eigen::Index i = 0; i < original.size(); ++i) original.data()[i] = px(rng);
  for (int j = 0; j < frames; ++j)
    write_frame(original.col(j), h, w, dir / "frames" / ("frame" + std::to_string(j) + ".pgm"));
  const FrameStack stack = load_frame_stack(dir / "frames", 1);
  bool frames_ok = stack.matrix == original;
  auto bytes = [](const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  for (int j = 0; j < frames; ++j) {
    const auto &name = stack.frame_names[static_cast<std::size_t>(j)];
    write_frame(stack.matrix.col(j), h, w, dir / "rewritten" / name);
    frames_ok = frames_ok && bytes(dir / "rewritten" / name) == bytes(dir / "frames" / name);
  }
  fs::remove_all(dir);
  return {ffpm_ok && frames_ok, fmt("FFPM 37x23 bitwise %s; P5 stack of %d %dx%d frames load/write %s",
                                    ffpm_ok ? "identical" : "DIFFERENT", frames, h, w,
                                    frames_ok ? "identical" : "DIFFERENT")};
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"shrinkage operator oracle", shrinkage_oracle},
      {"prox oracles", prox_oracles},
      {"Procrustes optimality", procrustes},
      {"F-FFP exact recovery", fffp_recovery},
      {"U-FFP rank identification", uffp_rank},
      {"U-FFP/F-FFP degeneracy", degeneracy},
      {"IALM baseline sanity", ialm_baseline},
      {"anomaly detection", anomaly},
      {"linear scaling", scaling},
      {"per-iteration orthonormality", orthonormality},
      {"I/O round trips", io_round_trips},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
