#include "ffp/analysis.hpp"

#include "ffp/datagen.hpp"
#include "ffp/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace ffp {

std::string to_string(ScalingAxis a) {
  return a == ScalingAxis::Samples ? "samples" : "dimension";
}

ScalingAxis scaling_axis_from_string(const std::string &s) {
  if (s == "samples") return ScalingAxis::Samples;
  if (s == "dimension") return ScalingAxis::Dimension;
  throw InvalidArgument("unknown axis '" + s + "'");
}

namespace {

double time_solve(const Matrix &x, const SolverConfig &cfg, Method method) {
  const auto start = std::chrono::steady_clock::now();
  switch (method) {
  case Method::FFFP: (void)solve_fffp(x, cfg); break;
  case Method::UFFP: (void)solve_uffp(x, cfg); break;
  case Method::IALM: (void)solve_ialm(x, cfg); break;
  }
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

std::vector<ScalingRow> scaling_benchmark(const ScalingParams &params, ScalingAxis axis,
                                          const std::vector<double> &factors, int iters,
                                          Method method) {
  if (factors.empty()) throw InvalidArgument("scaling_benchmark: no factors given");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (!(factors[i] > 0.0)) throw InvalidArgument("scaling_benchmark: factors must be positive");
    if (i > 0 && !(factors[i] > factors[i - 1]))
      throw InvalidArgument("scaling_benchmark: factors must be ascending");
  }
  if (iters < 1) throw InvalidArgument("scaling_benchmark: iters must be positive");
  if (params.repeats < 1) throw InvalidArgument("scaling_benchmark: repeats must be positive");

  struct Case {
    ScalingRow row;
    Matrix x;
    SolverConfig cfg;
    std::vector<double> times;
  };
  std::vector<Case> cases;
  for (const double factor : factors) {
    int d = params.base_d;
    int n = params.base_n;
    int &scaled = axis == ScalingAxis::Samples ? n : d;
    scaled = std::max(1, static_cast<int>(std::lround(factor * scaled)));
    const int rank = std::min({params.rank, d, n});
    SyntheticProblem p = make_problem(d, n, rank, params.fraction, params.magnitude, params.seed);

    SolverConfig cfg;
    cfg.k = std::min({params.k, d, n});
    cfg.max_iter = iters;
    cfg.ignore_tol = true;
    // Random init keeps the whole solve O(dnk); a full SVD of X would not be.
    cfg.init = InitStrategy::RandomOrthonormal;
    cfg.seed = params.seed;
    cfg.threads = 1;
    if (method == Method::UFFP) cfg.lambda = params.lambda.value_or(default_lambda_grid(p.X, cfg.rho0)[6]);
    if (method == Method::IALM) cfg.lambda = params.lambda;
    cases.push_back(Case{ScalingRow{factor, d, n, scaled, 0.0}, std::move(p.X), cfg, {}});
  }

  // Untimed warm-up, then repeats interleaved across sizes so that slow
  // stretches on a shared machine hit every size alike instead of a block.
  (void)time_solve(cases.front().x, cases.front().cfg, method);
  for (int rep = 0; rep < params.repeats; ++rep)
    for (auto &c : cases) c.times.push_back(time_solve(c.x, c.cfg, method));

  std::vector<ScalingRow> rows;
  for (auto &c : cases) {
    std::nth_element(c.times.begin(), c.times.begin() + c.times.size() / 2, c.times.end());
    c.row.seconds = c.times[c.times.size() / 2];
    rows.push_back(c.row);
  }
  return rows;
}

LinearFit fit_linear(const std::vector<ScalingRow> &rows) {
  if (rows.size() < 2) throw InvalidArgument("fit_linear: need at least two rows");
  const double m = static_cast<double>(rows.size());
  double sx = 0, sy = 0;
  for (const auto &r : rows) {
    sx += r.size;
    sy += r.seconds;
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto &r : rows) {
    sxx += (r.size - mx) * (r.size - mx);
    sxy += (r.size - mx) * (r.seconds - my);
    syy += (r.seconds - my) * (r.seconds - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_linear: sizes are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

} // namespace ffp
