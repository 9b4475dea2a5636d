#include "cli.hpp"

#include "ffp/analysis.hpp"
#include "ffp/datagen.hpp"
#include "ffp/dataio.hpp"
#include "ffp/errors.hpp"
#include "ffp/solvers.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#ifndef FFP_VERSION
#define FFP_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace ffp::cli {

namespace {

struct SolverFlags {
  std::string method = "fffp";
  int k = 1;
  std::optional<double> lambda;
  bool lambda_sweep = false;
  double rho0 = 1e-4;
  double kappa = 1.5;
  double tol = 1e-3;
  int max_iter = 200;
  double rho_cap = 1e10;
  std::string init = "truncated-svd";
  std::uint64_t seed = 0;
  int threads = 1;
  int jobs = 1;
  double rank_tol = kDefaultRankTol;
  double sparsity_tol = 0.0;

  void attach(CLI::App &app, bool with_method) {
    if (with_method)
      app.add_option("--method", method, "Solver")->check(CLI::IsMember({"fffp", "uffp", "ialm"}));
    app.add_option("--k", k, "Factor width (upper bound on the rank)");
    app.add_option("--lambda", lambda, "U-FFP log-det weight / IALM sparsity weight");
    app.add_flag("--lambda-sweep", lambda_sweep, "U-FFP: sweep the default lambda grid");
    app.add_option("--rho0", rho0, "Initial penalty");
    app.add_option("--kappa", kappa, "Penalty growth factor");
    app.add_option("--tol", tol, "Relative residual stopping threshold");
    app.add_option("--max-iter", max_iter, "Iteration cap");
    app.add_option("--rho-cap", rho_cap, "Upper bound on the penalty");
    app.add_option("--init", init, "Factor initialization")
        ->check(CLI::IsMember({"truncated-svd", "random-orthonormal"}));
    app.add_option("--seed", seed, "Seed for random initialization");
    app.add_option("--threads", threads, "Threads for the O(dn) kernels");
    app.add_option("--jobs", jobs, "Concurrent solves during a lambda sweep");
    app.add_option("--rank-tol", rank_tol, "Relative singular value cutoff for rank(L)");
    app.add_option("--sparsity-tol", sparsity_tol, "Absolute cutoff for counting nonzeros of S");
  }

  SolverConfig config() const {
    SolverConfig cfg;
    cfg.k = k;
    cfg.lambda = lambda;
    cfg.rho0 = rho0;
    cfg.kappa = kappa;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    cfg.rho_cap = rho_cap;
    cfg.init = init_strategy_from_string(init);
    cfg.seed = seed;
    cfg.threads = threads;
    return cfg;
  }
};

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Manifest {
  std::string command;
  json config = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::optional<std::uint64_t> seed;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write(const fs::path &dir) {
    json j;
    j["command"] = command;
    j["config"] = config;
    j["inputs"] = inputs;
    outputs.push_back((dir / "manifest.json").string());
    j["outputs"] = outputs;
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["tool_version"] = FFP_VERSION;
    j["wall_time"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json(dir / "manifest.json", j);
  }
};

void ensure_dir(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
}

void save(Manifest &m, const fs::path &path, const Matrix &mat) {
  write_matrix(path, mat);
  m.outputs.push_back(path.string());
}

json metrics_json(const Metrics &m) {
  json j;
  j["rank_L"] = m.rank_L;
  j["sparsity_ratio"] = m.sparsity_ratio;
  j["residual"] = m.residual;
  j["recovery_error"] = m.recovery_error ? json(*m.recovery_error) : json(nullptr);
  return j;
}

// Residual guard: metrics are undefined for X = 0; report zeros instead.
Metrics safe_metrics(const Matrix &x, const Matrix &l, const Matrix &s, const Matrix *truth,
                     const SolverFlags &f) {
  if (x.norm() == 0.0) {
    Metrics m;
    m.rank_L = numerical_rank(l, f.rank_tol);
    m.sparsity_ratio = sparsity_ratio(s, f.sparsity_tol);
    if (truth) m.recovery_error = recovery_error(l, *truth);
    return m;
  }
  return compute_metrics(x, l, s, truth, f.rank_tol, f.sparsity_tol);
}

struct Decomposition {
  Matrix L;
  Matrix S;
  std::optional<FactoredLowRank> factors;
  SolveReport report;
  json sweep;
};

Decomposition decompose(const Matrix &x, const SolverFlags &flags) {
  SolverConfig cfg = flags.config();
  Decomposition out;
  const Method method = method_from_string(flags.method);
  if (method == Method::IALM) {
    DenseSolution sol = solve_ialm(x, cfg);
    out.L = std::move(sol.L);
    out.S = std::move(sol.S);
    out.report = std::move(sol.report);
    return out;
  }
  FactoredSolution sol;
  if (method == Method::UFFP && flags.lambda_sweep) {
    const auto grid = flags.lambda ? std::vector<double>{*flags.lambda}
                                   : default_lambda_grid(x, cfg.rho0);
    LambdaSweep sweep = sweep_lambda(x, cfg, grid, flags.jobs);
    out.sweep = json::array();
    for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
      const auto &r = sweep.runs[i].solution.report;
      out.sweep.push_back({{"lambda", sweep.runs[i].lambda},
                           {"converged", r.converged},
                           {"final_rank", r.final_rank},
                           {"sparsity_ratio", r.sparsity_ratio},
                           {"final_residual", r.final_residual},
                           {"iterations", r.iterations},
                           {"selected", i == sweep.selected}});
    }
    sol = std::move(sweep.runs[sweep.selected].solution);
  } else if (method == Method::UFFP) {
    if (!flags.lambda) throw UsageError("--method uffp needs --lambda or --lambda-sweep");
    sol = solve_uffp(x, cfg);
  } else {
    sol = solve_fffp(x, cfg);
  }
  out.L = sol.factors.materialize();
  out.S = std::move(sol.S);
  out.factors = std::move(sol.factors);
  out.report = std::move(sol.report);
  return out;
}

json report_json(const Decomposition &dec, const SolverFlags &flags, const Metrics &metrics) {
  json j;
  j["report"] = to_json(dec.report);
  j["config"] = to_json(flags.config());
  j["config"]["method"] = flags.method;
  j["config"]["lambda_sweep"] = flags.lambda_sweep;
  j["metrics"] = metrics_json(metrics);
  if (!dec.sweep.is_null()) j["lambda_sweep"] = dec.sweep;
  return j;
}

std::vector<double> parse_factors(const std::string &text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception &) {
      throw UsageError("--factors: '" + tok + "' is not a number");
    }
  }
  if (out.empty()) throw UsageError("--factors must list at least one value");
  return out;
}

// --- commands ----------------------------------------------------------------

struct SynthFlags {
  std::string kind = "lowrank";
  int d = 200, n = 200, rank = 5;
  double fraction = 0.05, magnitude = 10.0;
  int outliers = 10;
  int height = 32, width = 32, block = 8;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_synth(const SynthFlags &f) {
  Manifest m;
  m.command = "synth";
  m.seed = f.seed;
  m.config = {{"kind", f.kind}, {"d", f.d}, {"n", f.n}, {"rank", f.rank}, {"fraction", f.fraction},
              {"magnitude", f.magnitude}, {"outliers", f.outliers}, {"height", f.height},
              {"width", f.width}, {"block", f.block}, {"seed", f.seed}};
  const fs::path out = f.out;

  if (f.kind == "lowrank") {
    if (f.rank < 0 || f.rank > std::min(f.d, f.n))
      throw UsageError("--rank must lie in [0, min(d, n)]");
    const SyntheticProblem p = make_problem(f.d, f.n, f.rank, f.fraction, f.magnitude, f.seed);
    ensure_dir(out);
    save(m, out / "X.ffpm", p.X);
    save(m, out / "L_star.ffpm", p.L_star);
    save(m, out / "S_star.ffpm", p.S_star);
  } else if (f.kind == "outliers") {
    const int inliers = f.n - f.outliers;
    if (inliers < 1 || f.outliers < 0) throw UsageError("--outliers must lie in [0, n)");
    const PlantedOutliers p = make_planted_outliers(f.d, inliers, f.outliers, f.seed);
    ensure_dir(out);
    save(m, out / "X.ffpm", p.X);
    m.config["outlier_columns"] = p.outlier_columns;
  } else if (f.kind == "video") {
    const SyntheticVideo v = make_moving_block_video(f.height, f.width, f.n, f.block, f.seed);
    ensure_dir(out / "frames");
    save(m, out / "X.ffpm", v.X);
    save(m, out / "L_star.ffpm", v.L_star);
    save(m, out / "S_star.ffpm", v.S_star);
    for (Eigen::Index j = 0; j < v.X.cols(); ++j) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%04d.pgm", static_cast<int>(j));
      write_frame(v.X.col(j), v.height, v.width, out / "frames" / name);
      m.outputs.push_back((out / "frames" / name).string());
    }
  } else {
    throw UsageError("--kind must be lowrank, outliers or video");
  }
  m.write(out);
  return kOk;
}

int cmd_decompose(const std::string &input, const std::string &truth_path,
                  const std::string &out_dir, const SolverFlags &flags) {
  Manifest m;
  m.command = "decompose";
  m.seed = flags.seed;
  m.inputs.push_back(input);
  const Matrix x = read_matrix(input);
  std::optional<Matrix> truth;
  if (!truth_path.empty()) {
    truth = read_matrix(truth_path);
    m.inputs.push_back(truth_path);
  }

  const Decomposition dec = decompose(x, flags);
  const Metrics metrics = safe_metrics(x, dec.L, dec.S, truth ? &*truth : nullptr, flags);

  const fs::path out = out_dir;
  ensure_dir(out);
  if (dec.factors) {
    save(m, out / "U.ffpm", dec.factors->U);
    save(m, out / "C.ffpm", dec.factors->C);
    save(m, out / "V.ffpm", dec.factors->V);
  } else {
    save(m, out / "L.ffpm", dec.L);
  }
  save(m, out / "S.ffpm", dec.S);
  const json report = report_json(dec, flags, metrics);
  write_json(out / "report.json", report);
  m.outputs.push_back((out / "report.json").string());
  m.config = report["config"];
  m.write(out);

  std::cout << flags.method << ": iterations=" << dec.report.iterations
            << " rank(L)=" << metrics.rank_L << " ||S||_0/(dn)=" << metrics.sparsity_ratio
            << " residual=" << metrics.residual;
  if (metrics.recovery_error) std::cout << " recovery_error=" << *metrics.recovery_error;
  std::cout << (dec.report.converged ? "" : " (iteration cap)") << "\n";
  return dec.report.converged ? kOk : kIterationCap;
}

int cmd_background(const std::string &frames_dir, int downsample, const std::string &out_dir,
                   const SolverFlags &flags) {
  Manifest m;
  m.command = "background";
  m.seed = flags.seed;
  m.inputs.push_back(frames_dir);
  const FrameStack stack = load_frame_stack(frames_dir, downsample);
  const Decomposition dec = decompose(stack.matrix, flags);
  const Metrics metrics = safe_metrics(stack.matrix, dec.L, dec.S, nullptr, flags);

  const fs::path out = out_dir;
  ensure_dir(out / "background");
  ensure_dir(out / "foreground");
  const Matrix foreground = dec.S.cwiseAbs();
  for (std::size_t j = 0; j < stack.frame_names.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    const fs::path bg = out / "background" / stack.frame_names[j];
    const fs::path fg = out / "foreground" / stack.frame_names[j];
    write_frame(dec.L.col(col), stack.frame_height, stack.frame_width, bg);
    write_frame(foreground.col(col), stack.frame_height, stack.frame_width, fg);
    m.outputs.push_back(bg.string());
    m.outputs.push_back(fg.string());
  }
  json report = report_json(dec, flags, metrics);
  report["frames"] = {{"height", stack.frame_height}, {"width", stack.frame_width},
                      {"downsample", downsample}, {"names", stack.frame_names}};
  write_json(out / "report.json", report);
  m.outputs.push_back((out / "report.json").string());
  m.config = report["config"];
  m.config["downsample"] = downsample;
  m.write(out);
  std::cout << "background: " << stack.frame_names.size() << " frames, rank(L)="
            << metrics.rank_L << " residual=" << metrics.residual << "\n";
  return dec.report.converged ? kOk : kIterationCap;
}

int cmd_anomaly(const std::string &input, std::optional<double> threshold,
                std::optional<int> top_m, const std::string &out_dir, SolverFlags flags) {
  if (!threshold && !top_m) throw UsageError("anomaly needs --threshold or --top-m");
  Manifest m;
  m.command = "anomaly";
  m.seed = flags.seed;
  m.inputs.push_back(input);
  const Matrix x = read_matrix(input);
  flags.method = "fffp";
  const Decomposition dec = decompose(x, flags);
  const AnomalyResult result = threshold ? anomaly_detect(dec.S, *threshold)
                                         : anomaly_top_m(dec.S, *top_m);

  const fs::path out = out_dir;
  ensure_dir(out);
  {
    std::ofstream csv(out / "scores.csv");
    if (!csv) throw IoError("cannot write scores.csv");
    csv << "column,score\n" << std::setprecision(17);
    for (Eigen::Index j = 0; j < result.scores.size(); ++j) csv << j << ',' << result.scores(j) << '\n';
  }
  {
    std::ofstream flagged(out / "flagged.txt");
    if (!flagged) throw IoError("cannot write flagged.txt");
    for (const int j : result.flagged) flagged << j << '\n';
  }
  m.outputs.push_back((out / "scores.csv").string());
  m.outputs.push_back((out / "flagged.txt").string());
  const Metrics metrics = safe_metrics(x, dec.L, dec.S, nullptr, flags);
  json report = report_json(dec, flags, metrics);
  report["anomaly"] = {{"threshold", threshold ? json(*threshold) : json(nullptr)},
                       {"top_m", top_m ? json(*top_m) : json(nullptr)},
                       {"flagged", result.flagged}};
  write_json(out / "report.json", report);
  m.outputs.push_back((out / "report.json").string());
  m.config = report["config"];
  m.config["anomaly"] = report["anomaly"];
  m.write(out);
  std::cout << "anomaly: flagged " << result.flagged.size() << " of " << x.cols() << " columns\n";
  return kOk;
}

struct BenchFlags {
  std::string axis = "samples";
  std::string factors;
  std::string method = "fffp";
  int iters = 50;
  int base_d = 1000, base_n = 1000, rank = 5, k = 5, repeats = 3;
  std::optional<double> lambda;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_bench(const BenchFlags &f) {
  const std::vector<double> factors = parse_factors(f.factors);
  Manifest m;
  m.command = "bench";
  m.seed = f.seed;
  ScalingParams params;
  params.base_d = f.base_d;
  params.base_n = f.base_n;
  params.rank = f.rank;
  params.k = f.k;
  params.seed = f.seed;
  params.repeats = f.repeats;
  params.lambda = f.lambda;
  const auto rows = scaling_benchmark(params, scaling_axis_from_string(f.axis), factors, f.iters,
                                      method_from_string(f.method));

  const fs::path out = f.out;
  ensure_dir(out);
  {
    std::ofstream csv(out / "scaling.csv");
    if (!csv) throw IoError("cannot write scaling.csv");
    csv << "size,seconds\n" << std::setprecision(17);
    for (const auto &r : rows) csv << r.size << ',' << r.seconds << '\n';
  }
  json fit_json = nullptr;
  if (rows.size() >= 2) {
    const LinearFit fit = fit_linear(rows);
    fit_json = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
    std::cout << "linear fit R^2 = " << fit.r_squared << "\n";
  }
  write_json(out / "fit.json", fit_json);
  m.outputs = {(out / "scaling.csv").string(), (out / "fit.json").string()};
  m.config = {{"axis", f.axis}, {"factors", factors}, {"method", f.method}, {"iters", f.iters},
              {"base_d", f.base_d}, {"base_n", f.base_n}, {"rank", f.rank}, {"k", f.k},
              {"repeats", f.repeats}, {"lambda", f.lambda ? json(*f.lambda) : json(nullptr)}};
  m.write(out);
  for (const auto &r : rows) std::cout << r.size << "," << r.seconds << "\n";
  return kOk;
}

} // namespace

int run(const std::vector<std::string> &args) {
  CLI::App app{"Factorization-based robust PCA: low-rank plus sparse decomposition"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FFP_VERSION);

  SynthFlags synth;
  auto *synth_cmd = app.add_subcommand("synth", "Generate a synthetic problem with ground truth");
  synth_cmd->add_option("--kind", synth.kind, "lowrank | outliers | video");
  synth_cmd->add_option("--d", synth.d, "Rows (lowrank, outliers)");
  synth_cmd->add_option("--n", synth.n, "Columns / frames");
  synth_cmd->add_option("--rank", synth.rank, "True rank (lowrank)");
  synth_cmd->add_option("--fraction", synth.fraction, "Corrupted fraction (lowrank)");
  synth_cmd->add_option("--magnitude", synth.magnitude, "Corruption magnitude (lowrank)");
  synth_cmd->add_option("--outliers", synth.outliers, "Outlier columns (outliers)");
  synth_cmd->add_option("--height", synth.height, "Frame height (video)");
  synth_cmd->add_option("--width", synth.width, "Frame width (video)");
  synth_cmd->add_option("--block", synth.block, "Foreground block size (video)");
  synth_cmd->add_option("--seed", synth.seed, "Seed");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();

  SolverFlags dec_flags;
  std::string dec_input, dec_truth, dec_out;
  auto *dec_cmd = app.add_subcommand("decompose", "Split a matrix into low-rank plus sparse parts");
  dec_cmd->add_option("input", dec_input, "Matrix file (FFPM or CSV)")->required();
  dec_cmd->add_option("--truth", dec_truth, "Ground-truth L for the recovery error");
  dec_cmd->add_option("--out", dec_out, "Output directory")->required();
  dec_flags.attach(*dec_cmd, true);

  SolverFlags bg_flags;
  std::string bg_frames, bg_out;
  int bg_downsample = 1;
  auto *bg_cmd = app.add_subcommand("background", "Background/foreground separation of a frame stack");
  bg_cmd->add_option("frames", bg_frames, "Directory of P5 .pgm frames")->required();
  bg_cmd->add_option("--downsample", bg_downsample, "Keep every f-th pixel per axis");
  bg_cmd->add_option("--out", bg_out, "Output directory")->required();
  bg_flags.attach(*bg_cmd, true);

  SolverFlags an_flags;
  std::string an_input, an_out;
  std::optional<double> an_threshold;
  std::optional<int> an_top_m;
  auto *an_cmd = app.add_subcommand("anomaly", "Score columns by the l2 norm of their sparse part");
  an_cmd->add_option("input", an_input, "Matrix file (FFPM or CSV)")->required();
  an_cmd->add_option("--threshold", an_threshold, "Flag columns with score >= threshold");
  an_cmd->add_option("--top-m", an_top_m, "Flag the m highest-scoring columns");
  an_cmd->add_option("--out", an_out, "Output directory")->required();
  an_flags.attach(*an_cmd, false);

  BenchFlags bench;
  auto *bench_cmd = app.add_subcommand("bench", "Time a fixed number of iterations against problem size");
  bench_cmd->add_option("--axis", bench.axis, "samples | dimension")
      ->check(CLI::IsMember({"samples", "dimension"}));
  bench_cmd->add_option("--factors", bench.factors, "Comma-separated ascending size factors")->required();
  bench_cmd->add_option("--method", bench.method, "fffp | uffp | ialm")
      ->check(CLI::IsMember({"fffp", "uffp", "ialm"}));
  bench_cmd->add_option("--iters", bench.iters, "Iterations per run");
  bench_cmd->add_option("--base-d", bench.base_d, "Rows at factor 1");
  bench_cmd->add_option("--base-n", bench.base_n, "Columns at factor 1");
  bench_cmd->add_option("--rank", bench.rank, "True rank of the generated problems");
  bench_cmd->add_option("--k", bench.k, "Factor width");
  bench_cmd->add_option("--lambda", bench.lambda, "Lambda for uffp / ialm");
  bench_cmd->add_option("--repeats", bench.repeats, "Timed repeats per size (median reported)");
  bench_cmd->add_option("--seed", bench.seed, "Seed");
  bench_cmd->add_option("--out", bench.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back(); // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth);
    if (*dec_cmd) return cmd_decompose(dec_input, dec_truth, dec_out, dec_flags);
    if (*bg_cmd) return cmd_background(bg_frames, bg_downsample, bg_out, bg_flags);
    if (*an_cmd) return cmd_anomaly(an_input, an_threshold, an_top_m, an_out, an_flags);
    if (*bench_cmd) return cmd_bench(bench);
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const InvalidArgument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidInput &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const FormatError &e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kIoError;
  } catch (const IoError &e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const DivergenceError &e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

} // namespace ffp::cli
