// Command-line front end: single solves, parameter sweeps, oracle validation,
// spectral diagnostics, and a timing/memory micro-benchmark.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <thread>

#include "fdeopt/admm.hpp"
#include "fdeopt/circulant.hpp"
#include "fdeopt/config.hpp"
#include "fdeopt/io.hpp"
#include "fdeopt/oracle.hpp"
#include "fdeopt/problem.hpp"

namespace fs = std::filesystem;
using namespace fdeopt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIterCap = 2;
constexpr int kExitValidation = 3;

struct CommonFlags {
  std::string config_path, out_dir;
  int n = 0;
  double alpha = 0, beta1 = 0, beta2 = 0, gamma = 0, delta = 0, rho = 0, tol = 0;
  std::string ylo, yhi, ulo, uhi;
  int max_outer = 0, workers = 0;
  unsigned seed = 0;
  bool dump = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "config file (key = value lines, # comments)");
  cmd->add_option("--out", f.out_dir, "output directory (default: $FDEOPT_OUT_DIR)");
  cmd->add_option("--n", f.n, "grid points per dimension");
  cmd->add_option("--alpha", f.alpha, "time-fractional order in (0,1)");
  cmd->add_option("--beta1", f.beta1, "x1-fractional order in (1,2)");
  cmd->add_option("--beta2", f.beta2, "x2-fractional order in (1,2)");
  cmd->add_option("--gamma", f.gamma, "control regularization weight");
  cmd->add_option("--delta", f.delta, "ADMM penalty parameter");
  cmd->add_option("--rho", f.rho, "ADMM step length in (0, 1.618...)");
  cmd->add_option("--ylo", f.ylo, "state lower bound (number or inf)");
  cmd->add_option("--yhi", f.yhi, "state upper bound");
  cmd->add_option("--ulo", f.ulo, "control lower bound");
  cmd->add_option("--uhi", f.uhi, "control upper bound");
  cmd->add_option("--tol", f.tol, "primal infinity-norm tolerance");
  cmd->add_option("--max-outer", f.max_outer, "outer iteration cap");
  cmd->add_option("--workers", f.workers, "parallel sweep workers");
  cmd->add_option("--seed", f.seed, "random seed for property subcommands");
  cmd->add_flag("--dump", f.dump, "dump solution vectors to the output directory");
}

RunConfig resolve_config(const CLI::App* cmd, const CommonFlags& f) {
  RunConfig cfg;
  if (!f.config_path.empty()) parse_config_file(f.config_path, cfg);
  auto set = [&](const char* flag) { return cmd->count(flag) > 0; };
  if (set("--n")) cfg.spec.n = f.n;
  if (set("--alpha")) cfg.spec.alpha = f.alpha;
  if (set("--beta1")) cfg.spec.beta1 = f.beta1;
  if (set("--beta2")) cfg.spec.beta2 = f.beta2;
  if (set("--gamma")) cfg.spec.gamma = f.gamma;
  if (set("--delta")) cfg.admm.delta = f.delta;
  if (set("--rho")) cfg.admm.rho = f.rho;
  if (set("--ylo")) cfg.spec.y_lo = parse_bound(f.ylo);
  if (set("--yhi")) cfg.spec.y_hi = parse_bound(f.yhi);
  if (set("--ulo")) cfg.spec.u_lo = parse_bound(f.ulo);
  if (set("--uhi")) cfg.spec.u_hi = parse_bound(f.uhi);
  if (set("--tol")) cfg.admm.tol_primal = f.tol;
  if (set("--max-outer")) cfg.admm.max_outer = f.max_outer;
  if (set("--workers")) cfg.workers = f.workers;
  if (set("--seed")) cfg.seed = f.seed;
  if (set("--dump")) cfg.dump_solution = f.dump;
  if (set("--out")) cfg.out_dir = f.out_dir;
  if (cfg.out_dir.empty()) {
    if (const char* env = std::getenv("FDEOPT_OUT_DIR")) cfg.out_dir = env;
  }
  cfg.spec.validate();
  cfg.admm.validate();
  return cfg;
}

std::string row_text(const RunConfig& cfg, const SummaryRow& row) {
  return cfg.format == "plain" ? summary_plain_row(row) : summary_csv_row(row);
}

void write_summary_file(const RunConfig& cfg, const std::vector<SummaryRow>& rows,
                        const std::string& name) {
  if (cfg.out_dir.empty()) return;
  fs::create_directories(cfg.out_dir);
  std::ofstream out(fs::path(cfg.out_dir) / name);
  out << kSummaryHeader << "\n";
  for (const auto& row : rows) out << summary_csv_row(row) << "\n";
}

int cmd_solve(const CLI::App* cmd, const CommonFlags& flags) {
  const RunConfig cfg = resolve_config(cmd, flags);
  SolveResult result;
  try {
    result = solve(cfg.spec, cfg.admm);
  } catch (const std::runtime_error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitUsage;
  }
  const SummaryRow row = make_summary_row(cfg, cfg.admm.delta, result);
  if (cfg.format == "csv") std::cout << kSummaryHeader << "\n";
  std::cout << row_text(cfg, row) << "\n";
  if (!cfg.out_dir.empty()) {
    write_summary_file(cfg, {row}, "solve_summary.csv");
    std::ofstream log(fs::path(cfg.out_dir) / "solve_iterations.csv");
    write_iteration_log(log, result.history);
    if (cfg.dump_solution) {
      const auto dir = fs::path(cfg.out_dir);
      dump_solution((dir / "y.bin").string(), static_cast<uint32_t>(cfg.spec.n), 0, result.y);
      dump_solution((dir / "u.bin").string(), static_cast<uint32_t>(cfg.spec.n), 1, result.u);
      write_dump_manifest((dir / "manifest.txt").string(), cfg.spec.n,
                          {{"y.bin", 0}, {"u.bin", 1}});
    }
  }
  return result.status == SolveStatus::converged ? kExitOk : kExitIterCap;
}

int cmd_sweep(const CLI::App* cmd, const CommonFlags& flags) {
  const RunConfig cfg = resolve_config(cmd, flags);
  if (cfg.n_sweep.empty() && cfg.alpha_sweep.empty() && cfg.delta_sweep.empty()) {
    std::cerr << "sweep: no sweep list given (set n_sweep, alpha_sweep, or delta_sweep)\n";
    return kExitUsage;
  }
  const std::vector<int> ns = cfg.n_sweep.empty() ? std::vector<int>{cfg.spec.n} : cfg.n_sweep;
  const std::vector<double> alphas =
      cfg.alpha_sweep.empty() ? std::vector<double>{cfg.spec.alpha} : cfg.alpha_sweep;
  const std::vector<double> deltas =
      cfg.delta_sweep.empty() ? std::vector<double>{cfg.admm.delta} : cfg.delta_sweep;

  struct Point {
    RunConfig cfg;
  };
  std::vector<Point> points;
  for (int n : ns)
    for (double alpha : alphas)
      for (double delta : deltas) {
        Point p{cfg};
        p.cfg.spec.n = n;
        p.cfg.spec.alpha = alpha;
        p.cfg.admm.delta = delta;
        points.push_back(std::move(p));
      }

  std::vector<SummaryRow> rows(points.size());
  std::vector<int> codes(points.size(), kExitOk);
  std::atomic<std::size_t> next{0};
  auto run_point = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      const RunConfig& pc = points[i].cfg;
      try {
        const SolveResult res = solve(pc.spec, pc.admm);
        rows[i] = make_summary_row(pc, pc.admm.delta, res);
        codes[i] = res.status == SolveStatus::converged ? kExitOk : kExitIterCap;
      } catch (const std::exception&) {
        SolveResult failed;
        failed.status = SolveStatus::failure;
        rows[i] = make_summary_row(pc, pc.admm.delta, failed);
        codes[i] = kExitUsage;
      }
    }
  };
  const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(run_point);
  run_point();
  for (auto& t : pool) t.join();

  if (cfg.format == "csv") std::cout << kSummaryHeader << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) std::cout << row_text(cfg, rows[i]) << "\n";
  write_summary_file(cfg, rows, "sweep_summary.csv");

  const bool all_failed =
      std::all_of(codes.begin(), codes.end(), [](int c) { return c == kExitUsage; });
  if (all_failed) return kExitUsage;
  if (std::any_of(codes.begin(), codes.end(), [](int c) { return c == kExitIterCap; }))
    return kExitIterCap;
  return kExitOk;
}

int cmd_validate(int cap, double perturb, unsigned seed) {
  const auto results = oracle::run_validation(cap, perturb, seed == 0 ? 1 : seed);
  bool all_pass = true;
  std::printf("%-28s %-14s %-10s %s\n", "check", "max_err", "threshold", "result");
  for (const auto& r : results) {
    all_pass = all_pass && r.pass();
    std::printf("%-28s %-14s %-10s %s\n", r.name.c_str(), fmt_g(r.max_err).c_str(),
                fmt_g(r.threshold).c_str(), r.pass() ? "PASS" : "FAIL");
  }
  return all_pass ? kExitOk : kExitValidation;
}

int cmd_diagnose(const CLI::App* cmd, const CommonFlags& flags, int symbol_grid, int symbol_k) {
  RunConfig cfg = resolve_config(cmd, flags);
  if (cfg.out_dir.empty()) cfg.out_dir = ".";
  fs::create_directories(cfg.out_dir);
  const fs::path dir(cfg.out_dir);
  const Grid grid(cfg.spec.n);
  const ConstraintOperator op(cfg.spec, grid);
  const ScalingConstants scals = scaling(cfg.spec, grid);

  {
    std::ofstream out(dir / "symbol.csv");
    out << "theta1,theta2,theta3,value_re,value_im\n";
    for (int a = 0; a < symbol_grid; ++a)
      for (int b = 0; b < symbol_grid; ++b)
        for (int c = 0; c < symbol_grid; ++c) {
          auto node = [&](int i) {
            return -std::numbers::pi + 2.0 * std::numbers::pi * i / (symbol_grid - 1);
          };
          const std::array<double, 3> theta{node(a), node(b), node(c)};
          const auto phi = symbol_eval(theta, scals, cfg.spec.alpha, cfg.spec.beta1,
                                       cfg.spec.beta2, symbol_k);
          out << fmt_g(theta[0]) << "," << fmt_g(theta[1]) << "," << fmt_g(theta[2]) << ","
              << fmt_g(phi.real()) << "," << fmt_g(phi.imag()) << "\n";
        }
  }

  const auto pc = assemble_precond(op, cfg.admm.rho, cfg.admm.delta, cfg.spec.gamma);
  {
    std::ofstream out(dir / "circulant_eigs.csv");
    out << "eig_index,value_re,value_im\n";
    for (std::size_t i = 0; i < pc.lam_b().size(); ++i)
      out << i << "," << fmt_g(pc.lam_b()[i].real()) << "," << fmt_g(pc.lam_b()[i].imag())
          << "\n";
  }

  const double sum = symbol_coeff_abs_sum(scals, cfg.spec.alpha, cfg.spec.beta1, cfg.spec.beta2,
                                          10000);
  const double bound = wiener_bound(scals, cfg.spec.beta1, cfg.spec.beta2);
  std::cout << "wiener truncated coefficient sum = " << fmt_g(sum) << " <= bound = "
            << fmt_g(bound) << (sum <= bound ? " (ok)" : " (VIOLATED)") << "\n";

  if (cfg.spec.n <= oracle::kDenseCap) {
    const auto report = clustering_report(op, pc);
    std::ofstream out(dir / "clustering.csv");
    out << "eig_index,value_re,value_im\n";
    for (std::size_t i = 0; i < report.eigs.size(); ++i)
      out << i << "," << fmt_g(report.eigs[i]) << ",0\n";
    std::cout << "clustering: eig range [" << fmt_g(report.min_eig) << ", "
              << fmt_g(report.max_eig) << "], within 10% = "
              << fmt_g(report.fraction_within(0.1)) << ", within 30% = "
              << fmt_g(report.fraction_within(0.3)) << "\n";
    if (report.min_eig <= 0.0) {
      std::cerr << "diagnose: preconditioned matrix lost positivity\n";
      return kExitValidation;
    }
  } else {
    std::cout << "clustering: skipped (n > " << oracle::kDenseCap << " dense cap)\n";
  }
  return kExitOk;
}

int cmd_bench(const std::vector<int>& sizes, int reps) {
  std::cout << "n,N,apply_b_seconds,precond_solve_seconds,peak_rss_kb\n";
  for (int n : sizes) {
    ProblemSpec spec;
    spec.n = n;
    const Grid grid(n);
    const ConstraintOperator op(spec, grid);
    const auto pc = assemble_precond(op, 1.618, 0.4, spec.gamma);
    std::vector<double> x(op.size()), out(op.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.37 * static_cast<double>(i));
    auto ws = op.make_workspace();
    auto pc_ws = pc.make_workspace();
    auto time_best = [&](auto&& fn) {
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best,
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count());
      }
      return best;
    };
    const double t_apply = time_best([&] { op.apply(x, out, ws, false); });
    const double t_solve = time_best([&] { pc.solve(x, out, pc_ws); });
    std::cout << n << "," << op.size() << "," << fmt_g(t_apply) << "," << fmt_g(t_solve) << ","
              << fmt_g(peak_rss_kb()) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matrix-free ADMM solver for box-constrained optimization governed by a "
               "time-dependent 2D fractional diffusion equation"};
  app.require_subcommand(1);

  CommonFlags solve_flags, sweep_flags, diag_flags;
  auto* solve_cmd = app.add_subcommand("solve", "run a single solve and report a summary row");
  add_common_flags(solve_cmd, solve_flags);
  auto* sweep_cmd = app.add_subcommand("sweep", "run a sweep over n/alpha/delta lists");
  add_common_flags(sweep_cmd, sweep_flags);

  int validate_cap = 4;
  double validate_perturb = 0.0;
  unsigned validate_seed = 1;
  auto* validate_cmd = app.add_subcommand("validate", "run the dense-oracle equivalence suite");
  validate_cmd->add_option("--cap", validate_cap, "dense size cap (<= 6)")
      ->check(CLI::Range(1, oracle::kDenseCap));
  validate_cmd->add_option("--perturb", validate_perturb,
                           "fault-injection hook: perturb a discretization coefficient");
  validate_cmd->add_option("--seed", validate_seed, "random seed");

  auto* diag_cmd =
      app.add_subcommand("diagnose", "emit symbol samples, circulant eigenvalues, clustering");
  add_common_flags(diag_cmd, diag_flags);
  int symbol_grid = 17, symbol_k = 2048;
  diag_cmd->add_option("--symbol-grid", symbol_grid, "symbol sample points per dimension");
  diag_cmd->add_option("--symbol-k", symbol_k, "symbol truncation length");

  std::vector<int> bench_sizes{16, 32};
  int bench_reps = 5;
  auto* bench_cmd = app.add_subcommand("bench", "time apply/precond kernels, report peak RSS");
  bench_cmd->add_option("--n", bench_sizes, "grid sizes to benchmark");
  bench_cmd->add_option("--reps", bench_reps, "repetitions (best-of)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return cmd_solve(solve_cmd, solve_flags);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_cmd, sweep_flags);
    if (validate_cmd->parsed()) return cmd_validate(validate_cap, validate_perturb, validate_seed);
    if (diag_cmd->parsed()) return cmd_diagnose(diag_cmd, diag_flags, symbol_grid, symbol_k);
    if (bench_cmd->parsed()) return cmd_bench(bench_sizes, bench_reps);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
