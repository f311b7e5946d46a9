// scale: command line front end for the matrix scaling solvers.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>

#include <CLI11.hpp>

#include "matscale/driver.hpp"

namespace fs = std::filesystem;
using namespace matscale;

namespace {

enum class LogLevel { Off, Info, Trace };

LogLevel log_level() {
  const char* v = std::getenv("SCALE_LOG");
  if (!v) return LogLevel::Off;
  const std::string s(v);
  if (s == "info") return LogLevel::Info;
  if (s == "trace") return LogLevel::Trace;
  return LogLevel::Off;
}

ScalingInstance load_instance(const std::string& matrix, const std::string& r, const std::string& c) {
  const RowSparse A = read_matrix_market(matrix);
  std::vector<long long> rv, cv;
  if (r.empty() && c.empty()) {
    const long long g = std::gcd<long long>(A.rows(), A.cols());
    rv.assign(A.rows(), A.cols() / g);
    cv.assign(A.cols(), A.rows() / g);
  } else {
    rv = read_int_vector(r);
    cv = read_int_vector(c);
  }
  return ScalingInstance::create(A, rv, cv);
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
  out << body;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix (r,c)-scaling solvers"};
  app.require_subcommand(1);
  const LogLevel level = log_level();

  // solve
  auto* solve = app.add_subcommand("solve", "Scale one matrix");
  std::string matrix, rfile, cfile, method_name = "auto", out_dir, threshold = "eps2";
  double eps = 1e-6;
  std::optional<double> n_bound;
  std::optional<Index> T;
  std::uint64_t seed = 0;
  bool no_timing = false, literal_clip = false;
  Index stride = 1;
  Index ras_max = 10'000'000;
  double cap_factor = SolverOptions{}.outer_cap_factor;
  Constants k;
  solve->add_option("--matrix", matrix, "Matrix Market file")->required()->check(CLI::ExistingFile);
  solve->add_option("--r", rfile, "row targets: file or comma list (default all equal)");
  solve->add_option("--c", cfile, "column targets: file or comma list");
  solve->add_option("--method", method_name, "ras|s0|s1|s2|s3|auto")
      ->check(CLI::IsMember({"ras", "s0", "s1", "s2", "s3", "auto"}));
  solve->add_option("--eps", eps, "target accuracy")->check(CLI::Range(0.0, 1.0));
  solve->add_option("--n-bound", n_bound, "override the diameter bound N");
  solve->add_option("--T", T, "override the inner iteration count (s0, s2)");
  solve->add_option("--seed", seed);
  solve->add_option("--out", out_dir, "directory for summary.json and trace.csv");
  solve->add_option("--threshold", threshold, "stop when potential <= eps2 or eps")
      ->check(CLI::IsMember({"eps", "eps2"}));
  solve->add_option("--trace-stride", stride, "keep every k-th trace row")->check(CLI::PositiveNumber);
  solve->add_option("--ras-max-iters", ras_max);
  solve->add_option("--outer-cap-factor", cap_factor, "multiply the s1/s3 outer iteration caps")
      ->check(CLI::PositiveNumber);
  solve->add_option("--C-diam", k.C_diam);
  solve->add_option("--C-warm", k.C_warm);
  solve->add_option("--C-T", k.C_T);
  solve->add_option("--C-K", k.C_K);
  solve->add_option("--C-S2", k.C_S2);
  solve->add_option("--C-T3", k.C_T3);
  solve->add_flag("--no-timing", no_timing, "zero wall times so reruns are byte-identical");
  solve->add_flag("--literal-unit-clip", literal_clip, "clip coupling gradients at 1 instead of c");

  // check
  auto* check = app.add_subcommand("check", "Asymptotic scalability test");
  std::string cmatrix, cr, cc;
  check->add_option("--matrix", cmatrix)->required()->check(CLI::ExistingFile);
  check->add_option("--r", cr);
  check->add_option("--c", cc);

  // bench
  auto* benchc = app.add_subcommand("bench", "Run the method comparison suite");
  std::string suite = "default", bench_out;
  bool bench_no_timing = false;
  benchc->add_option("--suite", suite)->check(CLI::IsMember({"default"}));
  benchc->add_option("--out", bench_out, "directory for bench.csv");
  benchc->add_flag("--no-timing", bench_no_timing);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      const ScalingInstance inst = load_instance(matrix, rfile, cfile);
      RunConfig cfg;
      cfg.method = *parse_method(method_name);
      cfg.eps = eps;
      cfg.n_bound = n_bound;
      cfg.T = T;
      cfg.ras_max_iters = ras_max;
      cfg.options.constants = k;
      cfg.options.seed = seed;
      cfg.options.timing = !no_timing;
      cfg.options.trace_stride = stride;
      cfg.options.literal_unit_clip = literal_clip;
      cfg.options.outer_cap_factor = cap_factor;
      cfg.options.threshold = threshold == "eps" ? ThresholdMode::Eps : ThresholdMode::EpsSquared;
      if (level != LogLevel::Off)
        std::cerr << "solve: " << inst.d() << "x" << inst.n() << " nnz=" << inst.nnz() << " h=" << inst.h()
                  << " method=" << method_name << " eps=" << eps << '\n';
      RunOutcome out;
      try {
        out = run(inst, cfg);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Infeasible) throw;
        std::cerr << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
      }
      if (level == LogLevel::Trace) out.trace.write_csv(std::cerr);
      const std::string summary = summary_json(cfg, out);
      if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "summary.json", summary + "\n");
        std::ofstream csv(fs::path(out_dir) / "trace.csv", std::ios::binary);
        out.trace.write_csv(csv);
      } else {
        std::cout << summary << '\n';
      }
      if (level != LogLevel::Off)
        std::cerr << "status=" << to_string(out.status) << " iterations=" << out.iterations
                  << " potential=" << out.report.col_potential << '\n';
      return exit_code(out.status);
    }
    if (*check) {
      const ScalingInstance inst = load_instance(cmatrix, cr, cc);
      const FeasibilityVerdict v = check_asymptotic_scalability(inst);
      std::cout << (v.scalable() ? "asymptotically_scalable" : "not_scalable") << " max_flow=" << v.max_flow
                << " h=" << inst.h() << '\n';
      if (v.certificate) {
        std::cout << "zero_minor rows:";
        for (Index i : v.certificate->rows) std::cout << ' ' << i + 1;
        std::cout << " cols:";
        for (Index j : v.certificate->cols) std::cout << ' ' << j + 1;
        std::cout << '\n';
      }
      return v.scalable() ? 0 : kExitInfeasible;
    }
    if (*benchc) {
      SolverOptions base;
      base.timing = !bench_no_timing;
      const auto cells = bench(default_suite(), base);
      write_bench_table(std::cout, cells);
      if (!bench_out.empty()) {
        fs::create_directories(bench_out);
        std::ofstream csv(fs::path(bench_out) / "bench.csv", std::ios::binary);
        write_bench_csv(csv, cells);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Infeasible ? kExitInfeasible : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
