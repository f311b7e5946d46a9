#include "matscale/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "matscale/secondorder.hpp"

namespace matscale {

// ---------------------------------------------------------------- generation

namespace {

ScalingInstance with_default_marginals(const RowSparse& A) {
  const long long d = A.rows(), n = A.cols();
  const long long g = std::gcd(d, n);
  return ScalingInstance::create(A, std::vector<long long>(d, n / g), std::vector<long long>(n, d / g));
}

RowSparse from_triplets(Index d, Index n, const std::vector<Eigen::Triplet<double>>& t) {
  RowSparse A(d, n);
  A.setFromTriplets(t.begin(), t.end(), [](double a, double) { return a; });
  A.makeCompressed();
  return A;
}

}  // namespace

ScalingInstance generate(const GenerateSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Triplet<double>> t;
  switch (spec.kind) {
    case InstanceKind::UniformPositive: {
      if (spec.d < 1 || spec.n < 1 || !(spec.lo > 0.0) || spec.hi < spec.lo)
        throw Error(ErrorKind::InvalidInstance, "uniform: need d, n >= 1 and 0 < lo <= hi");
      std::uniform_real_distribution<double> u(spec.lo, spec.hi);
      for (Index i = 0; i < spec.d; ++i)
        for (Index j = 0; j < spec.n; ++j) t.emplace_back(i, j, spec.lo == spec.hi ? spec.lo : u(rng));
      return with_default_marginals(from_triplets(spec.d, spec.n, t));
    }
    case InstanceKind::SparseScalable: {
      const Index n = spec.n;
      if (n < 1 || (spec.d != 0 && spec.d != n)) throw Error(ErrorKind::InvalidInstance, "sparse: square only");
      std::vector<Index> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), Index{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      std::uniform_real_distribution<double> u(0.1, 1.0), coin(0.0, 1.0);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
          if (perm[i] == j || coin(rng) < spec.density) t.emplace_back(i, j, u(rng));
      return with_default_marginals(from_triplets(n, n, t));
    }
    case InstanceKind::UpperTriangularHard: {
      const Index n = spec.n;
      if (n < 1) throw Error(ErrorKind::InvalidInstance, "upper triangular: n >= 1");
      for (Index i = 0; i < n; ++i)
        for (Index j = i; j < n; ++j) t.emplace_back(i, j, 1.0);
      return with_default_marginals(from_triplets(n, n, t));
    }
    case InstanceKind::Pattern:
      return with_default_marginals(read_matrix_market(spec.pattern_file));
  }
  throw Error(ErrorKind::InvalidInstance, "unknown instance kind");
}

// ---------------------------------------------------------------- IO

RowSparse read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return read_matrix_market(in);
}

RowSparse read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Io, "empty Matrix Market input");
  std::string banner, object, format, field, symmetry;
  {
    std::istringstream hs(line);
    hs >> banner >> object >> format >> field >> symmetry;
    for (auto* s : {&object, &format, &field, &symmetry})
      std::transform(s->begin(), s->end(), s->begin(), [](unsigned char ch) { return std::tolower(ch); });
  }
  if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate")
    throw Error(ErrorKind::Io, "expected a Matrix Market coordinate matrix");
  const bool pattern = field == "pattern";
  if (!pattern && field != "real" && field != "integer" && field != "double")
    throw Error(ErrorKind::Io, "unsupported Matrix Market field " + field);
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") throw Error(ErrorKind::Io, "unsupported symmetry " + symmetry);

  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  long long d = 0, n = 0, nnz = 0;
  std::istringstream sz(line);
  if (!(sz >> d >> n >> nnz) || d < 1 || n < 1 || nnz < 0) throw Error(ErrorKind::Io, "bad Matrix Market size line");

  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
  for (long long k = 0; k < nnz; ++k) {
    long long i = 0, j = 0;
    double v = 1.0;
    if (!(in >> i >> j)) throw Error(ErrorKind::Io, "truncated Matrix Market entries");
    if (!pattern && !(in >> v)) throw Error(ErrorKind::Io, "missing Matrix Market value");
    if (i < 1 || i > d || j < 1 || j > n) throw Error(ErrorKind::Io, "Matrix Market index out of range");
    t.emplace_back(i - 1, j - 1, v);
    if (symmetric && i != j) t.emplace_back(j - 1, i - 1, v);
  }
  RowSparse A(d, n);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

void write_matrix_market(std::ostream& out, const RowSparse& A) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  const auto old = out.precision(17);
  for (Index i = 0; i < A.outerSize(); ++i)
    for (RowSparse::InnerIterator it(A, i); it; ++it) out << i + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
  out.precision(old);
}

std::vector<long long> parse_int_list(const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<long long> out;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Io, "not an integer: " + tok);
    }
    if (used != tok.size()) throw Error(ErrorKind::Io, "not an integer: " + tok);
    out.push_back(v);
  }
  return out;
}

std::vector<long long> read_int_vector(const std::string& path_or_list) {
  std::ifstream in(path_or_list);
  if (in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_int_list(ss.str());
  }
  return parse_int_list(path_or_list);
}

// ---------------------------------------------------------------- run

const char* to_string(Method m) {
  switch (m) {
    case Method::Ras:
      return "ras";
    case Method::S0:
      return "s0";
    case Method::S1:
      return "s1";
    case Method::S2:
      return "s2";
    case Method::S3:
      return "s3";
    case Method::Auto:
      return "auto";
  }
  return "unknown";
}

std::optional<Method> parse_method(const std::string& s) {
  for (Method m : {Method::Ras, Method::S0, Method::S1, Method::S2, Method::S3, Method::Auto})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

RunOutcome run(const ScalingInstance& inst, const RunConfig& config) {
  const SolverOptions& opts = config.options;
  opts.constants.validate();
  if (!(config.eps > 0.0 && config.eps < 1.0)) throw Error(ErrorKind::InvalidInstance, "eps must lie in (0, 1)");
  if (!check_asymptotic_scalability(inst).scalable())
    throw Error(ErrorKind::Infeasible, "instance is not asymptotically scalable");

  const WorkCounters before = work_counters();
  const auto start = std::chrono::steady_clock::now();
  const Regime regime = inst.fully_positive() ? Regime::FullPositive : Regime::General;
  const double N = config.n_bound ? std::max(1.0, *config.n_bound)
                                  : diameter_bound(inst, config.eps, regime, std::nullopt, opts.constants.C_diam);
  const double thr = stop_threshold(config.eps, opts.threshold);

  Method method = config.method;
  if (method == Method::Auto) method = inst.n() < 900 ? Method::S1 : Method::S3;

  SolveResult res;
  switch (method) {
    case Method::Ras:
      res = ras(inst, thr, config.ras_max_iters, opts);
      break;
    case Method::S0:
      if (config.T)
        res = std::move(scaling0(inst, N, *config.T, opts, thr).result);
      else
        res = std::move(pipeline(inst, config.eps, Strategy::Pure0, opts, N).result);
      break;
    case Method::S1:
      res = scaling1(inst, N, config.eps, opts);
      break;
    case Method::S2:
      res = scaling2(inst, N, config.T ? *config.T : 50, opts, thr);
      break;
    case Method::S3:
    case Method::Auto:
      res = std::move(pipeline(inst, config.eps, Strategy::Warm2Then3, opts, N).result);
      break;
  }

  RunOutcome out;
  out.wall_ns = opts.timing ? std::chrono::duration_cast<std::chrono::nanoseconds>(
                                  std::chrono::steady_clock::now() - start)
                                  .count()
                            : 0;
  const WorkCounters& after = work_counters();
  out.work.f_evals = after.f_evals - before.f_evals;
  out.work.grad_evals = after.grad_evals - before.grad_evals;
  out.work.matvecs = after.matvecs - before.matvecs;
  out.report = extract_scaling(inst, res.x).report;
  out.x = std::move(res.x);
  out.trace = std::move(res.trace);
  out.status = res.status;
  out.iterations = res.iterations;
  out.f = res.f;
  out.N = res.N > 0.0 ? res.N : N;
  return out;
}

int exit_code(Status s) { return s == Status::Converged ? 0 : kExitNotConverged; }

std::string summary_json(const RunConfig& config, const RunOutcome& out, int indent) {
  using nlohmann::json;
  const SolverOptions& o = config.options;
  const Constants& k = o.constants;
  json cfg = {
      {"method", to_string(config.method)},
      {"eps", config.eps},
      {"n_bound", config.n_bound ? json(*config.n_bound) : json(nullptr)},
      {"T", config.T ? json(*config.T) : json(nullptr)},
      {"ras_max_iters", config.ras_max_iters},
      {"threshold", o.threshold == ThresholdMode::EpsSquared ? "eps2" : "eps"},
      {"seed", o.seed},
      {"constants",
       {{"C_diam", k.C_diam}, {"C_warm", k.C_warm}, {"C_T", k.C_T}, {"C_K", k.C_K}, {"C_S2", k.C_S2}, {"C_T3", k.C_T3}}},
      {"literal_unit_clip", o.literal_unit_clip},
      {"delegate_small_scaling3", o.delegate_small_scaling3},
      {"mwu_early_exit", o.mwu_early_exit},
      {"mwu_round_factor", o.mwu_round_factor},
      {"outer_cap_factor", o.outer_cap_factor},
      {"hessian_cap", o.hessian_cap},
      {"sparsify_backend", o.sparsify_backend == SparsifyBackend::Passthrough ? "passthrough" : "sampling"},
      {"sparsify_ratio", o.sparsify_ratio},
      {"timing", o.timing},
      {"trace_stride", o.trace_stride},
  };
  json j = {
      {"config", cfg},
      {"status", to_string(out.status)},
      {"iterations", out.iterations},
      {"f", out.f},
      {"potential", out.report.col_potential},
      {"row_err", out.report.row_err},
      {"N", out.N},
      {"f_evals", out.work.f_evals},
      {"grad_evals", out.work.grad_evals},
      {"matvecs", out.work.matvecs},
      {"wall_ns", out.wall_ns},
      {"x", std::vector<double>(out.x.data(), out.x.data() + out.x.size())},
  };
  return j.dump(indent);
}

// ---------------------------------------------------------------- bench

BenchSuite default_suite() {
  BenchSuite s;
  GenerateSpec ds;
  ds.kind = InstanceKind::UniformPositive;
  ds.d = ds.n = 10;
  ds.lo = ds.hi = 1.0;
  s.instances.emplace_back("doubly_stochastic_10", ds);
  GenerateSpec up;
  up.kind = InstanceKind::UniformPositive;
  up.d = up.n = 20;
  s.instances.emplace_back("uniform_20", up);
  GenerateSpec sp;
  sp.kind = InstanceKind::SparseScalable;
  sp.d = sp.n = 20;
  sp.density = 0.15;
  s.instances.emplace_back("sparse_20", sp);
  GenerateSpec ut;
  ut.kind = InstanceKind::UpperTriangularHard;
  ut.d = ut.n = 10;
  s.instances.emplace_back("upper_triangular_10", ut);
  s.methods = {Method::Ras, Method::S0, Method::S1, Method::S2, Method::S3};
  s.eps = {1e-2, 1e-3};
  return s;
}

std::vector<BenchCell> bench(const BenchSuite& suite, const SolverOptions& base) {
  std::vector<BenchCell> cells;
  for (const auto& [name, spec] : suite.instances) {
    std::optional<ScalingInstance> inst;
    std::string gen_error;
    try {
      inst = generate(spec, suite.seed);
    } catch (const std::exception& e) {
      gen_error = e.what();
    }
    for (Method m : suite.methods)
      for (double eps : suite.eps) {
        BenchCell c;
        c.instance = name;
        c.method = to_string(m);
        c.eps = eps;
        if (!inst) {
          c.error = gen_error;
          cells.push_back(c);
          continue;
        }
        RunConfig cfg;
        cfg.method = m;
        cfg.eps = eps;
        cfg.ras_max_iters = 1'000'000;
        cfg.options = base;
        cfg.options.observer = nullptr;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          const RunOutcome out = run(*inst, cfg);
          c.ok = true;
          c.status = to_string(out.status);
          c.iterations = out.iterations;
          c.f_evals = out.work.f_evals;
          c.matvecs = out.work.matvecs;
          c.potential = out.report.col_potential;
        } catch (const std::exception& e) {
          c.error = e.what();
        }
        c.wall_ms = base.timing ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count()
                                : 0.0;
        cells.push_back(c);
      }
  }
  return cells;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchCell>& cells) {
  const auto old = os.precision(17);
  os << "instance,method,eps,status,iterations,f_evals,matvecs,wall_ms,potential,error\n";
  for (const auto& c : cells)
    os << c.instance << ',' << c.method << ',' << c.eps << ',' << (c.ok ? c.status : "failed") << ',' << c.iterations
       << ',' << c.f_evals << ',' << c.matvecs << ',' << c.wall_ms << ',' << c.potential << ",\"" << c.error << "\"\n";
  os.precision(old);
}

void write_bench_table(std::ostream& os, const std::vector<BenchCell>& cells) {
  os << std::left << std::setw(22) << "instance" << std::setw(6) << "meth" << std::setw(8) << "eps" << std::setw(24)
     << "status" << std::right << std::setw(10) << "iters" << std::setw(10) << "f_evals" << std::setw(11) << "matvecs"
     << std::setw(11) << "wall_ms" << std::setw(12) << "potential" << '\n';
  for (const auto& c : cells) {
    os << std::left << std::setw(22) << c.instance << std::setw(6) << c.method << std::setw(8) << std::setprecision(0)
       << std::scientific << c.eps << std::defaultfloat << std::setw(24) << (c.ok ? c.status : "failed: " + c.error)
       << std::right << std::setw(10) << c.iterations << std::setw(10) << c.f_evals << std::setw(11) << c.matvecs
       << std::setw(11) << std::fixed << std::setprecision(1) << c.wall_ms << std::setw(12) << std::scientific
       << std::setprecision(2) << c.potential << std::defaultfloat << '\n';
  }
}

}  // namespace matscale
