// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.
//   acceptance            all criteria
//   acceptance --only 11  a single criterion
//   acceptance --full     criterion 11 also reruns the Scaling1 sweep at the default MWU budget (hours)
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace matscale;

namespace {

// Pinned tolerances.
constexpr double kGradFdRel = 1e-6;
constexpr double kHessFdRel = 1e-5;
constexpr double kC1Seconds = 10.0;
constexpr double kSandwichSlack = 1e-9;
constexpr double kQSlack = 1e-9;
constexpr double kGridTol = 1e-6;
constexpr double kDecreaseSlackPerH = 1e-9;
constexpr double kCouplingSlackPerH = 1e-7;
constexpr double kProjectionTol = 1e-8;
constexpr double kRegretMax = 0.0;
constexpr double kBallExtra = 1e-6;
constexpr double kBoxExtra = 1e-4;
constexpr double kInfExtra = 1e-12;  // rounding allowance on "exact" infinity bounds
constexpr double kC10Potential = 1e-10;
constexpr double kC10Agree = 1e-6;
constexpr double kC10Seconds = 300.0;
constexpr double kS0Slope = -2.5;
constexpr double kRasExponent = 0.8;
constexpr double kS1Exponent = 0.25;
constexpr double kS1LogLinearR2 = 0.99;
constexpr double kShiftRel = 1e-9;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double cnorm2(const Vector& v, const Vector& c) { return v.cwiseAbs2().dot(c); }

double rel_err(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

ScalingInstance mixed_instance(int k, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(2, 30);
  if (k % 2 == 0) return testing_util::random_instance(dim(rng), dim(rng), 1000 + k);
  return testing_util::sparse_instance(dim(rng), 1000 + k, 0.2);
}

// Centred high-precision minimizer (f is shift invariant).
Vector reference_minimizer(const ScalingInstance& inst) {
  SolverOptions o;
  o.trace_stride = 1000000;
  Vector x = ras(inst, 1e-26, 20000000, o).x;
  x.array() -= 0.5 * (x.maxCoeff() + x.minCoeff());
  return x;
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double b = oracle::slope(x, y);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  double ss = 0, sr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double fit = my + b * (x[i] - mx);
    ss += (y[i] - my) * (y[i] - my);
    sr += (y[i] - fit) * (y[i] - fit);
  }
  return 1.0 - sr / ss;
}

// ---------------------------------------------------------------- 1

Outcome c1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  double worst_g = 0, worst_h = 0;
  for (int k = 0; k < 20; ++k) {
    const ScalingInstance inst = mixed_instance(k, rng);
    const Vector x = testing_util::random_vector(inst.n(), rng, -2, 2);
    const Vector g = eval_grad(inst, x);
    const Vector fd = oracle::fd_gradient([&](const Vector& z) { return eval_f(inst, z); }, x);
    worst_g = std::max(worst_g, rel_err(g, fd));
    const Vector v = testing_util::random_vector(inst.n(), rng, -1, 1);
    const Vector hv = hessian_apply(inst, x, v);
    const Vector fdh = oracle::fd_directional([&](const Vector& z) { return eval_grad(inst, z); }, x, v);
    worst_h = std::max(worst_h, rel_err(hv, fdh));
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst_g <= kGradFdRel && worst_h <= kHessFdRel && secs < kC1Seconds;
  o.detail = "grad rel " + fmt("%.1e", worst_g) + ", hess rel " + fmt("%.1e", worst_h) + ", " + fmt("%.2f", secs) + " s";
  return o;
}

// ---------------------------------------------------------------- 2

Outcome c2() {
  std::mt19937_64 rng(2);
  double worst = -kUnbounded;
  for (int k = 0; k < 100; ++k) {
    const ScalingInstance inst = mixed_instance(k, rng);
    const Vector x = testing_util::random_vector(inst.n(), rng, -3, 3);
    Vector d = testing_util::random_vector(inst.n(), rng, -1, 1);
    d *= 0.125 / d.cwiseAbs().maxCoeff() * (k % 3 == 0 ? 1.0 : 0.5);
    const ValueAndGradient fg = eval_f_grad(inst, x);
    const double q = build_hessian(inst, x).quad(d), lin = fg.grad.dot(d);
    const double fd = eval_f(inst, x + d);
    worst = std::max({worst, fg.f + lin + q / 6 - fd, fd - (fg.f + lin + q)});
  }
  return {worst <= kSandwichSlack, "worst violation " + fmt("%.1e", worst)};
}

// ---------------------------------------------------------------- 3

Outcome c3() {
  std::mt19937_64 rng(3);
  double worst_q = -kUnbounded;
  for (int k = 0; k < 100; ++k) {
    const ScalingInstance inst = mixed_instance(k, rng);
    const Vector x = testing_util::random_vector(inst.n(), rng, -3, 3);
    const ValueAndGradient fg = eval_f_grad(inst, x);
    const Vector mag = testing_util::random_vector(inst.n(), rng, 0.0, 0.5);
    if (k % 2 == 0)
      worst_q = std::max(worst_q, oracle::q_plus(fg.grad, inst.c(), mag) - (fg.f - eval_f(inst, x + mag)));
    else
      worst_q = std::max(worst_q, oracle::q_minus(fg.grad, inst.c(), -mag) - (fg.f - eval_f(inst, x - mag)));
  }
  double worst_grid = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + trial % 3;
    const Vector g = testing_util::random_vector(n, rng, -3, 3);
    const Vector c = testing_util::random_vector(n, rng, 0.5, 2);
    const double N = trial % 4 == 0 ? kUnbounded : 1.0 + trial % 3;
    const Vector x = std::isinf(N) ? testing_util::random_vector(n, rng, -5, 5)
                                   : testing_util::random_vector(n, rng, -N, N);
    const GradStepDeltas d = grad_step_deltas(g, c, x, N);
    for (Index j = 0; j < n; ++j) {
      const double up = std::max(0.0, std::min(0.5, N - x[j])), down = std::max(0.0, std::min(0.5, N + x[j]));
      const Vector gj = Vector::Constant(1, g[j]), cj = Vector::Constant(1, c[j]);
      const double rp =
          oracle::grid_argmax([&](double t) { return oracle::q_plus(gj, cj, Vector::Constant(1, t)); }, 0.0, up);
      const double rm =
          -oracle::grid_argmax([&](double t) { return oracle::q_minus(gj, cj, Vector::Constant(1, -t)); }, 0.0, down);
      worst_grid = std::max({worst_grid, std::abs(d.plus[j] - rp), std::abs(d.minus[j] - rm)});
    }
  }
  return {worst_q <= kQSlack && worst_grid <= kGridTol,
          "Q slack " + fmt("%.1e", worst_q) + ", grid " + fmt("%.1e", worst_grid)};
}

// ---------------------------------------------------------------- 4, 5

struct S0Case {
  ScalingInstance inst;
  double N;
  Vector u;  // reference minimizer, |u|_inf <= N
};

const std::vector<S0Case>& s0_cases() {
  static std::vector<S0Case> out;
  if (!out.empty()) return out;
  for (int s = 0; s < 5; ++s) {
    ScalingInstance a = testing_util::random_instance(15, 15, 50 + s);
    Vector u = reference_minimizer(a);
    const double N = std::max(diameter_bound(a, 1e-6, Regime::FullPositive), u.cwiseAbs().maxCoeff());
    out.push_back({std::move(a), N, std::move(u)});
    ScalingInstance b = testing_util::sparse_instance(20, 60 + s, 0.2);
    Vector ub = reference_minimizer(b);
    const double Nb = std::max(1.0, 1.1 * ub.cwiseAbs().maxCoeff());
    out.push_back({std::move(b), Nb, std::move(ub)});
  }
  return out;
}

Outcome c4() {
  double worst = -kUnbounded;
  Index steps = 0;
  for (const S0Case& sc : s0_cases()) {
    const double h = static_cast<double>(sc.inst.h());
    Observer obs;
    obs.on_unbounded_grad_step = [&](const GradStepRecord& r) {
      ++steps;
      const GradientSplit sp = split_grad(r.grad, sc.inst.c());
      const double bound = 3.0 / 32 * sp.grad_s.cwiseAbs2().cwiseQuotient(sc.inst.c()).sum() + 0.25 * sp.grad_l.sum();
      worst = std::max(worst, (bound - (r.f_prev - r.f_next)) / h);
    };
    SolverOptions o;
    o.observer = &obs;
    scaling0(sc.inst, sc.N, 100, o);
  }
  return {steps > 0 && worst <= kDecreaseSlackPerH,
          std::to_string(steps) + " steps, worst violation/h " + fmt("%.1e", worst)};
}

Outcome c5() {
  double worst = -kUnbounded;
  Index iters = 0;
  for (const S0Case& sc : s0_cases()) {
    const double h = static_cast<double>(sc.inst.h());
    const Vector zero = Vector::Zero(sc.inst.n());
    const double f0 = eval_f(sc.inst, zero), fu = eval_f(sc.inst, sc.u);
    Observer obs;
    obs.on_lc_iteration = [&](const LcIterationRecord& r) {
      ++iters;
      for (int w = 0; w < 2; ++w) {
        const Vector& u = w == 0 ? zero : sc.u;
        const double fv = w == 0 ? f0 : fu;
        const double val = (1 - r.tau) / r.tau * (r.f_y_prev - fv) - (r.f_y_next - fv) / r.tau +
                           cnorm2(r.z_prev - u, sc.inst.c()) / (2 * r.alpha) -
                           cnorm2(r.z_next - u, sc.inst.c()) / (2 * r.alpha);
        worst = std::max(worst, -val / h);
      }
    };
    SolverOptions o;
    o.observer = &obs;
    scaling0(sc.inst, sc.N, 100, o);
  }
  return {iters > 0 && worst <= kCouplingSlackPerH,
          std::to_string(iters) + " iterations x 2 reference points, worst violation/h " + fmt("%.1e", worst)};
}

// ---------------------------------------------------------------- 6

struct MwuLog {
  Index calls = 0;
  double worst_regret = -kUnbounded;
  void add(const MwuCallRecord& r) {
    ++calls;
    worst_regret = std::max(worst_regret, r.regret->worst_vertex_audit(r.eta));
  }
};

Outcome c6() {
  std::mt19937_64 rng(6);
  double worst_proj = 0;
  for (int k = 0; k < 500; ++k) {
    const Index n = 1 + k % 5;
    Vector w = testing_util::random_vector(n, rng, 0.0, 1.0);
    w = (w / w.sum() * (0.5 * n)).array() + 0.5;
    const Vector loss = testing_util::random_vector(n, rng, -4, 4);
    const double eta = 0.2 + 0.8 * (k % 7) / 6.0;
    const Vector z = mwu_project(FloorSimplexWeights::from_vector(w), loss, eta).values();
    const Vector y = w.cwiseProduct((-eta * loss).array().exp().matrix());
    worst_proj = std::max(worst_proj, (z - oracle::kl_floor_projection(y)).cwiseAbs().maxCoeff());
  }
  MwuLog log;
  // standalone traces with bounded losses
  for (int k = 0; k < 50; ++k) {
    const Index n = 2 + k % 30;
    const double eta = 0.1 + 0.02 * (k % 10);
    RegretAccumulator acc(n);
    FloorSimplexWeights w = FloorSimplexWeights::uniform(n);
    for (int t = 0; t < 200; ++t) {
      const Vector loss = testing_util::random_vector(n, rng, -1.0 / eta, 0.0);
      acc.add(w.values(), loss);
      w = mwu_project(w, loss, eta);
    }
    ++log.calls;
    log.worst_regret = std::max(log.worst_regret, acc.worst_vertex_audit(eta));
  }
  // every MWU call made by solver runs
  Observer obs;
  obs.on_mwu_basic = [&](const MwuCallRecord& r) { log.add(r); };
  obs.on_mwu_full = [&](const MwuCallRecord& r) { log.add(r); };
  SolverOptions o;
  o.observer = &obs;
  for (int s = 0; s < 3; ++s) {
    const ScalingInstance inst = testing_util::random_instance(12, 12, 70 + s);
    scaling1(inst, diameter_bound(inst, 1e-3, Regime::FullPositive), 1e-3, o);
  }
  pipeline(testing_util::random_instance(30, 30, 73), 1e-4, Strategy::Warm2Then3, o);
  return {worst_proj <= kProjectionTol && log.worst_regret <= kRegretMax,
          "projection " + fmt("%.1e", worst_proj) + ", " + std::to_string(log.calls) + " traces, worst audit " +
              fmt("%.3g", log.worst_regret)};
}

// ---------------------------------------------------------------- 7

Outcome c7() {
  std::mt19937_64 rng(7);
  double worst_feas = -kUnbounded, worst_gap = -kUnbounded;
  for (int k = 0; k < 50; ++k) {
    const Index n = 2 + k % 19;
    const LaplacianMatrix L = testing_util::random_laplacian(n, rng, 0.5);
    const DenseMatrix H = L.dense() / 6.0;
    const Vector v = testing_util::random_vector(n, rng, -3, 3);
    const Vector alpha = testing_util::random_vector(n, rng, -1.0 / 32, 1.0 / 32);
    Vector w = testing_util::random_vector(n, rng, 0.0, 1.0);
    w = (w / w.sum() * (0.5 * n)).array() + 0.5;
    const double R2 = static_cast<double>(n) / 1024.0, eps = 1e-6;
    const ConstrainedQuadSolution s = l2_constrained_min(v, QuadraticForm(H), alpha, w, 1024.0, eps);
    worst_feas = std::max(worst_feas, (s.delta - alpha).cwiseAbs2().dot(w) - R2);
    const Vector ref = oracle::ball_qp(v, H, alpha, w, R2);
    worst_gap = std::max(worst_gap, s.objective - (v.dot(ref) + ref.dot(H * ref)) - eps);
  }
  return {worst_feas <= 0.0 && worst_gap <= kBallExtra,
          "ball excess " + fmt("%.1e", worst_feas) + ", gap - eps " + fmt("%.1e", worst_gap)};
}

// ---------------------------------------------------------------- 8

Outcome c8() {
  std::mt19937_64 rng(8);
  double worst_inf = -kUnbounded, worst_val = -kUnbounded;
  Index calls = 0;
  auto check_inf = [&](const MwuCallRecord& r) {
    ++calls;
    worst_inf = std::max(worst_inf, (*r.delta - *r.alpha).cwiseAbs().maxCoeff() - r.inf_bound);
  };
  // standalone calls on n <= 4 against an exhaustive grid
  for (int k = 0; k < 24; ++k) {
    const Index n = 2 + k % 3;
    const LaplacianMatrix H = testing_util::random_laplacian(n, rng, 1.0);
    const Vector g = testing_util::random_vector(n, rng, -1, 1);
    Vector alpha = testing_util::random_vector(n, rng, -1.0 / 32, 1.0 / 32);
    const double K = 1.0 + k % 3, eps = 1e-6;
    Observer obs;
    obs.on_mwu_basic = check_inf;
    SolverOptions o;
    o.observer = &obs;
    const MwuBasicResult r = mwu_basic(g, H, alpha, mwu_basic_budget(n, K, 4.0), K, eps, o);
    const int pts = n == 2 ? 201 : n == 3 ? 61 : 25;
    const double grid = oracle::box_grid_min(g, H.dense(), alpha, kBoxRadius, pts);
    const double exact = oracle::box_value(g, H.dense(), oracle::box_qp(g, H.dense(), alpha, kBoxRadius));
    worst_val = std::max(worst_val, box_quadratic(g, H, r.delta) - std::min(grid, exact) - eps);
  }
  // every call inside Scaling1 runs: the infinity bound
  Observer obs;
  obs.on_mwu_basic = check_inf;
  SolverOptions o;
  o.observer = &obs;
  for (int s = 0; s < 3; ++s) {
    const ScalingInstance inst = testing_util::random_instance(12, 12, 80 + s);
    scaling1(inst, diameter_bound(inst, 1e-3, Regime::FullPositive), 1e-3, o);
  }
  const ScalingInstance ut = testing_util::instance({{1, 1}, {0, 1}}, {1, 1}, {1, 1});
  scaling1(ut, diameter_bound(ut, 1e-4, Regime::General), 1e-4, o);
  return {worst_inf <= kInfExtra && worst_val <= kBoxExtra,
          std::to_string(calls) + " calls, inf excess " + fmt("%.1e", worst_inf) + ", value - grid - eps " +
              fmt("%.1e", worst_val)};
}

// ---------------------------------------------------------------- 9

Outcome c9() {
  Index calls = 0, case_a = 0, case_b = 0, failed = 0;
  double worst_inf = -kUnbounded;
  Observer obs;
  obs.on_mwu_full = [&](const MwuCallRecord& r) {
    ++calls;
    const Vector& g = *r.grad;
    const LaplacianMatrix& H = *r.H;
    const Vector& a = *r.alpha;
    const double n = static_cast<double>(g.size());
    worst_inf = std::max(worst_inf, (*r.delta - a).cwiseAbs().maxCoeff() - (kBoxRadius + 2.0 / r.K));
    const double q = box_quadratic(g, H, *r.delta);
    double est = 0.0;  // 0 is in the box
    if (n <= 5000) est = std::min(est, box_quadratic(g, H, agd_box_quadratic(g, H, a, 2000)));
    else est = std::min(est, g.dot(a) - g.cwiseAbs().sum() * kBoxRadius);  // H = 0 in the crafted case
    const bool ha = q <= 0.25 * est + 52.0 * n * n * n * r.eps;
    const bool hb = q <= -r.rho / (256.0 * r.K);
    case_a += ha;
    case_b += hb;
    failed += !(ha || hb);
  };
  SolverOptions o;
  o.observer = &obs;
  for (int s = 0; s < 3; ++s) pipeline(testing_util::random_instance(40, 40, 90 + s), 1e-4, Strategy::Warm2Then3, o);
  pipeline(testing_util::sparse_instance(40, 93, 0.2), 1e-4, Strategy::Warm2Then3, o);
  // crafted call that takes the accumulated branch
  {
    const Index n = Index{1} << 20;
    Vector grad = Vector::Zero(n);
    grad[0] = -static_cast<double>(n);
    SolverOptions oc = o;
    oc.mwu_early_exit = false;
    mwu_full(grad, LaplacianMatrix::from_edges(n, {}), Vector::Zero(n), 3, 60.0, 1.0, 1e-6, oc);
  }
  return {failed == 0 && worst_inf <= kInfExtra && calls > 0,
          std::to_string(calls) + " calls, (a) " + std::to_string(case_a) + ", (b) " + std::to_string(case_b) +
              ", neither " + std::to_string(failed) + ", inf excess " + fmt("%.1e", worst_inf)};
}

// ---------------------------------------------------------------- 10

Outcome c10() {
  const auto t0 = Clock::now();
  const double eps = std::sqrt(kC10Potential);
  double worst_pot = 0, worst_gap = 0;
  int not_converged = 0;
  for (int s = 0; s < 20; ++s) {
    const ScalingInstance inst = testing_util::random_instance(50, 50, 100 + s);
    double f[3];
    int i = 0;
    for (Method m : {Method::S0, Method::S1, Method::S3}) {
      RunConfig cfg;
      cfg.method = m;
      cfg.eps = eps;
      cfg.options.timing = false;
      const RunOutcome out = run(inst, cfg);
      not_converged += out.status != Status::Converged;
      worst_pot = std::max(worst_pot, out.report.col_potential);
      f[i++] = out.f;
    }
    worst_gap = std::max({worst_gap, std::abs(f[0] - f[1]), std::abs(f[0] - f[2]), std::abs(f[1] - f[2])});
  }
  const double secs = seconds_since(t0);
  return {not_converged == 0 && worst_pot <= kC10Potential && worst_gap <= kC10Agree && secs < kC10Seconds,
          "60 runs, worst potential " + fmt("%.1e", worst_pot) + ", worst f gap " + fmt("%.1e", worst_gap) + ", " +
              fmt("%.0f", secs) + " s"};
}

// ---------------------------------------------------------------- 11

// Scaling0: pooled mean log potential over sparse instances still in the
// sublinear phase (|x*|_inf >= 5), N = 1.1 |x*|_inf.
double s0_slope(int* used) {
  const std::vector<Index> Ts{50, 100, 200, 400};
  std::vector<double> mean(Ts.size(), 0.0);
  *used = 0;
  for (int s = 1; s <= 20; ++s) {
    const ScalingInstance inst = testing_util::sparse_instance(20, s, 0.2);
    const Vector u = reference_minimizer(inst);
    const double xn = u.cwiseAbs().maxCoeff();
    if (xn < 5.0) continue;
    ++*used;
    for (std::size_t k = 0; k < Ts.size(); ++k) mean[k] += std::log(scaling0(inst, 1.1 * xn, Ts[k]).result.potential);
  }
  std::vector<double> lt;
  for (std::size_t k = 0; k < Ts.size(); ++k) {
    mean[k] /= *used;
    lt.push_back(std::log(static_cast<double>(Ts[k])));
  }
  return oracle::slope(lt, mean);
}

struct Sweep {
  std::vector<double> iters;
  bool all_converged = true;
};

Sweep sweep(const ScalingInstance& inst, Method m, const SolverOptions& base, Index ras_cap) {
  Sweep s;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    RunConfig cfg;
    cfg.method = m;
    cfg.eps = eps;
    cfg.ras_max_iters = ras_cap;
    cfg.options = base;
    const RunOutcome out = run(inst, cfg);
    s.all_converged &= out.status == Status::Converged;
    s.iters.push_back(static_cast<double>(out.iterations));
  }
  return s;
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : "/") + fmt("%.0f", x);
  return s;
}

Outcome c11(bool full) {
  int used = 0;
  const double s0 = s0_slope(&used);

  GenerateSpec g;
  g.kind = InstanceKind::UpperTriangularHard;
  g.d = g.n = 20;
  const ScalingInstance ut = generate(g, 0);
  std::vector<double> inv_eps, log_inv;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    inv_eps.push_back(std::log(1.0 / eps));
    log_inv.push_back(std::log(1.0 / eps));
  }
  auto exponent = [&](const Sweep& s) {
    std::vector<double> li;
    for (double k : s.iters) li.push_back(std::log(k));
    return oracle::slope(inv_eps, li);
  };

  SolverOptions quiet;
  quiet.timing = false;
  quiet.trace_stride = 100000;
  const Sweep r = sweep(ut, Method::Ras, quiet, 50'000'000);
  SolverOptions s1opts = quiet;
  s1opts.trace_stride = 1;
  s1opts.constants.C_T = 0.02;  // outer counts do not depend on the MWU budget
  const Sweep s1 = sweep(ut, Method::S1, s1opts, 0);
  const double er = exponent(r), e1 = exponent(s1), r2 = r_squared(log_inv, s1.iters);

  Outcome o;
  o.pass = s0 <= kS0Slope && used >= 3 && r.all_converged && s1.all_converged && er >= kRasExponent &&
           e1 <= kS1Exponent && r2 >= kS1LogLinearR2;
  o.detail = "s0 slope " + fmt("%.2f", s0) + " (" + std::to_string(used) + " inst), ras exp " + fmt("%.2f", er) +
             " [" + list(r.iters) + "], s1 exp " + fmt("%.2f", e1) + " R2(log) " + fmt("%.3f", r2) + " [" +
             list(s1.iters) + "]";
  if (full) {
    SolverOptions def = quiet;
    def.trace_stride = 1;
    const Sweep sd = sweep(ut, Method::S1, def, 0);
    const double ed = exponent(sd), rd = r_squared(log_inv, sd.iters);
    o.pass = o.pass && sd.all_converged && ed <= kS1Exponent && rd >= kS1LogLinearR2;
    o.detail += ", default C_T: exp " + fmt("%.2f", ed) + " [" + list(sd.iters) + "]";
  }
  return o;
}

// ---------------------------------------------------------------- 12

Outcome c12() {
  int mismatches = 0, certs = 0, bad_certs = 0;
  for (int mask = 0; mask < 512; ++mask) {
    std::vector<std::vector<int>> pat(3, std::vector<int>(3));
    DenseMatrix a = DenseMatrix::Zero(3, 3);
    bool empty_row = false;
    for (int i = 0; i < 3; ++i) {
      int row = 0;
      for (int j = 0; j < 3; ++j) {
        pat[i][j] = (mask >> (3 * i + j)) & 1;
        a(i, j) = pat[i][j];
        row += pat[i][j];
      }
      empty_row |= row == 0;
    }
    const bool expect = oracle::has_perfect_matching(pat);
    if (empty_row) {
      // rejected at construction; an empty row never has a matching
      bool threw = false;
      try {
        ScalingInstance::create(a.sparseView(), {1, 1, 1}, {1, 1, 1});
      } catch (const Error&) {
        threw = true;
      }
      mismatches += expect || !threw;
      continue;
    }
    const ScalingInstance inst = ScalingInstance::create(a.sparseView(), {1, 1, 1}, {1, 1, 1});
    const FeasibilityVerdict v = check_asymptotic_scalability(inst);
    mismatches += v.scalable() != expect;
    if (v.certificate) {
      ++certs;
      // zero block with sum_R r + sum_C c > h
      bool zero = true;
      for (Index i : v.certificate->rows)
        for (Index j : v.certificate->cols) zero &= a(i, j) == 0.0;
      const auto weight = v.certificate->rows.size() + v.certificate->cols.size();
      bad_certs += !(zero && weight > 3 && certificate_valid(inst, *v.certificate));
    }
  }
  return {mismatches == 0 && bad_certs == 0,
          "512 patterns, " + std::to_string(mismatches) + " mismatches, " + std::to_string(certs) + " certificates, " +
              std::to_string(bad_certs) + " invalid"};
}

// ---------------------------------------------------------------- 13

Outcome c13() {
  std::mt19937_64 rng(13);
  double worst_f = 0, worst_g = 0;
  for (int k = 0; k < 20; ++k) {
    const ScalingInstance inst = mixed_instance(k, rng);
    const Vector x = testing_util::random_vector(inst.n(), rng, -5, 5);
    const Vector xs = x.array() + 1000.0;
    const ValueAndGradient a = eval_f_grad(inst, x), b = eval_f_grad(inst, xs);
    worst_f = std::max(worst_f, std::abs(a.f - b.f) / std::max(1.0, std::abs(a.f)));
    worst_g = std::max(worst_g, rel_err(b.grad, a.grad));
  }
  return {worst_f <= kShiftRel && worst_g <= kShiftRel,
          "f rel " + fmt("%.1e", worst_f) + ", grad rel " + fmt("%.1e", worst_g)};
}

}  // namespace

int main(int argc, char** argv) {
  bool full = false;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--full")) {
      full = true;
    } else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--full] [--only N]\n", argv[0]);
      return 2;
    }
  }
  const std::vector<std::function<Outcome()>> criteria{
      c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, [full] { return c11(full); }, c12, c13};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (only && only != id) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %2d: %s  %s  (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
