#include "matscale/scaling3.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "matscale/lapsolve.hpp"

namespace matscale {

std::optional<GapReport> gap_detect(const Vector& y, double rho) {
  const Index n = y.size();
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](Index a, Index b) { return std::abs(y[a]) > std::abs(y[b]); });
  const Index smax = std::min<Index>(n, static_cast<Index>(std::floor(rho)));
  for (Index s = 1; s <= smax; ++s) {
    const double a = std::abs(y[perm[s - 1]]);
    const double b = s < n ? std::abs(y[perm[s]]) : 0.0;
    if (a - b >= kGapJump && b <= rho / 2.0 && a >= rho / 4.0) {
      GapReport g;
      g.s = s;
      g.perm = perm;
      g.v_plus = Vector::Zero(n);
      g.v_minus = Vector::Zero(n);
      for (Index k = 0; k < s; ++k) {
        const Index i = perm[k];
        if (y[i] > 0.0) g.v_plus[i] = 1.0;
        if (y[i] < 0.0) g.v_minus[i] = -1.0;
      }
      return g;
    }
  }
  return std::nullopt;
}

bool cross_term_small(const Vector& grad, const LaplacianMatrix& H, const GapReport& report, double eps) {
  return std::abs(grad.dot(report.v_plus)) <= eps && H.quad(report.v_plus) <= eps &&
         std::abs(grad.dot(report.v_minus)) <= eps && H.quad(report.v_minus) <= eps;
}

RestrictedProblem restrict_problem(const Vector& grad, const LaplacianMatrix& H, const Vector& alpha,
                                   const GapReport& report) {
  const Index n = grad.size(), s = report.s;
  std::vector<Index> pos(static_cast<std::size_t>(n), -1);
  RestrictedProblem out{Vector(s), LaplacianMatrix(s), Vector(s)};
  for (Index k = 0; k < s; ++k) {
    pos[report.perm[k]] = k;
    out.grad[k] = grad[report.perm[k]];
    out.alpha[k] = alpha[report.perm[k]];
  }
  std::vector<Eigen::Triplet<double>> edges;
  const ColSparse& m = H.matrix();
  for (Index j = 0; j < m.outerSize(); ++j)
    for (ColSparse::InnerIterator it(m, j); it; ++it) {
      const Index i = it.row();
      if (i < j && pos[i] >= 0 && pos[j] >= 0 && it.value() < 0.0) edges.emplace_back(pos[i], pos[j], -it.value());
    }
  out.H = LaplacianMatrix::from_edges(s, edges);
  return out;
}

const char* to_string(RoundKind k) {
  switch (k) {
    case RoundKind::Plain:
      return "plain";
    case RoundKind::Recursed:
      return "recursed";
    case RoundKind::Accumulated:
      return "accumulated";
  }
  return "unknown";
}

FullRound mwu_full_round(const Vector& grad, const LaplacianMatrix& H, const Vector& alpha, const Vector& y,
                         double rho, double eps, const SolverOptions& opts) {
  FullRound out;
  out.delta = y;
  out.gap = gap_detect(y, rho);
  if (!out.gap) return out;
  const GapReport& g = *out.gap;
  if (cross_term_small(grad, H, g, eps)) {
    // Block is nearly disconnected: re-solve it on its own with an l_inf
    // guarantee of 1/32 + 1/32.
    const RestrictedProblem sub = restrict_problem(grad, H, alpha, g);
    const double K_sub = 4.0;
    const Index T_sub = mwu_basic_budget(g.s, K_sub, opts.constants.C_T);
    const MwuBasicResult z = mwu_basic(sub.grad, sub.H, sub.alpha, T_sub, K_sub, eps, opts);
    for (Index k = 0; k < g.s; ++k) out.delta[g.perm[k]] = z.delta[k];
    out.kind = RoundKind::Recursed;
  } else {
    out.direction = std::abs(grad.dot(g.v_plus)) > eps ? g.v_plus : g.v_minus;
    out.kind = RoundKind::Accumulated;
  }
  return out;
}

MwuFullResult mwu_full(const Vector& grad, const LaplacianMatrix& H, const Vector& alpha, Index T, double rho,
                       double K, double eps, const SolverOptions& opts) {
  const Index n = grad.size();
  if (H.size() != n || alpha.size() != n) throw Error(ErrorKind::InvalidInstance, "mwu_full: size mismatch");
  if (T < 1 || !(K >= 1.0) || !(rho >= 1.0))
    throw Error(ErrorKind::InvalidInstance, "mwu_full needs T >= 1, K >= 1, rho >= 1");
  const QuadraticForm Hq(ColSparse(H.matrix() / 6.0));

  MwuFullResult res;
  res.eta = 1.0 / (rho + K);
  res.inf_bound = kBoxRadius + 2.0 / K;
  res.regret = RegretAccumulator(n);
  res.v = Vector::Zero(n);
  res.v_hat = Vector::Zero(n);
  const Index max_rounds =
      opts.mwu_early_exit ? std::max<Index>(T, static_cast<Index>(std::ceil(opts.mwu_round_factor * T))) : T;

  FloorSimplexWeights w = FloorSimplexWeights::uniform(n);
  L2WarmStart warm;
  Vector acc = Vector::Zero(n);
  Index k = 0;
  while (k < max_rounds) {
    const ConstrainedQuadSolution sol = l2_constrained_min(grad, Hq, alpha, w.values(), 1024.0, eps, &warm);
    const FullRound round = mwu_full_round(grad, H, alpha, sol.delta, rho, eps, opts);
    if (round.kind == RoundKind::Accumulated) {
      res.v += round.direction;
      res.v_hat += round.direction.cwiseAbs();
      ++res.truncated_rounds;
    } else {
      acc += round.delta;
      if (round.kind == RoundKind::Recursed) ++res.recursed_rounds;
    }
    const Vector loss = -(round.delta - alpha).cwiseAbs().cwiseMin(rho + 1.0);
    res.regret.add(w.values(), loss);
    ++k;
    const bool few_truncated = static_cast<double>(res.truncated_rounds) <= k / (2.0 * K);
    if (opts.mwu_early_exit) {
      if (few_truncated && (acc / static_cast<double>(k) - alpha).cwiseAbs().maxCoeff() <= res.inf_bound) break;
    } else if (k == T) {
      break;
    }
    w = mwu_project(w, loss, res.eta);
  }
  res.rounds = k;
  if (static_cast<double>(res.truncated_rounds) <= k / (2.0 * K)) {
    res.delta = acc / static_cast<double>(k);
  } else {
    res.accumulated_branch = true;
    const double top = res.v_hat.maxCoeff();
    res.delta = top > 0.0 ? Vector(res.v / (K * top)) : Vector(Vector::Zero(n));
  }
  res.shrink = shrink_to_box(res.delta, alpha, res.inf_bound);

  if (opts.observer && opts.observer->on_mwu_full) {
    MwuCallRecord r;
    r.grad = &grad;
    r.H = &H;
    r.alpha = &alpha;
    r.T = T;
    r.rounds = k;
    r.K = K;
    r.eps = eps;
    r.eta = res.eta;
    r.rho = rho;
    r.inf_bound = res.inf_bound;
    r.delta = &res.delta;
    r.regret = &res.regret;
    r.accumulated_branch = res.accumulated_branch;
    r.truncated_rounds = res.truncated_rounds;
    r.recursed_rounds = res.recursed_rounds;
    r.v_hat = &res.v_hat;
    opts.observer->on_mwu_full(r);
  }
  return res;
}

double scaling3_rho(Index n) {
  const double nn = static_cast<double>(n);
  const double lo = 10.0 * std::cbrt(nn), hi = 2.0 * std::sqrt(nn);
  if (lo <= hi) return lo;
  return std::max(60.0, std::ceil(hi));
}

Index mwu_full_budget(Index n, double K, double rho, double C_T3) {
  const double T = C_T3 * (K * rho + K * K) * std::log(static_cast<double>(n));
  return std::max<Index>(1, static_cast<Index>(std::ceil(T)));
}

SolveResult scaling3(const ScalingInstance& inst, double N, const ScalePoint& x0, double eps,
                     const SolverOptions& opts, Scaling3Stats* stats) {
  if (!(N >= 1.0)) throw Error(ErrorKind::InvalidInstance, "scaling3 needs N >= 1");
  if (!(eps > 0.0 && eps <= 0.25)) throw Error(ErrorKind::InvalidInstance, "scaling3 needs eps in (0, 1/4]");
  if (x0.size() != inst.n()) throw Error(ErrorKind::InvalidInstance, "scaling3: start point has wrong size");
  opts.constants.validate();
  Scaling3Stats local;
  Scaling3Stats& st = stats ? *stats : local;
  st = Scaling3Stats{};
  if (opts.delegate_small_scaling3 && inst.n() < 900) {
    st.delegated = true;
    return scaling1(inst, N, eps, opts, &x0);
  }

  const Index n = inst.n();
  const double K = outer_k(eps, opts.constants);
  const double rho = scaling3_rho(n);
  const Index T = mwu_full_budget(n, K, rho, opts.constants.C_T3);
  const double N0 = N;
  const double eps_inner = eps / (64.0 * N0 * std::pow(static_cast<double>(n), 3));
  const Index cap = static_cast<Index>(std::ceil(opts.outer_cap_factor * 10.0 * N0 * K));
  const double thr = stop_threshold(eps, opts.threshold);
  const Index stride = std::max<Index>(opts.trace_stride, 1);

  SolveResult res;
  TraceRecorder rec(&res.trace, "s3", opts.timing);
  ScalePoint x = x0;
  const char* kind = "init";
  for (Index t = 0;; ++t) {
    const ValueAndGradient fg = eval_f_grad(inst, x);
    const double pot = potential(fg.grad, inst.c());
    const bool done = pot <= thr || t >= cap;
    if (done || t % stride == 0) rec.record(t, fg.f, pot, x, N, kind);
    if (done) {
      res.x = x;
      res.status = pot <= thr ? Status::Converged : Status::IterationCapReached;
      res.iterations = t;
      res.potential = pot;
      res.f = fg.f;
      res.N = N;
      return res;
    }
    const LaplacianMatrix H = step_hessian(inst, x, opts, static_cast<std::uint64_t>(t));
    const Vector alpha = box_shift(x, N).alpha;
    const MwuFullResult mf = mwu_full(fg.grad, H, alpha, T, rho, K, eps_inner, opts);
    st.truncated_rounds += mf.truncated_rounds;
    st.recursed_rounds += mf.recursed_rounds;
    if (mf.accumulated_branch) {
      ++st.accumulated_steps;
      kind = "accumulated";
    } else {
      kind = mf.recursed_rounds > 0 ? "recursed" : "plain";
    }
    const Vector step = mf.delta / kStepDivisor;
    if (opts.observer && opts.observer->on_second_order_step) {
      SecondOrderStepRecord r;
      r.method = "s3";
      r.x_prev = x;
      r.step = step;
      r.N = N;
      opts.observer->on_second_order_step(r);
    }
    x += step;
    N += 1.0 / K;
  }
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Warm0Then3:
      return "warm0+s3";
    case Strategy::Warm2Then3:
      return "warm2+s3";
    case Strategy::Pure1:
      return "s1";
    case Strategy::Pure0:
      return "s0";
  }
  return "unknown";
}

double warm_start_potential(const ScalingInstance& inst) {
  const double n13 = std::cbrt(static_cast<double>(inst.n()));
  return n13 * n13 / (4.0 * static_cast<double>(inst.h()));
}

PipelineResult pipeline(const ScalingInstance& inst, double eps, Strategy strategy, const SolverOptions& opts,
                        std::optional<double> n_bound) {
  if (!check_asymptotic_scalability(inst).scalable())
    throw Error(ErrorKind::Infeasible, "instance is not asymptotically scalable");
  opts.constants.validate();
  PipelineResult out;
  const Regime regime = inst.fully_positive() ? Regime::FullPositive : Regime::General;
  out.N = n_bound ? std::max(1.0, *n_bound) : diameter_bound(inst, eps, regime, std::nullopt, opts.constants.C_diam);
  const double N = out.N;
  const double h = static_cast<double>(inst.h());
  const double n13 = std::cbrt(static_cast<double>(inst.n()));
  const double thr = stop_threshold(eps, opts.threshold);

  switch (strategy) {
    case Strategy::Pure1:
      out.result = scaling1(inst, N, eps, opts);
      out.warm_start = ScalePoint::Zero(inst.n());
      return out;
    case Strategy::Pure0: {
      const Index T_max = std::max<Index>(1, static_cast<Index>(std::ceil(std::cbrt(N * N * h / thr))));
      Index T = std::min(T_max, std::max<Index>(1, static_cast<Index>(std::ceil(opts.constants.C_warm * N))));
      for (;;) {
        Scaling0Result s0 = scaling0(inst, N, T, opts, thr);
        ++out.s0_runs;
        out.s0_total_iterations += s0.result.iterations;
        out.result = std::move(s0.result);
        if (out.result.status == Status::Converged || T >= T_max) break;
        T = std::min(T_max, 2 * T);
      }
      out.warm_start = ScalePoint::Zero(inst.n());
      return out;
    }
    case Strategy::Warm0Then3:
    case Strategy::Warm2Then3:
      break;
  }

  SolveTrace warm_trace;
  Index warm_iters = 0;
  const double target = warm_start_potential(inst);
  if (strategy == Strategy::Warm0Then3) {
    const Index T = std::max<Index>(1, static_cast<Index>(std::ceil(std::sqrt(N * h / n13))));
    Scaling0Result s0 = scaling0(inst, N, T, opts, target);
    out.warm_start = s0.z;
    warm_iters = s0.result.iterations;
    warm_trace = std::move(s0.result.trace);
  } else {
    const Index T = std::max<Index>(1, static_cast<Index>(std::ceil(std::sqrt(h / n13))));
    SolveResult s2 = scaling2(inst, N, T, opts, target);
    out.warm_start = s2.x;
    warm_iters = s2.iterations;
    warm_trace = std::move(s2.trace);
  }
  // f is invariant under constant shifts; center the start in the box.
  ScalePoint& x0 = out.warm_start;
  if (x0.size()) x0.array() -= 0.5 * (x0.maxCoeff() + x0.minCoeff());
  const double N3 = std::max(N, x0.size() ? x0.cwiseAbs().maxCoeff() : 0.0);
  const double eps3 = std::min(eps, 0.25);
  out.result = scaling3(inst, N3, x0, eps3, opts, &out.stats);
  warm_trace.append(out.result.trace);
  out.result.trace = std::move(warm_trace);
  // Both phases record their start point; count the hand-off as one step.
  out.result.iterations += warm_iters + 1;
  return out;
}

}  // namespace matscale
