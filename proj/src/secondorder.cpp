#include "matscale/secondorder.hpp"

#include <algorithm>
#include <cmath>

#include "matscale/lapsolve.hpp"

namespace matscale {

BoxShift box_shift(const ScalePoint& x, double N) {
  BoxShift b{Vector::Zero(x.size())};
  if (!std::isfinite(N)) return b;
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] - kBoxRadius < -N)
      b.alpha[i] = kBoxRadius - N - x[i];
    else if (x[i] + kBoxRadius > N)
      b.alpha[i] = N - x[i] - kBoxRadius;
  }
  return b;
}

double box_quadratic(const Vector& grad, const LaplacianMatrix& H, const Vector& delta) {
  return grad.dot(delta) + H.quad(delta) / 6.0;
}

Index mwu_basic_budget(Index n, double K, double C_T) {
  const double nn = static_cast<double>(n);
  const double T = C_T * (std::sqrt(nn) * K + K * K) * std::log(nn);
  return std::max<Index>(1, static_cast<Index>(std::ceil(T)));
}

double shrink_to_box(Vector& delta, const Vector& alpha, double bound) {
  const double dev = (delta - alpha).cwiseAbs().maxCoeff();
  if (dev <= bound) return 1.0;
  double th = bound / dev;
  for (int guard = 0; guard < 8; ++guard) {
    Vector cand = alpha + th * (delta - alpha);
    if ((cand - alpha).cwiseAbs().maxCoeff() <= bound) {
      delta = std::move(cand);
      return th;
    }
    th *= 1.0 - 1e-15;
  }
  delta = alpha + th * (delta - alpha);
  return th;
}

MwuBasicResult mwu_basic(const Vector& grad, const LaplacianMatrix& H, const Vector& alpha, Index T, double K,
                         double eps, const SolverOptions& opts) {
  const Index n = grad.size();
  if (H.size() != n || alpha.size() != n) throw Error(ErrorKind::InvalidInstance, "mwu_basic: size mismatch");
  if (T < 1 || !(K >= 1.0)) throw Error(ErrorKind::InvalidInstance, "mwu_basic needs T >= 1 and K >= 1");
  const QuadraticForm Hq(ColSparse(H.matrix() / 6.0));

  MwuBasicResult res;
  res.eta = 1.0 / (std::sqrt(static_cast<double>(n)) + K);
  res.inf_bound = kBoxRadius + 1.0 / (8.0 * K);
  res.regret = RegretAccumulator(n);
  const Index max_rounds =
      opts.mwu_early_exit ? std::max<Index>(T, static_cast<Index>(std::ceil(opts.mwu_round_factor * T))) : T;

  FloorSimplexWeights w = FloorSimplexWeights::uniform(n);
  L2WarmStart warm;
  Vector acc = Vector::Zero(n);
  Index k = 0;
  while (k < max_rounds) {
    ConstrainedQuadSolution sol = l2_constrained_min(grad, Hq, alpha, w.values(), 1024.0, eps, &warm);
    acc += sol.delta;
    ++k;
    const Vector loss = -(sol.delta - alpha).cwiseAbs();
    res.regret.add(w.values(), loss);
    if (opts.mwu_early_exit) {
      if ((acc / static_cast<double>(k) - alpha).cwiseAbs().maxCoeff() <= res.inf_bound) break;
    } else if (k == T) {
      break;
    }
    w = mwu_project(w, loss, res.eta);
  }
  res.rounds = k;
  res.delta = acc / static_cast<double>(k);
  res.bound_met = (res.delta - alpha).cwiseAbs().maxCoeff() <= res.inf_bound;
  res.shrink = shrink_to_box(res.delta, alpha, res.inf_bound);

  if (opts.observer && opts.observer->on_mwu_basic) {
    MwuCallRecord r;
    r.grad = &grad;
    r.H = &H;
    r.alpha = &alpha;
    r.T = T;
    r.rounds = k;
    r.K = K;
    r.eps = eps;
    r.eta = res.eta;
    r.inf_bound = res.inf_bound;
    r.delta = &res.delta;
    r.regret = &res.regret;
    opts.observer->on_mwu_basic(r);
  }
  return res;
}

LaplacianMatrix step_hessian(const ScalingInstance& inst, const ScalePoint& x, const SolverOptions& opts,
                             std::uint64_t salt) {
  return sparsify(build_hessian(inst, x, opts.hessian_cap), opts.sparsify_ratio, opts.sparsify_backend,
                  opts.seed + salt);
}

double outer_k(double eps, const Constants& k) {
  return std::max(1.0, std::ceil(k.C_K * std::log(1.0 / eps)));
}

namespace {

void notify_step(const SolverOptions& opts, const char* method, const ScalePoint& x, const Vector& step, double N) {
  if (!opts.observer || !opts.observer->on_second_order_step) return;
  SecondOrderStepRecord r;
  r.method = method;
  r.x_prev = x;
  r.step = step;
  r.N = N;
  opts.observer->on_second_order_step(r);
}

}  // namespace

SolveResult scaling1(const ScalingInstance& inst, double N, double eps, const SolverOptions& opts,
                     const ScalePoint* x0) {
  if (!(N >= 1.0)) throw Error(ErrorKind::InvalidInstance, "scaling1 needs N >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::InvalidInstance, "scaling1 needs eps in (0, 1)");
  opts.constants.validate();
  const double K = outer_k(eps, opts.constants);
  const Index T = mwu_basic_budget(inst.n(), K, opts.constants.C_T);
  const Index cap = static_cast<Index>(std::ceil(opts.outer_cap_factor * N * K));
  const double thr = stop_threshold(eps, opts.threshold);
  const double N0 = N;
  const Index stride = std::max<Index>(opts.trace_stride, 1);

  SolveResult res;
  TraceRecorder rec(&res.trace, "s1", opts.timing);
  ScalePoint x = x0 ? *x0 : ScalePoint::Zero(inst.n());
  for (Index t = 0;; ++t) {
    const ValueAndGradient fg = eval_f_grad(inst, x);
    const double pot = potential(fg.grad, inst.c());
    const bool done = pot <= thr || t >= cap;
    if (done || t % stride == 0) rec.record(t, fg.f, pot, x, N, t == 0 ? "init" : "mwu");
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
    const MwuBasicResult mb = mwu_basic(fg.grad, H, alpha, T, K, eps / (900.0 * N0), opts);
    const Vector step = mb.delta / kStepDivisor;
    notify_step(opts, "s1", x, step, N);
    x += step;
    N += 1.0 / (50.0 * K);
  }
}

Vector agd_box_quadratic(const Vector& grad, const LaplacianMatrix& H, const Vector& alpha, Index T) {
  const Index n = grad.size();
  const Vector diag = H.diagonal();
  Vector scale(n), lo(n), hi(n), out = Vector::Zero(n);
  std::vector<Index> active;
  for (Index i = 0; i < n; ++i) {
    if (diag[i] > 0.0) {
      scale[i] = std::sqrt(diag[i]);
      lo[i] = scale[i] * (alpha[i] - kBoxRadius);
      hi[i] = scale[i] * (alpha[i] + kBoxRadius);
      active.push_back(i);
    } else {
      // Isolated vertex: the quadratic does not see it.
      scale[i] = 1.0;
      lo[i] = hi[i] = 0.0;
      const double sgn = grad[i] > 0.0 ? 1.0 : (grad[i] < 0.0 ? -1.0 : 0.0);
      out[i] = alpha[i] - sgn * kBoxRadius;
    }
  }
  if (active.empty() || T < 1) {
    for (Index i : active) out[i] = std::clamp(0.0, alpha[i] - kBoxRadius, alpha[i] + kBoxRadius);
    return out;
  }
  const Vector gs = grad.cwiseQuotient(scale);
  auto project = [&](Vector& v) {
    for (Index i = 0; i < n; ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
  };
  // Gradient of <gs, u> + u^T Hs u / 6 with Hs = D^-1/2 H D^-1/2; inactive
  // coordinates are pinned at 0.
  auto gradient = [&](const Vector& u) {
    const Vector hu = H.apply(u.cwiseQuotient(scale)).cwiseQuotient(scale);
    return Vector(gs + hu / 3.0);
  };
  const double L = 2.0 / 3.0;
  Vector u = Vector::Zero(n);
  project(u);
  Vector y = u;
  double t = 1.0;
  for (Index k = 0; k < T; ++k) {
    Vector u_next = y - gradient(y) / L;
    project(u_next);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = u_next + ((t - 1.0) / t_next) * (u_next - u);
    u = std::move(u_next);
    t = t_next;
  }
  for (Index i : active) out[i] = u[i] / scale[i];
  return out;
}

SolveResult scaling2(const ScalingInstance& inst, double N, Index T, const SolverOptions& opts,
                     double target_potential) {
  if (!(N >= 1.0) || T < 1) throw Error(ErrorKind::InvalidInstance, "scaling2 needs N >= 1 and T >= 1");
  opts.constants.validate();
  const double hN = static_cast<double>(inst.h()) * N;
  const Index loops = std::max<Index>(1, static_cast<Index>(std::ceil(opts.constants.C_S2 * N * std::log(hN))));
  const Index stride = std::max<Index>(opts.trace_stride, 1);

  SolveResult res;
  TraceRecorder rec(&res.trace, "s2", opts.timing);
  ScalePoint x = ScalePoint::Zero(inst.n());
  ValueAndGradient fg = eval_f_grad(inst, x);
  const char* kind = "init";
  for (Index t = 0;; ++t) {
    const double pot = potential(fg.grad, inst.c());
    const bool reached = target_potential > 0.0 && pot <= target_potential;
    bool done = reached || t >= loops;
    ScalePoint next;
    double f_next = fg.f;
    const char* chosen = "";
    if (!done) {
      const LaplacianMatrix H = step_hessian(inst, x, opts, static_cast<std::uint64_t>(t));
      const Vector delta = agd_box_quadratic(fg.grad, H, box_shift(x, N).alpha, T);
      const ScalePoint full = x + delta;
      const ScalePoint damped = x + delta / kStepDivisor;
      const double f_full = eval_f(inst, full);
      const double f_damped = eval_f(inst, damped);
      if (f_full < f_next && f_full <= f_damped) {
        next = full;
        f_next = f_full;
        chosen = "full";
      } else if (f_damped < f_next) {
        next = damped;
        f_next = f_damped;
        chosen = "damped";
      } else {
        done = true;  // no candidate improves f; later iterations would repeat
      }
    }
    if (done || t % stride == 0) rec.record(t, fg.f, pot, x, N, kind);
    if (done) {
      res.x = x;
      res.iterations = t;
      res.potential = pot;
      res.f = fg.f;
      res.N = N;
      res.status = (target_potential <= 0.0 || reached) ? Status::Converged : Status::IterationCapReached;
      return res;
    }
    notify_step(opts, "s2", x, next - x, N);
    kind = chosen;
    x = std::move(next);
    fg = eval_f_grad(inst, x);
  }
}

}  // namespace matscale
