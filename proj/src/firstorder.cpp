#include "matscale/firstorder.hpp"

#include <algorithm>
#include <cmath>

namespace matscale {

// ---------------------------------------------------------------- RAS

RasState ras_init(const ScalingInstance& inst) { return {Vector::Zero(inst.n()), Vector::Zero(inst.d())}; }

namespace {

// Column log-sum-exp of A_ij exp(y_i) for every column j.
Vector column_lse(const ScalingInstance& inst, const Vector& y) {
  const RowSparse& A = inst.A();
  Vector mx = Vector::Constant(inst.n(), -std::numeric_limits<double>::infinity());
  for (Index i = 0; i < inst.d(); ++i)
    for (RowSparse::InnerIterator it(A, i); it; ++it) mx[it.col()] = std::max(mx[it.col()], y[i]);
  Vector s = Vector::Zero(inst.n());
  for (Index i = 0; i < inst.d(); ++i)
    for (RowSparse::InnerIterator it(A, i); it; ++it) s[it.col()] += it.value() * std::exp(y[i] - mx[it.col()]);
  return mx.array() + s.array().log();
}

Vector row_lse(const ScalingInstance& inst, const Vector& x) {
  const RowSparse& A = inst.A();
  Vector out(inst.d());
  for (Index i = 0; i < inst.d(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (RowSparse::InnerIterator it(A, i); it; ++it) mx = std::max(mx, x[it.col()]);
    double s = 0.0;
    for (RowSparse::InnerIterator it(A, i); it; ++it) s += it.value() * std::exp(x[it.col()] - mx);
    out[i] = mx + std::log(s);
  }
  return out;
}

}  // namespace

RasState ras_step(const ScalingInstance& inst, const RasState& state) {
  RasState next;
  next.y = inst.r().array().log() - row_lse(inst, state.x).array();
  next.x = inst.c().array().log() - column_lse(inst, next.y).array();
  return next;
}

RowSparse ras_scaled_matrix(const ScalingInstance& inst, const RasState& state) {
  RowSparse S = inst.A();
  for (Index i = 0; i < S.outerSize(); ++i)
    for (RowSparse::InnerIterator it(S, i); it; ++it) it.valueRef() *= std::exp(state.y[i] + state.x[it.col()]);
  return S;
}

SolveResult ras(const ScalingInstance& inst, double threshold, Index max_iters, const SolverOptions& opts) {
  const RowSparse& A = inst.A();
  const Index d = inst.d(), n = inst.n();
  const auto* col = A.innerIndexPtr();
  const auto* outer = A.outerIndexPtr();
  const Vector logr = inst.r().array().log();
  const Vector logc = inst.c().array().log();

  SolveResult res;
  TraceRecorder rec(&res.trace, "ras", opts.timing);
  Vector x = Vector::Zero(n), y = Vector::Zero(d);
  Vector S = Eigen::Map<const Vector>(A.valuePtr(), A.nonZeros());
  Vector cs(n);
  const Index stride = std::max<Index>(opts.trace_stride, 1);

  for (Index k = 0;; ++k) {
    if (k % 1024 == 1023) {
      // Refresh the multiplicatively updated entries from the log scalings.
      for (Index i = 0; i < d; ++i)
        for (auto p = outer[i]; p < outer[i + 1]; ++p) S[p] = A.valuePtr()[p] * std::exp(y[i] + x[col[p]]);
    }
    for (Index i = 0; i < d; ++i) {
      double rs = 0.0;
      for (auto p = outer[i]; p < outer[i + 1]; ++p) rs += S[p];
      const double fac = inst.r()[i] / rs;
      y[i] += std::log(fac);
      for (auto p = outer[i]; p < outer[i + 1]; ++p) S[p] *= fac;
    }
    cs.setZero();
    for (Index i = 0; i < d; ++i)
      for (auto p = outer[i]; p < outer[i + 1]; ++p) cs[col[p]] += S[p];
    ++work_counters().grad_evals;
    const double pot = potential(cs - inst.c(), inst.c());
    const bool done = pot <= threshold || k >= max_iters;
    if (done || k % stride == 0) {
      const double f = inst.r().dot(logr - y) - inst.c().dot(x);
      rec.record(k, f, pot, x, 0.0, "ras");
    }
    if (done) {
      res.x = x;
      res.iterations = k;
      res.potential = pot;
      res.status = pot <= threshold ? Status::Converged : Status::IterationCapReached;
      res.f = eval_f(inst, x);
      return res;
    }
    for (Index j = 0; j < n; ++j) {
      const double fac = inst.c()[j] / cs[j];
      x[j] += logc[j] - std::log(cs[j]);
      cs[j] = fac;
    }
    for (Index p = 0; p < S.size(); ++p) S[p] *= cs[col[p]];
  }
}

// ---------------------------------------------------------------- gradient step

GradStepDeltas grad_step_deltas(const Vector& grad, const Vector& c, const ScalePoint& x, double N) {
  const Index n = grad.size();
  GradStepDeltas out{Vector::Zero(n), Vector::Zero(n)};
  for (Index j = 0; j < n; ++j) {
    const double up = std::max(0.0, std::min(0.5, N - x[j]));
    const double down = std::min(0.0, std::max(-0.5, -N - x[j]));
    const double g = grad[j];
    if (g > c[j]) {
      out.minus[j] = down;
    } else if (g < 0.0) {
      out.plus[j] = std::clamp(-3.0 * g / (8.0 * c[j]), 0.0, up);
    } else if (g > 0.0) {
      out.minus[j] = std::clamp(-3.0 * g / (8.0 * c[j]), down, 0.0);
    }
  }
  return out;
}

GradStepOutcome grad_step(const ScalingInstance& inst, const ScalePoint& x, const Vector& grad, double N) {
  const GradStepDeltas dl = grad_step_deltas(grad, inst.c(), x, N);
  ScalePoint y1 = x + dl.plus;
  ScalePoint y2 = x + dl.minus;
  const double f1 = eval_f(inst, y1);
  const double f2 = eval_f(inst, y2);
  if (f2 < f1) return {std::move(y2), f2};
  return {std::move(y1), f1};
}

ScalePoint grad_step(const ScalingInstance& inst, const ScalePoint& x, double N) {
  return grad_step(inst, x, eval_grad(inst, x), N).x;
}

ScalePoint mirror_step(const ScalePoint& z, const Vector& v, const Vector& c, double N) {
  return (z.array() - v.array() / c.array()).cwiseMax(-N).cwiseMin(N);
}

double next_tau(double prev) {
  const double p2 = prev * prev;
  return 0.5 * (-p2 + prev * std::sqrt(p2 + 4.0));
}

// ---------------------------------------------------------------- LC / Scaling0

ScalePoint lc(const ScalingInstance& inst, double N, Index T, const ScalePoint& y0, const SolverOptions& opts,
              TraceRecorder* rec, Index t_offset) {
  const Vector& c = inst.c();
  const Observer* obs = opts.observer;
  const bool watch = obs && obs->on_lc_iteration;
  const bool tracing = rec && rec->enabled();
  const Index stride = std::max<Index>(opts.trace_stride, 1);

  ScalePoint z = ScalePoint::Zero(inst.n());
  ScalePoint y = y0;
  double f_y = watch ? eval_f(inst, y) : 0.0;
  double tau = 1.0 / (32.0 * N);
  for (Index k = 0; k < T; ++k) {
    if (k > 0) tau = next_tau(tau);
    const double alpha = 3.0 / (64.0 * tau);
    const ScalePoint x = tau * z + (1.0 - tau) * y;
    const Vector grad = eval_grad(inst, x);
    const Vector gs = opts.literal_unit_clip ? Vector(grad.cwiseMin(1.0)) : Vector(grad.cwiseMin(c));
    GradStepOutcome step = grad_step(inst, x, grad, 15.0 * N);
    ScalePoint z_next = mirror_step(z, alpha * gs, c, N);
    if (watch) {
      LcIterationRecord r;
      r.k = k;
      r.N = N;
      r.tau = tau;
      r.alpha = alpha;
      r.x = x;
      r.y_prev = y;
      r.y_next = step.x;
      r.z_prev = z;
      r.z_next = z_next;
      r.f_y_prev = f_y;
      r.f_y_next = step.f;
      obs->on_lc_iteration(r);
    }
    if (tracing && (k % stride == 0 || k + 1 == T))
      rec->record(t_offset + k, step.f, grad_potential(inst, step.x), step.x, N, "lc");
    y = std::move(step.x);
    f_y = step.f;
    z = std::move(z_next);
  }
  return y;
}

Scaling0Result scaling0(const ScalingInstance& inst, double N, Index T, const SolverOptions& opts,
                        double target_potential) {
  if (!(N >= 1.0) || T < 1) throw Error(ErrorKind::InvalidInstance, "scaling0 needs N >= 1 and T >= 1");
  Scaling0Result out;
  TraceRecorder rec(&out.result.trace, "s0", opts.timing);
  const Index warm_T = static_cast<Index>(std::ceil(opts.constants.C_warm * N));
  const Index rounds = static_cast<Index>(std::ceil(std::log2(std::max(N, 2.0))));
  const Index stride = std::max<Index>(opts.trace_stride, 1);

  ScalePoint z0 = ScalePoint::Zero(inst.n());
  const ValueAndGradient fg0 = eval_f_grad(inst, z0);
  const double pot0 = potential(fg0.grad, inst.c());
  rec.record(0, fg0.f, pot0, z0, N, "init");
  if (target_potential > 0.0 && pot0 <= target_potential) {
    out.z1 = out.z = out.result.x = z0;
    out.result.potential = pot0;
    out.result.f = fg0.f;
    out.result.N = N;
    out.result.iterations = 0;
    out.result.status = Status::Converged;
    return out;
  }
  Index t = 1;
  for (Index k = 0; k <= rounds; ++k) {
    z0 = lc(inst, N, warm_T, z0, opts, &rec, t);
    t += warm_T;
  }
  out.z1 = lc(inst, N, T, z0, opts, &rec, t);
  t += T;

  const Observer* obs = opts.observer;
  ScalePoint zk = out.z1;
  ValueAndGradient fg = eval_f_grad(inst, zk);
  double pot = potential(fg.grad, inst.c());
  out.z = zk;
  double best = pot;
  Index k = 1;
  for (; k <= T && !(target_potential > 0.0 && best <= target_potential); ++k) {
    GradStepOutcome step = grad_step(inst, zk, fg.grad, kUnbounded);
    if (obs && obs->on_unbounded_grad_step) {
      GradStepRecord r;
      r.x_prev = zk;
      r.x_next = step.x;
      r.grad = fg.grad;
      r.f_prev = fg.f;
      r.f_next = step.f;
      obs->on_unbounded_grad_step(r);
    }
    zk = std::move(step.x);
    fg = eval_f_grad(inst, zk);
    pot = potential(fg.grad, inst.c());
    if (pot < best) {
      best = pot;
      out.z = zk;
    }
    if (k % stride == 0 || k == T || (target_potential > 0.0 && pot <= target_potential))
      rec.record(t + k - 1, fg.f, pot, zk, N, "grad");
  }
  out.result.x = out.z;
  out.result.potential = best;
  out.result.f = eval_f(inst, out.z);
  out.result.N = N;
  out.result.iterations = t + k - 2;
  out.result.status = (target_potential <= 0.0 || best <= target_potential) ? Status::Converged
                                                                            : Status::IterationCapReached;
  return out;
}

}  // namespace matscale
