#include "matscale/objective.hpp"

#include <cmath>
#include <string>

namespace matscale {

namespace {

void check_point(const ScalingInstance& inst, const ScalePoint& x) {
  if (x.size() != inst.n()) throw Error(ErrorKind::InvalidInstance, "point has wrong length");
  if (!x.allFinite()) throw Error(ErrorKind::InvalidInstance, "point has non-finite entries");
}

// Returns the recentring offset and fills the cache for xc = x - offset.
double fill_cache(const ScalingInstance& inst, const ScalePoint& x, RowCache& rc) {
  check_point(inst, x);
  const RowSparse& A = inst.A();
  const double offset = x.mean();
  const Index d = inst.d();
  rc.m.resize(d);
  rc.Z.resize(d);
  rc.b.resize(A.nonZeros());
  const double* val = A.valuePtr();
  const auto* col = A.innerIndexPtr();
  const auto* outer = A.outerIndexPtr();
  for (Index i = 0; i < d; ++i) {
    double mi = -std::numeric_limits<double>::infinity();
    for (auto k = outer[i]; k < outer[i + 1]; ++k) mi = std::max(mi, x[col[k]] - offset);
    double z = 0.0;
    for (auto k = outer[i]; k < outer[i + 1]; ++k) {
      const double e = val[k] * std::exp(x[col[k]] - offset - mi);
      rc.b[k] = e;
      z += e;
    }
    for (auto k = outer[i]; k < outer[i + 1]; ++k) rc.b[k] /= z;
    rc.m[i] = mi;
    rc.Z[i] = z;
  }
  return offset;
}

double f_from_cache(const ScalingInstance& inst, const ScalePoint& x, double offset, const RowCache& rc) {
  double s = 0.0;
  for (Index i = 0; i < inst.d(); ++i) s += inst.r()[i] * (rc.m[i] + std::log(rc.Z[i]));
  return s - inst.c().dot((x.array() - offset).matrix());
}

Vector grad_from_cache(const ScalingInstance& inst, const RowCache& rc) {
  const RowSparse& A = inst.A();
  const auto* col = A.innerIndexPtr();
  const auto* outer = A.outerIndexPtr();
  Vector g = -inst.c();
  for (Index i = 0; i < inst.d(); ++i) {
    const double ri = inst.r()[i];
    for (auto k = outer[i]; k < outer[i + 1]; ++k) g[col[k]] += ri * rc.b[k];
  }
  return g;
}

RowSparse b_matrix(const ScalingInstance& inst, const RowCache& rc) {
  RowSparse B = inst.A();
  std::copy(rc.b.data(), rc.b.data() + rc.b.size(), B.valuePtr());
  return B;
}

}  // namespace

RowCache row_cache(const ScalingInstance& inst, const ScalePoint& x) {
  RowCache rc;
  fill_cache(inst, x, rc);
  return rc;
}

WorkCounters& work_counters() {
  thread_local WorkCounters counters;
  return counters;
}

double eval_f(const ScalingInstance& inst, const ScalePoint& x) {
  ++work_counters().f_evals;
  RowCache rc;
  const double off = fill_cache(inst, x, rc);
  return f_from_cache(inst, x, off, rc);
}

Vector eval_grad(const ScalingInstance& inst, const ScalePoint& x) {
  ++work_counters().grad_evals;
  RowCache rc;
  fill_cache(inst, x, rc);
  return grad_from_cache(inst, rc);
}

ValueAndGradient eval_f_grad(const ScalingInstance& inst, const ScalePoint& x) {
  ++work_counters().f_evals;
  ++work_counters().grad_evals;
  RowCache rc;
  const double off = fill_cache(inst, x, rc);
  return {f_from_cache(inst, x, off, rc), grad_from_cache(inst, rc)};
}

double potential(const Vector& grad, const Vector& c) { return inv_weighted_sq_norm(grad, c); }

double grad_potential(const ScalingInstance& inst, const ScalePoint& x) {
  return potential(eval_grad(inst, x), inst.c());
}

GradientSplit split_grad(const Vector& grad, const Vector& c) {
  GradientSplit s;
  s.grad_s = grad.cwiseMin(c);
  s.grad_l = grad - s.grad_s;
  for (Index j = 0; j < grad.size(); ++j) {
    if (grad[j] > c[j])
      s.lambda_l.push_back(j);
    else
      s.lambda_s.push_back(j);
  }
  return s;
}

LaplacianMatrix build_hessian(const ScalingInstance& inst, const ScalePoint& x, Index cap) {
  const Index n = inst.n();
  if (n > cap)
    throw Error(ErrorKind::MemoryBudget,
                "n = " + std::to_string(n) + " exceeds the Hessian cap " + std::to_string(cap));
  RowCache rc;
  fill_cache(inst, x, rc);
  const RowSparse B = b_matrix(inst, rc);
  const RowSparse RB = inst.r().asDiagonal() * B;
  ColSparse G = ColSparse(B.transpose()) * ColSparse(RB);
  // Off-diagonals -G_jk; diagonal is the negated off-diagonal row sum.
  std::vector<Eigen::Triplet<double>> edges;
  edges.reserve(static_cast<std::size_t>(G.nonZeros()));
  for (Index k = 0; k < G.outerSize(); ++k)
    for (ColSparse::InnerIterator it(G, k); it; ++it)
      if (it.row() < it.col() && it.value() > 0.0) edges.emplace_back(it.row(), it.col(), it.value());
  return LaplacianMatrix::from_edges(n, edges);
}

Vector hessian_apply(const ScalingInstance& inst, const ScalePoint& x, const Vector& v) {
  if (v.size() != inst.n()) throw Error(ErrorKind::InvalidInstance, "vector has wrong length");
  RowCache rc;
  fill_cache(inst, x, rc);
  const RowSparse& A = inst.A();
  const auto* col = A.innerIndexPtr();
  const auto* outer = A.outerIndexPtr();
  Vector out = Vector::Zero(inst.n());
  for (Index i = 0; i < inst.d(); ++i) {
    const double ri = inst.r()[i];
    double wi = 0.0;
    for (auto k = outer[i]; k < outer[i + 1]; ++k) wi += rc.b[k] * v[col[k]];
    for (auto k = outer[i]; k < outer[i + 1]; ++k) out[col[k]] += ri * rc.b[k] * (v[col[k]] - wi);
  }
  return out;
}

ScalingFactors extract_scaling(const ScalingInstance& inst, const ScalePoint& x) {
  RowCache rc;
  const double off = fill_cache(inst, x, rc);
  ScalingFactors out;
  out.Y = x.array().exp();
  out.X.resize(inst.d());
  // rc.m is relative to the recentred point, so add the offset back.
  for (Index i = 0; i < inst.d(); ++i) out.X[i] = inst.r()[i] * std::exp(-(rc.m[i] + off)) / rc.Z[i];

  const RowSparse& A = inst.A();
  Vector colsum = Vector::Zero(inst.n());
  for (Index i = 0; i < inst.d(); ++i) {
    double rs = 0.0;
    for (RowSparse::InnerIterator it(A, i); it; ++it) {
      const double s = out.X[i] * it.value() * out.Y[it.col()];
      rs += s;
      colsum[it.col()] += s;
    }
    out.report.row_err = std::max(out.report.row_err, std::abs(rs - inst.r()[i]));
  }
  out.report.col_potential = potential(colsum - inst.c(), inst.c());
  return out;
}

}  // namespace matscale
