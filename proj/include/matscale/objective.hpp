#pragma once

#include <vector>

#include "matscale/core.hpp"
#include "matscale/laplacian.hpp"
#include "matscale/problem.hpp"

namespace matscale {

// Per-row stabilized softmax of x over the support of A. The values b are
// stored parallel to the nonzeros of inst.A() (row-major order).
struct RowCache {
  Vector m;  // per-row shift
  Vector Z;  // per-row normalizer after the shift
  Vector b;  // row-stochastic scaled entries
};

// x is recentred by its mean before evaluation; f and the gradient do not
// depend on that shift since sum(r) = sum(c).
RowCache row_cache(const ScalingInstance& inst, const ScalePoint& x);

double eval_f(const ScalingInstance& inst, const ScalePoint& x);
Vector eval_grad(const ScalingInstance& inst, const ScalePoint& x);

struct ValueAndGradient {
  double f = 0.0;
  Vector grad;
};
ValueAndGradient eval_f_grad(const ScalingInstance& inst, const ScalePoint& x);

// sum_j grad_j^2 / c_j
double potential(const Vector& grad, const Vector& c);
double grad_potential(const ScalingInstance& inst, const ScalePoint& x);

struct GradientSplit {
  Vector grad_s;  // min(c, grad)
  Vector grad_l;  // grad - grad_s, nonnegative
  std::vector<Index> lambda_s;
  std::vector<Index> lambda_l;
};
GradientSplit split_grad(const Vector& grad, const Vector& c);

inline constexpr Index kDefaultHessianCap = 5000;

// Hessian of f as a Laplacian. Throws Error(MemoryBudget) when n > cap.
LaplacianMatrix build_hessian(const ScalingInstance& inst, const ScalePoint& x,
                              Index cap = kDefaultHessianCap);

Vector hessian_apply(const ScalingInstance& inst, const ScalePoint& x, const Vector& v);

struct ApproxReport {
  double row_err = 0.0;
  double col_potential = 0.0;
};

struct ScalingFactors {
  Vector X;  // row scaling, length d
  Vector Y;  // column scaling, length n
  ApproxReport report;
};
ScalingFactors extract_scaling(const ScalingInstance& inst, const ScalePoint& x);

}  // namespace matscale
