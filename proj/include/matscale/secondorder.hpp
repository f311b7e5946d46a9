#pragma once

#include "matscale/core.hpp"
#include "matscale/firstorder.hpp"
#include "matscale/laplacian.hpp"
#include "matscale/mwu.hpp"
#include "matscale/options.hpp"
#include "matscale/problem.hpp"

namespace matscale {

// Center of the step box {delta : ||delta - alpha||_inf <= 1/32} at x.
struct BoxShift {
  Vector alpha;
};
BoxShift box_shift(const ScalePoint& x, double N);

inline constexpr double kBoxRadius = 1.0 / 32.0;
inline constexpr double kStepDivisor = 6.6;

// <g, delta> + delta^T H delta / 6
double box_quadratic(const Vector& grad, const LaplacianMatrix& H, const Vector& delta);

// ceil(C_T (sqrt(n) K + K^2) ln n), at least 1.
Index mwu_basic_budget(Index n, double K, double C_T);

struct MwuBasicResult {
  Vector delta;
  Index rounds = 0;
  double eta = 0.0;
  double inf_bound = 0.0;  // 1/32 + 1/(8K)
  bool bound_met = false;  // the plain average met inf_bound
  double shrink = 1.0;     // factor applied to delta - alpha when it did not
  RegretAccumulator regret;
};

// Pulls delta toward alpha until ||delta - alpha||_inf <= bound; returns the factor.
// The floor-simplex MWU can settle where one coordinate's average stays just
// above the bound, so the average alone does not always meet it.
double shrink_to_box(Vector& delta, const Vector& alpha, double bound);

// Averages the l2-ball minimizers of the box quadratic over MWU-reweighted
// balls. With early exit on, stops at the first round whose running average
// meets the infinity bound; otherwise runs exactly T rounds.
MwuBasicResult mwu_basic(const Vector& grad, const LaplacianMatrix& H, const Vector& alpha, Index T, double K,
                         double eps, const SolverOptions& opts = {});

// Sparsified Hessian used by the second-order methods.
LaplacianMatrix step_hessian(const ScalingInstance& inst, const ScalePoint& x, const SolverOptions& opts,
                             std::uint64_t salt);

// K = ceil(C_K ln(1/eps)), at least 1.
double outer_k(double eps, const Constants& k);

SolveResult scaling1(const ScalingInstance& inst, double N, double eps, const SolverOptions& opts = {},
                     const ScalePoint* x0 = nullptr);

// Projected accelerated gradient (FISTA) on <g, delta> + delta^T H delta / 6 over
// the box around alpha, in coordinates scaled by sqrt(H_ii).
Vector agd_box_quadratic(const Vector& grad, const LaplacianMatrix& H, const Vector& alpha, Index T);

// target_potential > 0 stops once the potential reaches it; the outer loop
// also stops when no candidate step lowers f.
SolveResult scaling2(const ScalingInstance& inst, double N, Index T, const SolverOptions& opts = {},
                     double target_potential = 0.0);

}  // namespace matscale
