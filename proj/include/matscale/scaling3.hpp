#pragma once

#include <optional>
#include <vector>

#include "matscale/core.hpp"
#include "matscale/firstorder.hpp"
#include "matscale/laplacian.hpp"
#include "matscale/options.hpp"
#include "matscale/problem.hpp"
#include "matscale/secondorder.hpp"

namespace matscale {

// Leading block of a vector sorted by |y| descending with a jump of at least 15
// after position s.
struct GapReport {
  Index s = 0;
  std::vector<Index> perm;  // perm[k] = original index of the k-th largest |y|
  Vector v_plus;            // 1 on the leading block where y > 0
  Vector v_minus;           // -1 on the leading block where y < 0
};

inline constexpr double kGapJump = 15.0;

// Smallest s in [1, min(rho, n)] with |y_(s)| - |y_(s+1)| >= 15, |y_(s+1)| <= rho/2
// and |y_(s)| >= rho/4 (1-based, y_(n+1) = 0).
std::optional<GapReport> gap_detect(const Vector& y, double rho);

bool cross_term_small(const Vector& grad, const LaplacianMatrix& H, const GapReport& report, double eps);

struct RestrictedProblem {
  Vector grad;
  LaplacianMatrix H;  // off-diagonal leading block with diagonals rebuilt
  Vector alpha;
};
RestrictedProblem restrict_problem(const Vector& grad, const LaplacianMatrix& H, const Vector& alpha,
                                   const GapReport& report);

enum class RoundKind { Plain, Recursed, Accumulated };
const char* to_string(RoundKind k);

struct FullRound {
  RoundKind kind = RoundKind::Plain;
  Vector delta;      // round output after any recursive replacement
  Vector direction;  // sign vector added to v in the accumulated case
  std::optional<GapReport> gap;
};

// Handles one round's solution y: gap detection, then either the recursive
// solve on the leading block or the choice of sign vector.
FullRound mwu_full_round(const Vector& grad, const LaplacianMatrix& H, const Vector& alpha, const Vector& y,
                         double rho, double eps, const SolverOptions& opts = {});

struct MwuFullResult {
  Vector delta;
  Index rounds = 0;
  double eta = 0.0;
  double inf_bound = 0.0;  // 1/32 + 2/K
  bool accumulated_branch = false;
  Index truncated_rounds = 0;  // |S|
  Index recursed_rounds = 0;
  double shrink = 1.0;  // see shrink_to_box
  Vector v;
  Vector v_hat;
  RegretAccumulator regret;
};

MwuFullResult mwu_full(const Vector& grad, const LaplacianMatrix& H, const Vector& alpha, Index T, double rho,
                       double K, double eps, const SolverOptions& opts = {});

// rho for dimension n: 10 n^(1/3) when that fits under 2 sqrt(n), otherwise
// max(60, ceil(2 sqrt(n))).
double scaling3_rho(Index n);
Index mwu_full_budget(Index n, double K, double rho, double C_T3);

struct Scaling3Stats {
  Index accumulated_steps = 0;  // outer steps that took the accumulated branch
  Index recursed_rounds = 0;
  Index truncated_rounds = 0;
  bool delegated = false;
};

SolveResult scaling3(const ScalingInstance& inst, double N, const ScalePoint& x0, double eps,
                     const SolverOptions& opts = {}, Scaling3Stats* stats = nullptr);

enum class Strategy { Warm0Then3, Warm2Then3, Pure1, Pure0 };
const char* to_string(Strategy s);

struct PipelineResult {
  SolveResult result;
  ScalePoint warm_start;
  double N = 0.0;  // diameter bound used
  Scaling3Stats stats;
  // s0 doubles T from ceil(C_warm N) up to cbrt(N^2 h / threshold) until the
  // threshold is met; result holds the last run only.
  Index s0_runs = 0;
  Index s0_total_iterations = 0;
};

// Checks feasibility first (throws Error(Infeasible)), picks N from the
// diameter bound unless n_bound is given, then runs the strategy.
PipelineResult pipeline(const ScalingInstance& inst, double eps, Strategy strategy, const SolverOptions& opts = {},
                        std::optional<double> n_bound = std::nullopt);

// Potential at which a point certifies f(x) - inf f <= N n^(1/3) for iterates
// within the diameter bound: sqrt(pot) * 2N sqrt(h) <= N n^(1/3).
double warm_start_potential(const ScalingInstance& inst);

}  // namespace matscale
