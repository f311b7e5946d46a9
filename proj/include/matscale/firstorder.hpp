#pragma once

#include "matscale/core.hpp"
#include "matscale/objective.hpp"
#include "matscale/options.hpp"
#include "matscale/problem.hpp"
#include "matscale/trace.hpp"

namespace matscale {

// ---------------------------------------------------------------- RAS

// Log-domain scaling state: scaled matrix is A_ij exp(y_i + x_j).
struct RasState {
  Vector x;  // columns
  Vector y;  // rows
};

RasState ras_init(const ScalingInstance& inst);
// One row normalization followed by one column normalization.
RasState ras_step(const ScalingInstance& inst, const RasState& state);
RowSparse ras_scaled_matrix(const ScalingInstance& inst, const RasState& state);

struct SolveResult {
  ScalePoint x;
  Status status = Status::IterationCapReached;
  Index iterations = 0;
  double potential = 0.0;
  double f = 0.0;
  double N = 0.0;  // final box radius for methods that grow it
  SolveTrace trace;
};

// Iterates RAS until the potential of the row-normalized iterate drops to the
// threshold or max_iters steps have run.
SolveResult ras(const ScalingInstance& inst, double threshold, Index max_iters,
                const SolverOptions& opts = {});

// ---------------------------------------------------------------- Scaling0

struct GradStepDeltas {
  Vector plus;   // maximizer of the lower bound over nonnegative steps
  Vector minus;  // maximizer over nonpositive steps
};

// Per-coordinate closed-form maximizers; N = kUnbounded drops the box.
GradStepDeltas grad_step_deltas(const Vector& grad, const Vector& c, const ScalePoint& x, double N);

struct GradStepOutcome {
  ScalePoint x;
  double f = 0.0;
};
GradStepOutcome grad_step(const ScalingInstance& inst, const ScalePoint& x, const Vector& grad, double N);
ScalePoint grad_step(const ScalingInstance& inst, const ScalePoint& x, double N);

ScalePoint mirror_step(const ScalePoint& z, const Vector& v, const Vector& c, double N);

// tau_k from tau_{k-1}: positive root of tau^2 / prev^2 + tau - 1 = 0.
double next_tau(double prev);

// Linear coupling started from y0; returns y_T.
ScalePoint lc(const ScalingInstance& inst, double N, Index T, const ScalePoint& y0, const SolverOptions& opts = {},
              TraceRecorder* rec = nullptr, Index t_offset = 0);

struct Scaling0Result {
  ScalePoint z1;  // output of the main coupling run
  ScalePoint z;   // iterate of least potential
  SolveResult result;
};

// target_potential > 0 stops the gradient tail once it is reached.
Scaling0Result scaling0(const ScalingInstance& inst, double N, Index T, const SolverOptions& opts = {},
                        double target_potential = 0.0);

}  // namespace matscale
