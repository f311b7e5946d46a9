#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "matscale/core.hpp"
#include "matscale/lapsolve.hpp"
#include "matscale/laplacian.hpp"
#include "matscale/mwu.hpp"

namespace matscale {

// Constants standing in for the unspecified factors in the method bounds.
struct Constants {
  double C_diam = 1.0;  // diameter bound, general regime
  double C_warm = 8.0;  // warm-start linear coupling length, times N
  double C_T = 4.0;     // MWUbasic rounds
  double C_K = 3.0;     // K = ceil(C_K ln(1/eps))
  double C_S2 = 64.0;   // Scaling2 outer loop
  double C_T3 = 4.0;    // MWUfull rounds

  void validate() const;
};

enum class ThresholdMode { EpsSquared, Eps };

inline double stop_threshold(double eps, ThresholdMode mode) {
  return mode == ThresholdMode::EpsSquared ? eps * eps : eps;
}

// ---------------------------------------------------------------- hooks

struct LcIterationRecord {
  Index k = 0;
  double N = 0.0;
  double tau = 0.0;
  double alpha = 0.0;
  Vector x;  // coupling point
  Vector y_prev, y_next;
  Vector z_prev, z_next;
  double f_y_prev = 0.0, f_y_next = 0.0;
};

struct GradStepRecord {
  Vector x_prev, x_next;
  Vector grad;  // gradient at x_prev
  double f_prev = 0.0, f_next = 0.0;
};

struct MwuCallRecord {
  const Vector* grad = nullptr;
  const LaplacianMatrix* H = nullptr;
  const Vector* alpha = nullptr;
  Index T = 0;          // nominal round budget
  Index rounds = 0;     // rounds actually run
  double K = 0.0;
  double eps = 0.0;
  double eta = 0.0;
  double rho = 0.0;     // MWUfull only
  double inf_bound = 0.0;  // guaranteed bound on ||delta - alpha||_inf
  const Vector* delta = nullptr;
  const RegretAccumulator* regret = nullptr;
  bool accumulated_branch = false;  // MWUfull returned v / (K ||v_hat||_inf)
  Index truncated_rounds = 0;
  Index recursed_rounds = 0;
  const Vector* v_hat = nullptr;
};

struct SecondOrderStepRecord {
  const char* method = "";
  Vector x_prev;
  Vector step;  // x_next - x_prev
  double N = 0.0;
};

struct Observer {
  std::function<void(const LcIterationRecord&)> on_lc_iteration;
  std::function<void(const GradStepRecord&)> on_unbounded_grad_step;
  std::function<void(const MwuCallRecord&)> on_mwu_basic;
  std::function<void(const MwuCallRecord&)> on_mwu_full;
  std::function<void(const SecondOrderStepRecord&)> on_second_order_step;
};

// ---------------------------------------------------------------- options

struct SolverOptions {
  Constants constants;
  ThresholdMode threshold = ThresholdMode::EpsSquared;
  // Linear coupling clips the gradient at 1 instead of at c.
  bool literal_unit_clip = false;
  // Scaling3 hands instances with n < 900 to Scaling1.
  bool delegate_small_scaling3 = false;
  // MWU loops stop once the running output meets its infinity-norm guarantee,
  // and otherwise continue past T up to mwu_round_factor * T rounds.
  bool mwu_early_exit = true;
  double mwu_round_factor = 1.0;
  // Multiplies the outer iteration caps of Scaling1 (N K) and Scaling3 (10 N K).
  // A step moves x by at most 1/(32 * 6.6) per coordinate, so a bare N K cap
  // stops short whenever ||x*||_inf > N K / 211; the 2x2 upper triangular
  // instance at eps = 1e-6 already needs about 1.2 N K.
  double outer_cap_factor = 8.0;
  Index hessian_cap = 5000;
  SparsifyBackend sparsify_backend = SparsifyBackend::Passthrough;
  double sparsify_ratio = 1.1;
  std::uint64_t seed = 0;
  // Record wall time in traces (off gives byte-identical reruns).
  bool timing = true;
  // Keep every k-th iteration in traces (the last one is always kept).
  Index trace_stride = 1;
  const Observer* observer = nullptr;
};

}  // namespace matscale
