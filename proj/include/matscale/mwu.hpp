#pragma once

#include <vector>

#include "matscale/core.hpp"

namespace matscale {

// Point of the floor simplex {w in [1/2, n]^n : sum w = n}.
class FloorSimplexWeights {
 public:
  static FloorSimplexWeights uniform(Index n);
  // Throws Error(InvalidInstance) when w is outside the set (sum tolerance 1e-10).
  static FloorSimplexWeights from_vector(Vector w);

  const Vector& values() const { return w_; }
  Index size() const { return w_.size(); }

 private:
  friend FloorSimplexWeights mwu_project(const FloorSimplexWeights& w, const Vector& loss, double eta);
  Vector w_;
};

// Exact Bregman (unnormalized KL) projection of w * exp(-eta * loss) onto the
// floor simplex.
FloorSimplexWeights mwu_project(const FloorSimplexWeights& w, const Vector& loss, double eta);

struct MwuRound {
  Vector w;
  Vector loss;
};

// Left side minus right side of the regret bound
//   sum_k <l_k, w_k - u> <= n log(2 n^2) / eta + 2 eta sum_k ||l_k||^2_{w_k}.
double mwu_regret_audit(const std::vector<MwuRound>& trace, double eta, const Vector& u);

// Streams the sums needed to audit the regret bound against every vertex
// u = n e_i without storing the trace.
class RegretAccumulator {
 public:
  RegretAccumulator() = default;
  explicit RegretAccumulator(Index n) : loss_sum_(Vector::Zero(n)) {}

  void add(const Vector& w, const Vector& loss);
  Index rounds() const { return rounds_; }
  // max over i of the audit value with u = n e_i.
  double worst_vertex_audit(double eta) const;
  double audit(double eta, const Vector& u) const;

 private:
  Index rounds_ = 0;
  double inner_ = 0.0;   // sum_k <l_k, w_k>
  double square_ = 0.0;  // sum_k ||l_k||^2_{w_k}
  Vector loss_sum_;
};

}  // namespace matscale
