#pragma once

#include <cstdint>
#include <optional>

#include "matscale/core.hpp"
#include "matscale/laplacian.hpp"

namespace matscale {

enum class SparsifyBackend { Passthrough, Sampling };

// Returns H with H <= L <= ratio * H. Passthrough gives H = L / ratio.
// Sampling draws edges by effective resistance and certifies the result with a
// dense generalized eigenvalue check (small n only); it falls back to
// passthrough when the sample does not certify.
LaplacianMatrix sparsify(const LaplacianMatrix& L, double ratio = 1.1,
                         SparsifyBackend backend = SparsifyBackend::Passthrough,
                         std::uint64_t seed = 0);

// Symmetric positive semidefinite operator, stored dense when that is cheaper.
class QuadraticForm {
 public:
  explicit QuadraticForm(const ColSparse& m);
  explicit QuadraticForm(const DenseMatrix& m);

  Index size() const { return n_; }
  void apply(const Vector& x, Vector& y) const;
  Vector apply(const Vector& x) const {
    Vector y(n_);
    apply(x, y);
    return y;
  }
  double quad(const Vector& x) const { return x.dot(apply(x)); }
  const Vector& diagonal() const { return diag_; }
  // Row sums of |off-diagonal| entries.
  const Vector& offdiag_abs() const { return offabs_; }
  bool annihilates_constants() const { return zero_rowsum_; }

 private:
  void init_stats();

  Index n_ = 0;
  bool dense_ = false;
  ColSparse sparse_;
  DenseMatrix dense_m_;
  Vector diag_, offabs_;
  bool zero_rowsum_ = false;
};

// Operator scale * (Q + t I + s diag(w)).
struct ShiftedOperator {
  const QuadraticForm* q = nullptr;
  double t = 0.0;
  double s = 0.0;
  const Vector* w = nullptr;
  double scale = 1.0;
};

struct SddStats {
  Index iterations = 0;
};

// Approximately minimizes v^T z + z^T M z / 2, i.e. solves M z = -v, returning z
// with ||z - z*||_M^2 <= eps_rel ||z*||_M^2 (conjugate gradient, Jacobi
// preconditioner, error estimated from the CG energy decrease). Throws
// Error(NotConverged) when the iteration budget runs out.
Vector sdd_solve(const ShiftedOperator& M, const Vector& v, double eps_rel,
                 const Vector* guess = nullptr, SddStats* stats = nullptr);
Vector sdd_solve(const ColSparse& M, const Vector& v, double eps_rel);

struct ConstrainedQuadSolution {
  Vector delta;
  bool in_ball = false;     // unconstrained minimizer was interior
  double lagrange_s = 0.0;  // final multiplier
  double objective = 0.0;   // <v, delta> + delta^T Hq delta
};

// State carried between consecutive calls that share Hq and v (MWU rounds).
struct L2WarmStart {
  double s = -1.0;
  Vector shifted;  // last delta - alpha
};

// Minimizes <v, delta> + delta^T Hq delta over ||delta - alpha||_w^2 <= n / c_cap
// within additive eps. The returned delta always satisfies the constraint.
ConstrainedQuadSolution l2_constrained_min(const Vector& v, const QuadraticForm& Hq, const Vector& alpha,
                                           const Vector& w, double c_cap, double eps,
                                           L2WarmStart* warm = nullptr);
ConstrainedQuadSolution l2_constrained_min(const Vector& v, const ColSparse& Hq, const Vector& alpha,
                                           const Vector& w, double c_cap, double eps);

}  // namespace matscale
