#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "matscale/core.hpp"

namespace matscale {

// Divides every row by its largest entry. Explicit zeros are dropped.
// Throws Error(EmptyRow) when a row has no positive entry.
std::pair<RowSparse, Vector> normalize_rows(const RowSparse& raw);

// Nonnegative d x n matrix with integral target marginals. Immutable once built;
// the stored matrix is row normalized (every row max is exactly 1).
class ScalingInstance {
 public:
  static ScalingInstance create(const RowSparse& raw, std::vector<long long> r,
                                std::vector<long long> c);

  const RowSparse& A() const { return a_; }
  const Vector& r() const { return r_; }
  const Vector& c() const { return c_; }
  const std::vector<long long>& r_int() const { return r_int_; }
  const std::vector<long long>& c_int() const { return c_int_; }
  long long h() const { return h_; }
  double nu() const { return nu_; }
  const Vector& row_scales() const { return row_scales_; }
  Index d() const { return a_.rows(); }
  Index n() const { return a_.cols(); }
  Index nnz() const { return a_.nonZeros(); }
  bool fully_positive() const { return a_.nonZeros() == d() * n(); }

 private:
  ScalingInstance() = default;

  RowSparse a_;
  Vector r_, c_;
  std::vector<long long> r_int_, c_int_;
  long long h_ = 0;
  double nu_ = 0.0;
  Vector row_scales_;
};

// Zero minor R x C of A (0-based indices).
struct ZeroMinor {
  std::vector<Index> rows;
  std::vector<Index> cols;
};

struct FeasibilityVerdict {
  enum class Status { AsymptoticallyScalable, NotScalable };
  Status status = Status::AsymptoticallyScalable;
  long long max_flow = 0;
  std::optional<ZeroMinor> certificate;

  bool scalable() const { return status == Status::AsymptoticallyScalable; }
};

FeasibilityVerdict check_asymptotic_scalability(const ScalingInstance& inst);

// True when R x C is an all-zero minor of A with sum_{i not in R} r_i < sum_{j in C} c_j.
bool certificate_valid(const ScalingInstance& inst, const ZeroMinor& minor);

enum class Regime { FullPositive, PolyBoundedScaling, General };

// Bound on the infinity norm of a (near) minimizer, clamped to at least 1.
double diameter_bound(const ScalingInstance& inst, double eps, Regime regime,
                      std::optional<double> poly_bound = std::nullopt, double c_diam = 1.0);

}  // namespace matscale
