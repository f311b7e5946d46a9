#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <limits>
#include <stdexcept>
#include <string>

namespace matscale {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using RowSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using ColSparse = Eigen::SparseMatrix<double, Eigen::ColMajor>;

// Log-domain column scaling; the row scaling is implied by it.
using ScalePoint = Vector;

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

enum class ErrorKind {
  InvalidInstance,
  EmptyRow,
  MemoryBudget,
  NotConverged,
  Infeasible,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Per-thread tallies of the expensive kernels, read by the benchmark harness.
struct WorkCounters {
  long long f_evals = 0;
  long long grad_evals = 0;
  long long matvecs = 0;
};
WorkCounters& work_counters();

// Weighted squared norm sum_i w_i v_i^2.
inline double weighted_sq_norm(const Vector& v, const Vector& w) {
  return (v.array().square() * w.array()).sum();
}

// sum_j v_j^2 / c_j
inline double inv_weighted_sq_norm(const Vector& v, const Vector& c) {
  return (v.array().square() / c.array()).sum();
}

}  // namespace matscale
