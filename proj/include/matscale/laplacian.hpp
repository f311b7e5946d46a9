#pragma once

#include <vector>

#include "matscale/core.hpp"

namespace matscale {

// Symmetric matrix with nonpositive off-diagonals and zero row sums.
class LaplacianMatrix {
 public:
  LaplacianMatrix() = default;
  explicit LaplacianMatrix(Index n) : m_(n, n) {}

  // Each triplet (i, j, w) with i != j and w >= 0 adds an edge of weight w.
  // Duplicate edges are summed; (i, j) and (j, i) denote the same edge.
  static LaplacianMatrix from_edges(Index n, const std::vector<Eigen::Triplet<double>>& edges);

  // Validates a full symmetric matrix against the Laplacian structure (tolerance
  // relative to the largest diagonal entry).
  static LaplacianMatrix from_matrix(const ColSparse& m, double tol = 1e-10);

  Index size() const { return m_.rows(); }
  const ColSparse& matrix() const { return m_; }
  DenseMatrix dense() const { return DenseMatrix(m_); }
  Vector diagonal() const { return m_.diagonal(); }

  Vector apply(const Vector& v) const { return m_ * v; }
  double quad(const Vector& v) const { return v.dot(m_ * v); }

  LaplacianMatrix scaled(double s) const;

 private:
  ColSparse m_;
};

}  // namespace matscale
