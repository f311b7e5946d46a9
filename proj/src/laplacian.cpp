#include "matscale/laplacian.hpp"

#include <cmath>

namespace matscale {

LaplacianMatrix LaplacianMatrix::from_edges(Index n, const std::vector<Eigen::Triplet<double>>& edges) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(edges.size() * 4);
  for (const auto& e : edges) {
    const Index i = e.row(), j = e.col();
    const double w = e.value();
    if (i == j || w == 0.0) continue;
    if (w < 0.0 || !std::isfinite(w)) throw Error(ErrorKind::InvalidInstance, "edge weight must be nonnegative");
    trips.emplace_back(i, j, -w);
    trips.emplace_back(j, i, -w);
    trips.emplace_back(i, i, w);
    trips.emplace_back(j, j, w);
  }
  LaplacianMatrix L(n);
  L.m_.setFromTriplets(trips.begin(), trips.end());
  L.m_.makeCompressed();
  return L;
}

LaplacianMatrix LaplacianMatrix::from_matrix(const ColSparse& m, double tol) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidInstance, "Laplacian must be square");
  const double scale = std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
  Vector rowsum = Vector::Zero(m.rows());
  for (Index k = 0; k < m.outerSize(); ++k)
    for (ColSparse::InnerIterator it(m, k); it; ++it) {
      if (it.row() != it.col() && it.value() > tol * scale)
        throw Error(ErrorKind::InvalidInstance, "Laplacian off-diagonal must be nonpositive");
      rowsum[it.row()] += it.value();
    }
  if (rowsum.cwiseAbs().maxCoeff() > tol * scale)
    throw Error(ErrorKind::InvalidInstance, "Laplacian rows must sum to zero");
  ColSparse t = m.transpose();
  if ((t - m).norm() > tol * scale * std::sqrt(static_cast<double>(m.rows())))
    throw Error(ErrorKind::InvalidInstance, "Laplacian must be symmetric");
  LaplacianMatrix L;
  L.m_ = m;
  L.m_.makeCompressed();
  return L;
}

LaplacianMatrix LaplacianMatrix::scaled(double s) const {
  LaplacianMatrix L;
  L.m_ = m_ * s;
  return L;
}

}  // namespace matscale
