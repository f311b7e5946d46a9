#pragma once

#include <initializer_list>
#include <random>
#include <vector>

#include "matscale/driver.hpp"

namespace testing_util {

using namespace matscale;

inline RowSparse sparse_of(std::initializer_list<std::initializer_list<double>> rows) {
  const Index d = static_cast<Index>(rows.size());
  const Index n = static_cast<Index>(rows.begin()->size());
  DenseMatrix m(d, n);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m.sparseView();
}

inline ScalingInstance instance(std::initializer_list<std::initializer_list<double>> rows, std::vector<long long> r,
                                std::vector<long long> c) {
  return ScalingInstance::create(sparse_of(rows), std::move(r), std::move(c));
}

// Random positive d x n instance with unit or balanced marginals.
inline ScalingInstance random_instance(Index d, Index n, std::uint64_t seed, double lo = 0.1, double hi = 1.0) {
  GenerateSpec g;
  g.kind = InstanceKind::UniformPositive;
  g.d = d;
  g.n = n;
  g.lo = lo;
  g.hi = hi;
  return generate(g, seed);
}

// Random sparse but scalable instance.
inline ScalingInstance sparse_instance(Index n, std::uint64_t seed, double density = 0.2) {
  GenerateSpec g;
  g.kind = InstanceKind::SparseScalable;
  g.d = g.n = n;
  g.density = density;
  return generate(g, seed);
}

inline Vector random_vector(Index n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline DenseMatrix dense(const ScalingInstance& inst) { return DenseMatrix(inst.A()); }

// Random Laplacian with positive edge weights on a random graph.
inline LaplacianMatrix random_laplacian(Index n, std::mt19937_64& rng, double density = 0.5) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::Triplet<double>> e;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (u(rng) < density) e.emplace_back(i, j, 0.05 + u(rng));
  return LaplacianMatrix::from_edges(n, e);
}

}  // namespace testing_util
