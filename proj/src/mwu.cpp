#include "matscale/mwu.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace matscale {

FloorSimplexWeights FloorSimplexWeights::uniform(Index n) {
  if (n <= 0) throw Error(ErrorKind::InvalidInstance, "weights need n >= 1");
  FloorSimplexWeights w;
  w.w_ = Vector::Ones(n);
  return w;
}

FloorSimplexWeights FloorSimplexWeights::from_vector(Vector w) {
  const double n = static_cast<double>(w.size());
  if (w.size() == 0 || w.minCoeff() < 0.5 || w.maxCoeff() > n || std::abs(w.sum() - n) > 1e-10)
    throw Error(ErrorKind::InvalidInstance, "weights are outside the floor simplex");
  FloorSimplexWeights out;
  out.w_ = std::move(w);
  return out;
}

FloorSimplexWeights mwu_project(const FloorSimplexWeights& w, const Vector& loss, double eta) {
  const Index n = w.size();
  if (loss.size() != n) throw Error(ErrorKind::InvalidInstance, "loss has wrong length");
  // Work with log y and a common shift so exp never overflows.
  Vector logy = w.values().array().log() - eta * loss.array();
  logy.array() -= logy.maxCoeff();
  const Vector y = logy.array().exp();

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return y[a] < y[b]; });

  // suffix[j] = sum of the n - j largest entries.
  std::vector<double> suffix(static_cast<std::size_t>(n) + 1, 0.0);
  for (Index j = n - 1; j >= 0; --j) suffix[j] = suffix[j + 1] + y[order[j]];

  const double dn = static_cast<double>(n);
  Index split = n - 1;
  double scale = 0.0;
  for (Index j = 0; j < n; ++j) {
    const double sc = (dn - 0.5 * static_cast<double>(j)) / suffix[j];
    const bool top_ok = y[order[j]] * sc >= 0.5;
    const bool below_ok = j == 0 || y[order[j - 1]] * sc < 0.5;
    if (top_ok && below_ok) {
      split = j;
      scale = sc;
      break;
    }
  }
  if (scale == 0.0) scale = (dn - 0.5 * static_cast<double>(split)) / suffix[split];

  Vector z(n);
  for (Index j = 0; j < n; ++j) z[order[j]] = j < split ? 0.5 : y[order[j]] * scale;
  FloorSimplexWeights out;
  out.w_ = std::move(z);
  return out;
}

double mwu_regret_audit(const std::vector<MwuRound>& trace, double eta, const Vector& u) {
  const double n = static_cast<double>(u.size());
  double lhs = 0.0, sq = 0.0;
  for (const auto& rd : trace) {
    lhs += rd.loss.dot(rd.w - u);
    sq += weighted_sq_norm(rd.loss, rd.w);
  }
  return lhs - (n * std::log(2.0 * n * n) / eta + 2.0 * eta * sq);
}

void RegretAccumulator::add(const Vector& w, const Vector& loss) {
  if (loss_sum_.size() == 0) loss_sum_ = Vector::Zero(loss.size());
  ++rounds_;
  inner_ += loss.dot(w);
  square_ += weighted_sq_norm(loss, w);
  loss_sum_ += loss;
}

double RegretAccumulator::audit(double eta, const Vector& u) const {
  const double n = static_cast<double>(u.size());
  const double lhs = inner_ - (loss_sum_.size() ? loss_sum_.dot(u) : 0.0);
  return lhs - (n * std::log(2.0 * n * n) / eta + 2.0 * eta * square_);
}

double RegretAccumulator::worst_vertex_audit(double eta) const {
  const Index n = loss_sum_.size();
  if (n == 0) return -std::numeric_limits<double>::infinity();
  const double dn = static_cast<double>(n);
  const double lhs = inner_ - dn * loss_sum_.minCoeff();
  return lhs - (dn * std::log(2.0 * dn * dn) / eta + 2.0 * eta * square_);
}

}  // namespace matscale
