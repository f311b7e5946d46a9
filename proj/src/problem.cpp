#include "matscale/problem.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

namespace matscale {

std::pair<RowSparse, Vector> normalize_rows(const RowSparse& raw) {
  const Index d = raw.rows();
  Vector scales = Vector::Zero(d);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(raw.nonZeros()));
  for (Index i = 0; i < d; ++i) {
    double mx = 0.0;
    for (RowSparse::InnerIterator it(raw, i); it; ++it) {
      const double a = it.value();
      if (!std::isfinite(a) || a < 0.0)
        throw Error(ErrorKind::InvalidInstance,
                    "entry (" + std::to_string(i) + "," + std::to_string(it.col()) +
                        ") is negative or not finite");
      mx = std::max(mx, a);
    }
    if (mx <= 0.0) throw Error(ErrorKind::EmptyRow, "row " + std::to_string(i) + " has no positive entry");
    scales[i] = mx;
    for (RowSparse::InnerIterator it(raw, i); it; ++it) {
      if (it.value() > 0.0) trips.emplace_back(i, it.col(), it.value() / mx);
    }
  }
  RowSparse out(d, raw.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return {std::move(out), std::move(scales)};
}

ScalingInstance ScalingInstance::create(const RowSparse& raw, std::vector<long long> r,
                                        std::vector<long long> c) {
  if (static_cast<Index>(r.size()) != raw.rows() || static_cast<Index>(c.size()) != raw.cols())
    throw Error(ErrorKind::InvalidInstance, "marginal lengths do not match the matrix shape");
  if (raw.rows() == 0 || raw.cols() == 0) throw Error(ErrorKind::InvalidInstance, "empty matrix");
  for (long long v : r)
    if (v <= 0) throw Error(ErrorKind::InvalidInstance, "row targets must be positive integers");
  for (long long v : c)
    if (v <= 0) throw Error(ErrorKind::InvalidInstance, "column targets must be positive integers");
  const long long hr = std::accumulate(r.begin(), r.end(), 0LL);
  const long long hc = std::accumulate(c.begin(), c.end(), 0LL);
  if (hr != hc)
    throw Error(ErrorKind::InvalidInstance,
                "sum(r) = " + std::to_string(hr) + " differs from sum(c) = " + std::to_string(hc));

  ScalingInstance inst;
  auto [a, scales] = normalize_rows(raw);
  inst.a_ = std::move(a);
  inst.row_scales_ = std::move(scales);
  inst.r_int_ = std::move(r);
  inst.c_int_ = std::move(c);
  inst.r_ = Eigen::Map<const Eigen::Matrix<long long, Eigen::Dynamic, 1>>(
                inst.r_int_.data(), static_cast<Index>(inst.r_int_.size()))
                .cast<double>();
  inst.c_ = Eigen::Map<const Eigen::Matrix<long long, Eigen::Dynamic, 1>>(
                inst.c_int_.data(), static_cast<Index>(inst.c_int_.size()))
                .cast<double>();
  inst.h_ = hr;
  const double* vals = inst.a_.valuePtr();
  inst.nu_ = *std::min_element(vals, vals + inst.a_.nonZeros());
  return inst;
}

namespace {

// Dinic max-flow on integer capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes) : head_(nodes, -1), level_(nodes), it_(nodes) {}

  void add_edge(int u, int v, long long cap) {
    edges_.push_back({v, head_[u], cap});
    head_[u] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({u, head_[v], 0});
    head_[v] = static_cast<int>(edges_.size()) - 1;
  }

  long long run(int s, int t) {
    long long flow = 0;
    while (bfs(s, t)) {
      it_ = head_;
      while (long long f = dfs(s, t, std::numeric_limits<long long>::max())) flow += f;
    }
    return flow;
  }

  // Nodes reachable from s in the residual graph (valid after run()).
  std::vector<char> reachable(int s) const {
    std::vector<char> seen(head_.size(), 0);
    std::deque<int> q{s};
    seen[s] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int e = head_[u]; e != -1; e = edges_[e].next) {
        if (edges_[e].cap > 0 && !seen[edges_[e].to]) {
          seen[edges_[e].to] = 1;
          q.push_back(edges_[e].to);
        }
      }
    }
    return seen;
  }

 private:
  struct Edge {
    int to;
    int next;
    long long cap;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::deque<int> q{s};
    level_[s] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int e = head_[u]; e != -1; e = edges_[e].next) {
        if (edges_[e].cap > 0 && level_[edges_[e].to] < 0) {
          level_[edges_[e].to] = level_[u] + 1;
          q.push_back(edges_[e].to);
        }
      }
    }
    return level_[t] >= 0;
  }

  long long dfs(int u, int t, long long pushed) {
    if (u == t) return pushed;
    for (int& e = it_[u]; e != -1; e = edges_[e].next) {
      Edge& ed = edges_[e];
      if (ed.cap > 0 && level_[ed.to] == level_[u] + 1) {
        long long f = dfs(ed.to, t, std::min(pushed, ed.cap));
        if (f > 0) {
          ed.cap -= f;
          edges_[e ^ 1].cap += f;
          return f;
        }
      }
    }
    return 0;
  }

  std::vector<Edge> edges_;
  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> it_;
};

}  // namespace

FeasibilityVerdict check_asymptotic_scalability(const ScalingInstance& inst) {
  const int d = static_cast<int>(inst.d());
  const int n = static_cast<int>(inst.n());
  const int source = 0;
  const int sink = d + n + 1;
  MaxFlow mf(d + n + 2);
  for (int i = 0; i < d; ++i) mf.add_edge(source, 1 + i, inst.r_int()[i]);
  for (int i = 0; i < d; ++i)
    for (RowSparse::InnerIterator it(inst.A(), i); it; ++it)
      mf.add_edge(1 + i, 1 + d + static_cast<int>(it.col()), inst.h());
  for (int j = 0; j < n; ++j) mf.add_edge(1 + d + j, sink, inst.c_int()[j]);

  FeasibilityVerdict verdict;
  verdict.max_flow = mf.run(source, sink);
  if (verdict.max_flow == inst.h()) return verdict;

  verdict.status = FeasibilityVerdict::Status::NotScalable;
  const auto seen = mf.reachable(source);
  ZeroMinor minor;
  for (int i = 0; i < d; ++i)
    if (seen[1 + i]) minor.rows.push_back(i);
  for (int j = 0; j < n; ++j)
    if (!seen[1 + d + j]) minor.cols.push_back(j);
  verdict.certificate = std::move(minor);
  return verdict;
}

bool certificate_valid(const ScalingInstance& inst, const ZeroMinor& minor) {
  std::vector<char> in_r(inst.d(), 0), in_c(inst.n(), 0);
  for (Index i : minor.rows) in_r[i] = 1;
  for (Index j : minor.cols) in_c[j] = 1;
  for (Index i : minor.rows)
    for (RowSparse::InnerIterator it(inst.A(), i); it; ++it)
      if (in_c[it.col()]) return false;
  long long outside_rows = 0, inside_cols = 0;
  for (Index i = 0; i < inst.d(); ++i)
    if (!in_r[i]) outside_rows += inst.r_int()[i];
  for (Index j : minor.cols) inside_cols += inst.c_int()[j];
  return outside_rows < inside_cols;
}

double diameter_bound(const ScalingInstance& inst, double eps, Regime regime,
                      std::optional<double> poly_bound, double c_diam) {
  const double n = static_cast<double>(inst.n());
  const double h = static_cast<double>(inst.h());
  double N = 0.0;
  switch (regime) {
    case Regime::FullPositive:
      N = std::log(h * n / inst.nu());
      break;
    case Regime::PolyBoundedScaling:
      N = poly_bound ? *poly_bound : std::log(h * n / inst.nu());
      break;
    case Regime::General:
      if (!(eps > 0.0)) throw Error(ErrorKind::InvalidInstance, "eps must be positive");
      N = c_diam * n * std::log(n * h / (inst.nu() * eps));
      break;
  }
  return std::max(N, 1.0);
}

}  // namespace matscale
