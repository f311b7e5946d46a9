#include "matscale/lapsolve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <string>

namespace matscale {

// ---------------------------------------------------------------- sparsify

namespace {

// Generalized eigenvalue range of (H, L) on the range of L. Returns false if H
// loses rank there.
bool relative_spectrum(const DenseMatrix& L, const DenseMatrix& H, double& lo, double& hi) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(L);
  const Vector& lam = es.eigenvalues();
  const double tol = 1e-10 * std::max(1.0, lam.cwiseAbs().maxCoeff());
  std::vector<Index> keep;
  for (Index i = 0; i < lam.size(); ++i)
    if (lam[i] > tol) keep.push_back(i);
  if (keep.empty()) {
    lo = hi = 1.0;
    return H.cwiseAbs().maxCoeff() <= tol;
  }
  DenseMatrix P(L.rows(), static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k)
    P.col(static_cast<Index>(k)) = es.eigenvectors().col(keep[k]) / std::sqrt(lam[keep[k]]);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> rs(P.transpose() * H * P);
  lo = rs.eigenvalues().minCoeff();
  hi = rs.eigenvalues().maxCoeff();
  return lo > 1e-12;
}

LaplacianMatrix sample_sparsifier(const LaplacianMatrix& L, double ratio, std::uint64_t seed) {
  const Index n = L.size();
  const DenseMatrix Ld = L.dense();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(Ld);
  const Vector& lam = es.eigenvalues();
  const double tol = 1e-10 * std::max(1.0, lam.cwiseAbs().maxCoeff());
  Vector inv = lam.unaryExpr([tol](double v) { return v > tol ? 1.0 / v : 0.0; });
  const DenseMatrix pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();

  std::vector<Eigen::Triplet<double>> edges;
  std::vector<double> prob;
  const ColSparse& m = L.matrix();
  for (Index k = 0; k < m.outerSize(); ++k)
    for (ColSparse::InnerIterator it(m, k); it; ++it)
      if (it.row() < it.col() && it.value() < 0.0) {
        const Index i = it.row(), j = it.col();
        const double reff = pinv(i, i) + pinv(j, j) - 2.0 * pinv(i, j);
        edges.emplace_back(i, j, -it.value());
        prob.push_back(std::max(reff, 0.0) * -it.value());
      }
  if (edges.empty()) return L;

  const double eps = ratio - 1.0;
  std::mt19937_64 rng(seed);
  std::size_t q = static_cast<std::size_t>(std::ceil(4.0 * n * std::log(std::max<Index>(n, 2)) / (eps * eps)));
  for (int attempt = 0; attempt < 4; ++attempt, q *= 2) {
    std::discrete_distribution<std::size_t> pick(prob.begin(), prob.end());
    const double total = std::accumulate(prob.begin(), prob.end(), 0.0);
    std::vector<double> weight(edges.size(), 0.0);
    for (std::size_t s = 0; s < q; ++s) {
      const std::size_t e = pick(rng);
      weight[e] += edges[e].value() * total / (static_cast<double>(q) * prob[e]);
    }
    std::vector<Eigen::Triplet<double>> kept;
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (weight[e] > 0.0) kept.emplace_back(edges[e].row(), edges[e].col(), weight[e]);
    LaplacianMatrix H = LaplacianMatrix::from_edges(n, kept);
    double lo = 0.0, hi = 0.0;
    if (!relative_spectrum(Ld, H.dense(), lo, hi)) continue;
    // Rescale so the largest relative eigenvalue is 1, then H <= L <= (hi/lo) H.
    if (hi / lo <= ratio) return H.scaled(1.0 / hi);
  }
  return L.scaled(1.0 / ratio);
}

}  // namespace

LaplacianMatrix sparsify(const LaplacianMatrix& L, double ratio, SparsifyBackend backend, std::uint64_t seed) {
  if (!(ratio >= 1.0)) throw Error(ErrorKind::InvalidInstance, "sparsify ratio must be at least 1");
  if (backend == SparsifyBackend::Sampling && ratio > 1.0 && L.size() <= 400)
    return sample_sparsifier(L, ratio, seed);
  return L.scaled(1.0 / ratio);
}

// ---------------------------------------------------------------- operators

QuadraticForm::QuadraticForm(const ColSparse& m) : n_(m.rows()) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidInstance, "quadratic form must be square");
  // Dense storage pays off once the matrix is a sizeable fraction full.
  dense_ = n_ <= 1024 && m.nonZeros() * 4 >= n_ * n_;
  if (dense_)
    dense_m_ = DenseMatrix(m);
  else
    sparse_ = m;
  init_stats();
}

QuadraticForm::QuadraticForm(const DenseMatrix& m) : n_(m.rows()), dense_(true), dense_m_(m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidInstance, "quadratic form must be square");
  init_stats();
}

void QuadraticForm::init_stats() {
  diag_.resize(n_);
  offabs_ = Vector::Zero(n_);
  Vector rowsum = Vector::Zero(n_);
  if (dense_) {
    diag_ = dense_m_.diagonal();
    offabs_ = dense_m_.cwiseAbs().rowwise().sum() - diag_.cwiseAbs();
    rowsum = dense_m_.rowwise().sum();
  } else {
    diag_ = sparse_.diagonal();
    for (Index k = 0; k < sparse_.outerSize(); ++k)
      for (ColSparse::InnerIterator it(sparse_, k); it; ++it) {
        if (it.row() != it.col()) offabs_[it.row()] += std::abs(it.value());
        rowsum[it.row()] += it.value();
      }
  }
  const double scale = diag_.size() ? diag_.cwiseAbs().maxCoeff() : 0.0;
  zero_rowsum_ = n_ > 0 && rowsum.cwiseAbs().maxCoeff() <= 1e-12 * std::max(scale, 1e-300);
}

void QuadraticForm::apply(const Vector& x, Vector& y) const {
  ++work_counters().matvecs;
  if (dense_)
    y.noalias() = dense_m_ * x;
  else
    y.noalias() = sparse_ * x;
}

// ---------------------------------------------------------------- CG

namespace {

constexpr int kEnergyDelay = 4;

}  // namespace

Vector sdd_solve(const ShiftedOperator& M, const Vector& v, double eps_rel, const Vector* guess,
                 SddStats* stats) {
  const QuadraticForm& q = *M.q;
  const Index n = q.size();
  if (v.size() != n) throw Error(ErrorKind::InvalidInstance, "right-hand side has wrong length");
  const bool has_w = M.w != nullptr && M.s != 0.0;

  Vector diag = q.diagonal().array() + M.t;
  if (has_w) diag += M.s * *M.w;
  diag *= M.scale;
  Vector gersh_lo = diag - M.scale * q.offdiag_abs();
  Vector gersh_hi = diag + M.scale * q.offdiag_abs();

  Vector rhs = -v;
  const bool singular = q.annihilates_constants() && M.t == 0.0 && !has_w;
  if (singular) rhs.array() -= rhs.mean();
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return Vector::Zero(n);

  const double floor = gersh_lo.minCoeff();
  const double top = gersh_hi.maxCoeff();
  Index max_iters = 10 * n;
  if (floor > 0.0) {
    const double kappa = top / floor;
    max_iters = std::min<Index>(max_iters, static_cast<Index>(std::ceil(20.0 * std::sqrt(kappa))));
  }
  max_iters = std::max<Index>(max_iters, std::min<Index>(n, 5) + kEnergyDelay);

  auto apply = [&](const Vector& x, Vector& y) {
    q.apply(x, y);
    y += M.t * x;
    if (has_w) y.array() += M.s * M.w->array() * x.array();
    y *= M.scale;
  };
  const Vector pinv = diag.unaryExpr([](double d) { return d > 0.0 ? 1.0 / d : 1.0; });

  Vector z = (guess != nullptr && guess->size() == n) ? *guess : Vector::Zero(n);
  Vector Az(n), r(n), y(n), p(n), Ap(n);
  if (z.squaredNorm() > 0.0) {
    apply(z, Az);
    r = rhs - Az;
  } else {
    r = rhs;
  }
  if (singular) r.array() -= r.mean();
  y = pinv.cwiseProduct(r);
  p = y;
  double ry = r.dot(y);
  std::array<double, kEnergyDelay> gam{};
  Index k = 0;
  bool converged = false;
  for (; k < max_iters; ++k) {
    if (r.norm() <= 1e-15 * rhs_norm) {
      converged = true;
      break;
    }
    apply(p, Ap);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) {
      converged = r.norm() <= 1e-10 * rhs_norm;
      break;
    }
    const double a = ry / pAp;
    z += a * p;
    r -= a * Ap;
    if (singular) r.array() -= r.mean();
    gam[k % kEnergyDelay] = a * ry;
    if (k + 1 >= kEnergyDelay) {
      double est = 0.0;
      for (double g : gam) est += g;
      if (est <= eps_rel * std::abs(z.dot(rhs))) {
        converged = true;
        ++k;
        break;
      }
    }
    y = pinv.cwiseProduct(r);
    const double ry_new = r.dot(y);
    p = y + (ry_new / ry) * p;
    ry = ry_new;
  }
  if (stats) stats->iterations += k;
  if (!converged)
    throw Error(ErrorKind::NotConverged, "conjugate gradient stopped after " + std::to_string(k) + " iterations");
  if (singular) z.array() -= z.mean();
  return z;
}

Vector sdd_solve(const ColSparse& M, const Vector& v, double eps_rel) {
  QuadraticForm q(M);
  ShiftedOperator op;
  op.q = &q;
  return sdd_solve(op, v, eps_rel);
}

// ---------------------------------------------------------------- l2 ball

namespace {

// Inner CG tolerances, tightest first; later entries are retries.
constexpr std::array<double, 3> kInnerRel{1e-14, 1e-10, 1e-6};

struct BallPoint {
  double s = 0.0;
  Vector shifted;
  double phi = 0.0;
  double err = 0.0;  // CG energy error bound
  bool bound_only = false;  // phi is a lower bound, no solve was done
};

}  // namespace

ConstrainedQuadSolution l2_constrained_min(const Vector& v, const QuadraticForm& Hq, const Vector& alpha,
                                           const Vector& w, double c_cap, double eps, L2WarmStart* warm) {
  const Index n = v.size();
  if (alpha.size() != n || w.size() != n || Hq.size() != n)
    throw Error(ErrorKind::InvalidInstance, "l2_constrained_min: size mismatch");
  const double R2 = static_cast<double>(n) / c_cap;
  const double t = eps > 0.0 ? eps / (8.0 * n) : 0.0;
  const bool alpha_zero = alpha.isZero(0.0);
  const Vector vp = alpha_zero ? v : Vector(v + 2.0 * Hq.apply(alpha));
  const double vp_norm = vp.norm();

  auto objective = [&](const Vector& delta) { return v.dot(delta) + Hq.quad(delta); };
  auto finish = [&](Vector shifted, bool in_ball, double s) {
    ConstrainedQuadSolution sol;
    // Guard against the sum alpha + shifted rounding outside the ball.
    for (int guard = 0; guard < 64; ++guard) {
      sol.delta = alpha + shifted;
      if (weighted_sq_norm(sol.delta - alpha, w) <= R2) break;
      shifted *= 1.0 - 4e-16 * (guard + 1);
    }
    sol.in_ball = in_ball;
    sol.lagrange_s = s;
    sol.objective = objective(sol.delta);
    const double fallback = alpha_zero ? 0.0 : objective(alpha);
    if (fallback < sol.objective) {
      sol.delta = alpha;
      sol.objective = fallback;
      shifted.setZero();
    }
    if (warm) {
      warm->s = s;
      warm->shifted = std::move(shifted);
    }
    return sol;
  };

  if (vp_norm == 0.0) return finish(Vector::Zero(n), true, 0.0);

  ShiftedOperator op;
  op.q = &Hq;
  op.t = t;
  op.w = &w;
  op.scale = 2.0;
  const Vector* guess = (warm && warm->shifted.size() == n) ? &warm->shifted : nullptr;

  // The energy error is at most rel |z^T v'| <= rel |v'| sqrt(2 R2).
  const double rel_floor = std::clamp(eps / (16.0 * vp_norm * std::sqrt(2.0 * R2)), kInnerRel[0], 1e-8);
  double rel = rel_floor;
  auto eval = [&](double s, const Vector* g) {
    BallPoint p;
    p.s = s;
    op.s = s;
    p.shifted = sdd_solve(op, vp, rel, g);
    p.phi = weighted_sq_norm(p.shifted, w);
    p.err = rel * std::abs(vp.dot(p.shifted));
    return p;
  };
  // A feasible point costs at most s (R2 - phi) + err over the optimum (Lagrangian
  // duality). Between the brackets, take the boundary point of the segment.
  auto blend = [&](const BallPoint& lo, const BallPoint& hi, double& gap) {
    if (lo.bound_only) {
      gap = kUnbounded;
      return 0.0;
    }
    const Vector d = lo.shifted - hi.shifted;
    const double a = weighted_sq_norm(d, w);
    const double b = (w.array() * hi.shifted.array() * d.array()).sum();
    const double c0 = hi.phi - R2;
    double th = a > 0.0 ? (-b + std::sqrt(std::max(0.0, b * b - a * c0))) / a : 0.0;
    th = std::clamp(th, 0.0, 1.0);
    gap = th * (lo.s * (R2 - lo.phi) + lo.err) + (1.0 - th) * (hi.s * (R2 - hi.phi) + hi.err);
    return th;
  };

  for (double tol : kInnerRel) try {
    rel = std::max(tol, rel_floor);
    std::optional<BallPoint> lo, hi;
    if (warm && warm->s > 0.0) {
      BallPoint p = eval(warm->s, guess);
      // The multiplier moves little between rounds; bracket it locally.
      const bool above = p.phi > R2;
      BallPoint q = eval(above ? p.s * 1.02 : p.s / 1.02, &p.shifted);
      if ((q.phi > R2) != above) {
        if (above) {
          lo = std::move(p);
          hi = std::move(q);
        } else {
          lo = std::move(q);
          hi = std::move(p);
        }
      } else if (above) {
        lo = std::move(q);
      } else {
        hi = std::move(q);
      }
    }
    if (!lo) {
      // |z_0| >= |v'| / (2 (lambda_max + t)); when that already leaves the ball the
      // nearly singular s = 0 solve is skipped.
      const double lam = (Hq.diagonal() + Hq.offdiag_abs()).maxCoeff() + t;
      const double phi_lb = w.minCoeff() * vp_norm * vp_norm / (4.0 * lam * lam);
      if (phi_lb > R2) {
        lo = BallPoint{0.0, Vector(), phi_lb, 0.0, true};
      }
    }
    if (!lo) {
      BallPoint p0 = eval(0.0, hi ? &hi->shifted : guess);
      if (p0.phi <= R2) {
        const double lambda = std::min(0.5, eps * eps / (4.0 * n * vp_norm * vp_norm));
        return finish((1.0 - lambda) * p0.shifted, true, 0.0);
      }
      lo = std::move(p0);
    }

    const double s_hi = 4.0 * c_cap * vp_norm;
    if (!hi) {
      // Root lies below ||v'||_{W^-1} / (2 sqrt(R2)) because Hq + tI is PSD.
      const double winv = std::sqrt((vp.array().square() / w.array()).sum());
      double b = std::min(s_hi, winv / (2.0 * std::sqrt(R2)));
      if (b <= lo->s) b = 2.0 * lo->s + 1e-300;
      BallPoint p = eval(b, &lo->shifted);
      for (int grow = 0; p.phi > R2 && grow < 60; ++grow) p = eval(b *= 2.0, &p.shifted);
      if (p.phi > R2) return finish(Vector::Zero(n), false, 0.0);
      hi = std::move(p);
    }

    const double window_lo = R2 * (1.0 - eps / (4.0 * std::max(s_hi, 1e-300) * n));
    const double inv_r = 1.0 / std::sqrt(R2);
    auto psi = [&](const BallPoint& p) { return 1.0 / std::sqrt(p.phi) - inv_r; };
    double psi_lo = psi(*lo), psi_hi = psi(*hi);
    int side = 0;
    for (int it = 0; it < 200; ++it) {
      if (hi->phi >= window_lo) break;
      if (hi->s * (R2 - hi->phi) + hi->err <= 0.25 * eps) break;
      double gap = 0.0;
      const double th = blend(*lo, *hi, gap);
      if (gap <= 0.25 * eps) return finish(hi->shifted + th * (lo->shifted - hi->shifted), false, hi->s);
      const double width = hi->s - lo->s;
      if (width <= 1e-15 * hi->s) break;
      double s = lo->s - psi_lo * width / (psi_hi - psi_lo);
      if (!(s > lo->s + 1e-3 * width && s < hi->s - 1e-3 * width)) s = 0.5 * (lo->s + hi->s);
      BallPoint p = eval(s, (s - lo->s < hi->s - s) ? &lo->shifted : &hi->shifted);
      const double ps = psi(p);
      if (p.phi > R2) {
        lo = std::move(p);
        psi_lo = ps;
        if (side == -1) psi_hi *= 0.5;
        side = -1;
      } else {
        hi = std::move(p);
        psi_hi = ps;
        if (side == 1) psi_lo *= 0.5;
        side = 1;
      }
    }
    return finish(std::move(hi->shifted), false, hi->s);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotConverged) throw;
  }
  return finish(Vector::Zero(n), false, 0.0);
}

ConstrainedQuadSolution l2_constrained_min(const Vector& v, const ColSparse& Hq, const Vector& alpha,
                                           const Vector& w, double c_cap, double eps) {
  QuadraticForm q(Hq);
  return l2_constrained_min(v, q, alpha, w, c_cap, eps, nullptr);
}

}  // namespace matscale
