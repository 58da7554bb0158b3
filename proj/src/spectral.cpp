#include "aclab/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

#ifdef ACLAB_HAVE_LAPACKE
#include <lapacke.h>
#endif

namespace aclab {

namespace {

Matrix apply_block(const SparseOperator& op, const Matrix& x) {
  Matrix y(x.rows(), x.cols());
  Vector tmp_in(x.rows()), tmp_out;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    tmp_in = x.col(c);
    op.apply(tmp_in, tmp_out);
    y.col(c) = tmp_out;
  }
  return y;
}

void fix_first_nonzero_positive(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      double v = vectors(r, c);
      if (std::abs(v) > 1e-12) {
        if (v < 0) vectors.col(c) = -vectors.col(c);
        break;
      }
    }
  }
}

EigenPoint dense_lowest_k(const SparseOperator& op, int k) {
  const auto d = static_cast<Eigen::Index>(op.dim());
  Matrix h = op.dense();
  // Centering the diagonal improves the conditioning of the factorization;
  // eigenvectors are unchanged and energies shift back exactly.
  double shift = h.diagonal().mean();
  h.diagonal().array() -= shift;
  EigenPoint p;
#ifdef ACLAB_HAVE_LAPACKE
  Vector w(d);
  Matrix z(d, k);
  std::vector<lapack_int> isuppz(2 * std::max(1, k));
  lapack_int found = 0;
  lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', static_cast<lapack_int>(d),
                                   h.data(), static_cast<lapack_int>(d), 0.0, 0.0, 1, k, 0.0,
                                   &found, w.data(), z.data(), static_cast<lapack_int>(d),
                                   isuppz.data());
  if (info != 0 || found < k) throw std::runtime_error("dsyevr failed");
  p.energies = w.head(k).array() + shift;
  p.vectors = z;
#else
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  p.energies = es.eigenvalues().head(k).array() + shift;
  p.vectors = es.eigenvectors().leftCols(k);
#endif
  fix_first_nonzero_positive(p.vectors);
  return p;
}

// Orthonormalize the columns of v against base (two block Gram-Schmidt
// passes), then internally via rank-revealing QR.  companion, when given, is
// carried through the same column operations (used to keep H*v consistent
// without fresh matvecs).
void ortho_block(const Matrix& base, const Matrix& hbase, Matrix& v, Matrix* companion) {
  for (int pass = 0; pass < 2; ++pass) {
    if (base.cols() > 0 && v.cols() > 0) {
      Matrix coef = base.transpose() * v;
      v.noalias() -= base * coef;
      if (companion) companion->noalias() -= hbase * coef;
    }
  }
  if (v.cols() == 0) return;
  // drop columns that lost essentially all of their content
  double max_norm = 0;
  for (Eigen::Index c = 0; c < v.cols(); ++c) max_norm = std::max(max_norm, v.col(c).norm());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < v.cols(); ++c)
    if (v.col(c).norm() > std::max(1e-7 * max_norm, 1e-14)) keep.push_back(c);
  if (static_cast<Eigen::Index>(keep.size()) < v.cols()) {
    Matrix v2(v.rows(), keep.size());
    Matrix c2;
    if (companion) c2.resize(companion->rows(), keep.size());
    for (size_t i = 0; i < keep.size(); ++i) {
      v2.col(i) = v.col(keep[i]);
      if (companion) c2.col(i) = companion->col(keep[i]);
    }
    v = std::move(v2);
    if (companion) *companion = std::move(c2);
  }
  if (v.cols() == 0) return;
  Eigen::ColPivHouseholderQR<Matrix> qr(v);
  qr.setThreshold(1e-10);
  Eigen::Index rank = qr.rank();
  if (rank == 0) {
    v.resize(v.rows(), 0);
    if (companion) companion->resize(companion->rows(), 0);
    return;
  }
  Matrix q = qr.householderQ() * Matrix::Identity(v.rows(), rank);
  if (companion) {
    // v * perm = q * r  =>  columns of q are combinations v*perm*r^-1
    Matrix r = qr.matrixQR().topLeftCorner(rank, rank).triangularView<Eigen::Upper>();
    Matrix cp = (*companion) * qr.colsPermutation();
    Matrix cpl = cp.leftCols(rank);
    *companion = r.transpose()
                     .triangularView<Eigen::Lower>()
                     .solve(cpl.transpose())
                     .transpose();
  }
  v = std::move(q);
}

struct LobpcgOutcome {
  EigenPoint point;
  Matrix basis;   // full block, for warm restarts
  int iterations = 0;
  double max_residual = 0.0;
  bool converged = false;
};

LobpcgOutcome lobpcg(const SparseOperator& op, int k, double tol, int block, int maxit,
                     const Matrix* warm, uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(op.dim());
  block = std::min<Eigen::Index>(block, d);
  k = std::min<Eigen::Index>(k, block);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Matrix x(d, block);
  Eigen::Index have = 0;
  if (warm && warm->rows() == d) {
    have = std::min<Eigen::Index>(warm->cols(), block);
    x.leftCols(have) = warm->leftCols(have);
  }
  for (Eigen::Index c = have; c < block; ++c)
    for (Eigen::Index r = 0; r < d; ++r) x(r, c) = gauss(rng);

  {
    Matrix none(d, 0);
    ortho_block(none, none, x, nullptr);
  }
  while (x.cols() < block) {
    Matrix extra(d, block - x.cols());
    for (Eigen::Index c = 0; c < extra.cols(); ++c)
      for (Eigen::Index r = 0; r < d; ++r) extra(r, c) = gauss(rng);
    Matrix hx_dummy(d, 0);
    ortho_block(x, hx_dummy, extra, nullptr);
    Matrix joined(d, x.cols() + extra.cols());
    joined << x, extra;
    x = std::move(joined);
  }

  Matrix hx = apply_block(op, x);
  Matrix p(d, 0), hp(d, 0);
  Vector lambda = Vector::Zero(block);
  LobpcgOutcome out;
  double best_res = std::numeric_limits<double>::infinity();
  int stall = 0;

  for (int iter = 0; iter < maxit; ++iter) {
    out.iterations = iter + 1;
    {
      Matrix g = x.transpose() * hx;
      g = 0.5 * (g + g.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Matrix> es(g);
      x = (x * es.eigenvectors()).eval();
      hx = (hx * es.eigenvectors()).eval();
      lambda = es.eigenvalues();
    }
    Matrix resid = hx - x * lambda.asDiagonal();
    double max_res = 0;
    for (int c = 0; c < k; ++c) max_res = std::max(max_res, resid.col(c).norm());
    out.max_residual = max_res;
    if (max_res <= tol) {
      out.converged = true;
      break;
    }
    if (max_res < 0.75 * best_res) {
      best_res = max_res;
      stall = 0;
    } else if (++stall > 40) {
      p.resize(d, 0);      // restart the search directions once
      hp.resize(d, 0);
      stall = -10000;
    }

    // active residual directions
    std::vector<Eigen::Index> act;
    for (Eigen::Index c = 0; c < block; ++c)
      if (resid.col(c).norm() > 0.1 * tol) act.push_back(c);
    Matrix w(d, act.size());
    for (size_t i = 0; i < act.size(); ++i) w.col(i) = resid.col(act[i]);

    ortho_block(x, hx, w, nullptr);
    if (w.cols() == 0) {
      out.converged = max_res <= tol;
      break;
    }
    Matrix hw = apply_block(op, w);

    Matrix xw(d, x.cols() + w.cols());
    xw << x, w;
    Matrix hxw(d, x.cols() + w.cols());
    hxw << hx, hw;
    ortho_block(xw, hxw, p, &hp);

    Eigen::Index sc = xw.cols() + p.cols();
    Matrix sbasis(d, sc), hsbasis(d, sc);
    sbasis << xw, p;
    hsbasis << hxw, hp;

    Matrix g = sbasis.transpose() * hsbasis;
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    Matrix c = es.eigenvectors().leftCols(block);
    Matrix cp = c;
    cp.topRows(block).setZero();

    x = sbasis * c;
    hx = hsbasis * c;
    p = sbasis * cp;
    hp = hsbasis * cp;
  }

  out.point.energies = lambda.head(k);
  out.point.vectors = x.leftCols(k);
  out.basis = std::move(x);
  fix_first_nonzero_positive(out.point.vectors);
  return out;
}

int default_maxit(size_t dim) { return static_cast<int>(10.0 * std::sqrt(double(dim))) + 500; }

}  // namespace

EigenPoint lowest_k_eigenpairs(const SparseOperator& op, int k, double tol,
                               const SolverOptions& opts, SolveStats* stats) {
  if (k < 1 || static_cast<size_t>(k) >= op.dim())
    throw std::invalid_argument("k must be in [1, dim)");
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  if (op.dim() <= static_cast<size_t>(opts.dense_threshold)) {
    EigenPoint p = dense_lowest_k(op, k);
    if (stats) {
      stats->dense = true;
      stats->iterations = 0;
      double mr = 0;
      for (int c = 0; c < k; ++c)
        mr = std::max(mr, (op.apply(p.vectors.col(c)) - p.energies[c] * p.vectors.col(c)).norm());
      stats->max_residual = mr;
    }
    return p;
  }
  int maxit = opts.max_iterations > 0 ? opts.max_iterations : default_maxit(op.dim());
  auto out = lobpcg(op, k, tol, k + opts.block_extra, maxit, nullptr, opts.seed);
  if (stats) {
    stats->dense = false;
    stats->iterations = out.iterations;
    stats->max_residual = out.max_residual;
  }
  if (!out.converged)
    throw NonConvergence("iterative eigensolver did not converge", out.max_residual);
  return out.point;
}

std::vector<double> uniform_grid(int points, double lo, double hi) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * double(i) / double(points - 1);
  return g;
}

SpectralSweep::SpectralSweep(SystemSpec spec, SweepOptions opts)
    : spec_(std::move(spec)), opts_(opts) {}

EigenPoint SpectralSweep::solve_at(double s, const Matrix* warm, Matrix* basis_out) const {
  SparseOperator op = build_system_operator(spec_, s);
  EigenPoint p;
  if (op.dim() <= static_cast<size_t>(opts_.dense_threshold) && warm == nullptr) {
    p = dense_lowest_k(op, opts_.k);
    if (basis_out) *basis_out = p.vectors;
  } else {
    int block = opts_.k + 4;
    auto out = lobpcg(op, opts_.k, opts_.tol, block, default_maxit(op.dim()), warm, opts_.seed);
    if (!out.converged) {
      if (op.dim() <= static_cast<size_t>(SolverOptions{}.dense_threshold)) {
        p = dense_lowest_k(op, opts_.k);
        if (basis_out) *basis_out = p.vectors;
        p.s = s;
        return p;
      }
      throw NonConvergence("sweep eigensolver failed at s=" + std::to_string(s),
                           out.max_residual);
    }
    p = out.point;
    if (basis_out) *basis_out = std::move(out.basis);
  }
  p.s = s;
  return p;
}

void SpectralSweep::match_phase(const EigenPoint& prev, EigenPoint& cur) const {
  const double deg_tol = 1e-10;
  int k = cur.levels();
  int a = 0;
  while (a < k) {
    int b = a + 1;
    while (b < k && cur.energies[b] - cur.energies[b - 1] < deg_tol) ++b;
    if (b - a == 1) {
      if (prev.vectors.col(a).dot(cur.vectors.col(a)) < 0) cur.vectors.col(a) *= -1.0;
    } else {
      // gauge inside a degenerate cluster: orthogonal Procrustes onto the
      // previous point's cluster block
      Matrix m = cur.vectors.middleCols(a, b - a).transpose() * prev.vectors.middleCols(a, b - a);
      Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Matrix rot = svd.matrixU() * svd.matrixV().transpose();
      cur.vectors.middleCols(a, b - a) = (cur.vectors.middleCols(a, b - a) * rot).eval();
    }
    a = b;
  }
}

void SpectralSweep::run(const std::vector<double>& grid) {
  std::vector<double> g = grid;
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  if (g.size() < 2) throw std::invalid_argument("sweep grid needs at least two points");
  if (g.front() < 0.0 || g.back() > 1.0) throw std::invalid_argument("grid outside [0,1]");

  points_.clear();
  points_.reserve(g.size());
  Matrix basis;
  bool first = true;
  for (double s : g) {
    EigenPoint p = solve_at(s, first ? nullptr : &basis, &basis);
    points_.push_back(std::move(p));
    first = false;
  }
  for (size_t i = 1; i < points_.size(); ++i) match_phase(points_[i - 1], points_[i]);
  refine_minima();
  refine_continuity();
}

size_t SpectralSweep::nearest_index(double s) const {
  size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < points_.size(); ++i) {
    double d = std::abs(points_[i].s - s);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

size_t SpectralSweep::ensure_point(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("schedule point outside [0,1]");
  size_t near = nearest_index(s);
  if (std::abs(points_[near].s - s) < 1e-12) return near;
  Matrix warm = points_[near].vectors;
  Matrix basis;
  EigenPoint p = solve_at(s, &warm, &basis);
  auto it = std::upper_bound(points_.begin(), points_.end(), s,
                             [](double v, const EigenPoint& q) { return v < q.s; });
  size_t idx = static_cast<size_t>(it - points_.begin());
  points_.insert(it, std::move(p));
  for (size_t i = std::max<size_t>(idx, 1); i < points_.size(); ++i)
    match_phase(points_[i - 1], points_[i]);
  return idx;
}

void SpectralSweep::refine_minima() {
  if (opts_.k < 2) return;
  int budget = opts_.max_extra_points;
  bool changed = true;
  while (changed && budget > 0) {
    changed = false;
    for (size_t i = 1; i + 1 < points_.size() && budget > 0; ++i) {
      double d = points_[i].energies[1] - points_[i].energies[0];
      double dm = points_[i - 1].energies[1] - points_[i - 1].energies[0];
      double dp = points_[i + 1].energies[1] - points_[i + 1].energies[0];
      if (d <= dm && d <= dp) {
        double left = points_[i].s - points_[i - 1].s;
        double right = points_[i + 1].s - points_[i].s;
        if (left > opts_.refine_ds) {
          ensure_point(points_[i - 1].s + left / 2);
          --budget;
          changed = true;
        }
        if (right > opts_.refine_ds && budget > 0) {
          ensure_point(points_[i].s + right / 2);
          --budget;
          changed = true;
        }
      }
    }
  }
}

void SpectralSweep::refine_continuity() {
  int budget = std::max(0, opts_.max_extra_points / 4);
  // Gap-minimum refinement already resolves crossings to refine_ds; here a
  // coarser floor avoids chasing gauge-arbitrary vectors inside degenerate
  // manifolds (e.g. the level-1 cluster at s=0).
  const double floor = 10.0 * opts_.refine_ds;
  bool changed = true;
  while (changed && budget > 0) {
    changed = false;
    for (size_t i = 1; i < points_.size() && budget > 0; ++i) {
      if (points_[i].s - points_[i - 1].s <= floor) continue;
      double worst = 1.0;
      for (int c = 0; c < points_[i].levels(); ++c)
        worst = std::min(worst,
                         std::abs(points_[i - 1].vectors.col(c).dot(points_[i].vectors.col(c))));
      if (worst < opts_.continuity_floor) {
        ensure_point(0.5 * (points_[i - 1].s + points_[i].s));
        --budget;
        changed = true;
      }
    }
  }
}

SpectralSweep sweep(const SystemSpec& spec, const std::vector<double>& grid, int k,
                    const SweepOptions& opts) {
  SweepOptions o = opts;
  o.k = k;
  SpectralSweep sw(spec, o);
  sw.run(grid);
  return sw;
}

double signed_overlap(const EigenPoint& p, int level, uint64_t state) {
  if (level >= p.levels()) throw std::out_of_range("level out of range");
  double c = p.vectors(static_cast<Eigen::Index>(state), level);
  return c >= 0 ? c * c : -(c * c);
}

double set_projection_norm(const EigenPoint& p, int level, std::span<const uint64_t> a) {
  if (a.empty()) throw std::invalid_argument("projection over an empty set");
  double total = 0;
  for (uint64_t x : a) {
    double c = p.vectors(static_cast<Eigen::Index>(x), level);
    total += c * c;
  }
  return total;
}

GapCurve gap_curve(const SpectralSweep& sw, int i, int j) {
  if (i <= j) throw std::invalid_argument("gap_curve requires i > j");
  if (i >= sw.levels()) throw std::out_of_range("level out of range");
  GapCurve gc;
  for (const auto& p : sw.points()) {
    gc.s.push_back(p.s);
    gc.delta.push_back(p.energies[i] - p.energies[j]);
  }
  for (size_t t = 1; t + 1 < gc.delta.size(); ++t) {
    bool le_left = gc.delta[t] <= gc.delta[t - 1];
    bool le_right = gc.delta[t] <= gc.delta[t + 1];
    bool strict = gc.delta[t] < gc.delta[t - 1] || gc.delta[t] < gc.delta[t + 1];
    if (le_left && le_right && strict) {
      if (!gc.interior_minima.empty() &&
          gc.interior_minima.back().second == gc.delta[t])
        continue;   // plateau
      gc.interior_minima.emplace_back(gc.s[t], gc.delta[t]);
    }
  }
  return gc;
}

double expectation(const EigenPoint& p, int level, const SparseOperator& op) {
  if (level >= p.levels()) throw std::out_of_range("level out of range");
  if (op.dim() != static_cast<size_t>(p.vectors.rows()))
    throw std::invalid_argument("dimension mismatch");
  Vector v = p.vectors.col(level);
  return v.dot(op.apply(v));
}

StoqSystemResult classify_system(const SpectralSweep& sw, double tol) {
  StoqSystemResult res;
  const auto& spec = sw.spec();
  bool any_nonstoq = false;
  for (const auto& p : sw.points()) {
    auto pt = classify_pointwise(spec, p.s, p.vectors.col(0), tol);
    if (pt.cls != StoqClass::Stoquastic) any_nonstoq = true;
    if (pt.cls == StoqClass::ProperNonStoquastic) {
      res.cls = StoqClass::ProperNonStoquastic;
      res.witness_s = p.s;
      res.witness_state = pt.witness_state;
      return res;
    }
  }
  res.cls = any_nonstoq ? StoqClass::EventuallyStoquastic : StoqClass::Stoquastic;
  return res;
}

}  // namespace aclab
