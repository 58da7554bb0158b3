#include "aclab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace aclab {

void SparseOperator::apply(const Vector& x, Vector& y) const {
  const auto d = dim();
  y.resize(d);
  const double* xp = x.data();
  double* yp = y.data();
  const double* dp = diag.data();
#pragma omp parallel for schedule(static)
  for (int64_t k = 0; k < static_cast<int64_t>(d); ++k) {
    double acc = dp[k] * xp[k];
    for (const auto& t : flips) acc += t.coeff * xp[k ^ t.mask];
    yp[k] = acc;
  }
}

Vector SparseOperator::apply(const Vector& x) const {
  Vector y;
  apply(x, y);
  return y;
}

Matrix SparseOperator::dense() const {
  const auto d = dim();
  Matrix m = Matrix::Zero(d, d);
  for (size_t k = 0; k < d; ++k) m(k, k) = diag[k];
  for (const auto& t : flips)
    for (size_t k = 0; k < d; ++k) m(k ^ t.mask, k) += t.coeff;
  return m;
}

std::vector<std::tuple<uint64_t, uint64_t, double>> SparseOperator::coo() const {
  std::vector<std::tuple<uint64_t, uint64_t, double>> out;
  const auto d = dim();
  for (uint64_t k = 0; k < d; ++k) {
    if (diag[k] != 0.0) out.emplace_back(k, k, diag[k]);
    for (const auto& t : flips) {
      uint64_t q = k ^ t.mask;
      if (q > k && t.coeff != 0.0) out.emplace_back(k, q, t.coeff);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string SparseOperator::coo_text() const {
  std::ostringstream os;
  os.precision(17);
  for (const auto& [r, c, v] : coo()) os << r << " " << c << " " << v << "\n";
  return os.str();
}

SparseOperator build_problem_operator(const IsingModel& m) {
  if (m.n > 20) throw std::invalid_argument("operator dimension limited to 2^20");
  SparseOperator op;
  op.n = m.n;
  const size_t d = size_t(1) << m.n;
  op.diag.resize(d);
  for (size_t k = 0; k < d; ++k) op.diag[k] = ising_energy_basis(m, k);
  return op;
}

SparseOperator build_system_operator(const SystemSpec& spec, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("schedule point outside [0,1]");
  if (spec.driver.kind == DriverKind::FixedXX)
    throw std::invalid_argument("fixed-XX driver construction is not supported");
  SparseOperator op = build_problem_operator(spec.ising);
  op.diag *= s;
  for (int i = 0; i < spec.ising.n; ++i) op.flips.push_back({uint64_t(1) << i, -(1.0 - s)});
  if (spec.driver.kind == DriverKind::CatalystXX) {
    double c = (1.0 - s) * s * spec.driver.jxx;
    for (auto [i, j] : spec.driver.edges) {
      if (i == j || i < 0 || j >= spec.ising.n) throw std::invalid_argument("bad driver edge");
      op.flips.push_back({(uint64_t(1) << i) | (uint64_t(1) << j), c});
    }
  }
  return op;
}

SparseOperator build_schedule_derivative(const SystemSpec& spec, double s) {
  SparseOperator op = build_problem_operator(spec.ising);
  for (int i = 0; i < spec.ising.n; ++i) op.flips.push_back({uint64_t(1) << i, 1.0});
  if (spec.driver.kind == DriverKind::CatalystXX) {
    double c = (1.0 - 2.0 * s) * spec.driver.jxx;
    for (auto [i, j] : spec.driver.edges)
      op.flips.push_back({(uint64_t(1) << i) | (uint64_t(1) << j), c});
  }
  return op;
}

std::vector<uint64_t> driver_masks(const SystemSpec& spec) {
  std::vector<uint64_t> masks;
  for (int i = 0; i < spec.ising.n; ++i) masks.push_back(uint64_t(1) << i);
  if (spec.driver.kind == DriverKind::CatalystXX)
    for (auto [i, j] : spec.driver.edges)
      masks.push_back((uint64_t(1) << i) | (uint64_t(1) << j));
  return masks;
}

std::vector<uint64_t> nbr_hd(const SystemSpec& spec, uint64_t state) {
  if (state >= spec.dim()) throw std::out_of_range("state out of range");
  std::vector<uint64_t> out;
  for (uint64_t m : driver_masks(spec)) out.push_back(state ^ m);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// Multi-source BFS distance over the driver-move graph; -1 = unreached.
std::vector<int> bfs_distances(const SystemSpec& spec, const std::vector<uint64_t>& sources) {
  const size_t d = spec.dim();
  std::vector<int> dist(d, -1);
  std::deque<uint64_t> queue;
  for (uint64_t s : sources) {
    if (s >= d) throw std::out_of_range("state out of range");
    if (dist[s] < 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  auto masks = driver_masks(spec);
  while (!queue.empty()) {
    uint64_t k = queue.front();
    queue.pop_front();
    for (uint64_t m : masks) {
      uint64_t q = k ^ m;
      if (dist[q] < 0) {
        dist[q] = dist[k] + 1;
        queue.push_back(q);
      }
    }
  }
  return dist;
}

}  // namespace

int dist_hd(const SystemSpec& spec, const std::vector<uint64_t>& a,
            const std::vector<uint64_t>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("dist_hd over an empty set");
  auto dist = bfs_distances(spec, a);
  int best = -1;
  for (uint64_t s : b) {
    if (s >= spec.dim()) throw std::out_of_range("state out of range");
    if (dist[s] >= 0 && (best < 0 || dist[s] < best)) best = dist[s];
  }
  if (best < 0) throw std::runtime_error("sets are not connected by driver moves");
  return best;
}

size_t StatePartition::count(Side s) const {
  size_t c = 0;
  for (uint8_t v : side) c += (v == s);
  return c;
}

StatePartition partition_nl_nr(const SystemSpec& spec, const std::vector<uint64_t>& l,
                               const std::vector<uint64_t>& r) {
  if (l.empty() || r.empty()) throw std::invalid_argument("partition needs nonempty L and R");
  for (uint64_t x : l)
    for (uint64_t y : r)
      if (x == y) throw std::invalid_argument("L and R overlap");
  auto dl = bfs_distances(spec, l);
  auto dr = bfs_distances(spec, r);
  StatePartition p;
  p.side.assign(spec.dim(), StatePartition::NearR);
  for (size_t k = 0; k < spec.dim(); ++k) {
    if (dl[k] == 0)
      p.side[k] = StatePartition::InL;
    else if (dr[k] == 0)
      p.side[k] = StatePartition::InR;
    else if (dl[k] >= 0 && (dr[k] < 0 || dl[k] <= dr[k]))
      p.side[k] = StatePartition::NearL;
  }
  return p;
}

std::string to_string(StoqClass c) {
  switch (c) {
    case StoqClass::Stoquastic: return "Stoq";
    case StoqClass::EventuallyStoquastic: return "EStoq";
    case StoqClass::ProperNonStoquastic: return "PNStoq";
  }
  return "?";
}

StoqPointResult classify_pointwise(const SystemSpec& spec, double s, const Vector& ground,
                                   double tol) {
  if (std::abs(ground.norm() - 1.0) > 1e-6)
    throw std::invalid_argument("ground state must be normalized");
  StoqPointResult res;
  // Off-diagonal entries: X part -(1-s) <= 0 always; XX part has the sign of
  // (1-s) s J_xx.  The matrix test is exact.
  bool positive_offdiag = spec.driver.kind == DriverKind::CatalystXX &&
                          !spec.driver.edges.empty() && spec.driver.jxx > 0.0 && s > 0.0 &&
                          s < 1.0;
  if (!positive_offdiag) {
    res.cls = StoqClass::Stoquastic;
    return res;
  }
  // Perron-Frobenius sign test: fix the global sign so the largest-magnitude
  // amplitude is positive, then look for entries below -tol (relative).
  Eigen::Index imax;
  ground.cwiseAbs().maxCoeff(&imax);
  double scale = ground[imax] >= 0 ? 1.0 : -1.0;
  double floor = -tol * std::abs(ground[imax]);
  double worst = 0.0;
  uint64_t worst_state = 0;
  for (Eigen::Index k = 0; k < ground.size(); ++k) {
    double v = scale * ground[k];
    if (v < worst) {
      worst = v;
      worst_state = static_cast<uint64_t>(k);
    }
  }
  if (worst < floor) {
    res.cls = StoqClass::ProperNonStoquastic;
    res.witness_state = worst_state;
    res.witness_amplitude = worst;
  } else {
    res.cls = StoqClass::EventuallyStoquastic;
  }
  return res;
}

}  // namespace aclab
