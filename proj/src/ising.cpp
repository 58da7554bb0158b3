#include "aclab/ising.hpp"

#include <stdexcept>

namespace aclab {

double QuboModel::value(uint64_t x_mask) const {
  double y = 0;
  for (int i = 0; i < n; ++i)
    if ((x_mask >> i) & 1ULL) y += linear[i].to_double();
  for (const auto& [i, j, lam] : quadratic)
    if (((x_mask >> i) & 1ULL) && ((x_mask >> j) & 1ULL)) y -= lam.to_double();
  return y;
}

void IsingModel::materialize() {
  hd.clear();
  for (const auto& v : h) hd.push_back(v.to_double());
  jd.clear();
  for (const auto& [i, j, v] : coupling) jd.emplace_back(i, j, v.to_double());
  offsetd = offset.to_double();
}

QuboModel mwis_to_qubo(const WeightedGraph& g, Decimal penalty) {
  std::vector<Decimal> per_edge(g.edges.size(), penalty);
  return mwis_to_qubo(g, per_edge);
}

QuboModel mwis_to_qubo(const WeightedGraph& g, const std::vector<Decimal>& per_edge_penalty) {
  if (per_edge_penalty.size() != g.edges.size())
    throw std::invalid_argument("one penalty per edge required");
  QuboModel q;
  q.n = g.n;
  q.linear = g.weights;
  for (size_t e = 0; e < g.edges.size(); ++e) {
    auto [i, j] = g.edges[e];
    Decimal lam = per_edge_penalty[e];
    Decimal wmin = g.weights[i] < g.weights[j] ? g.weights[i] : g.weights[j];
    if (!(wmin < lam))
      throw std::invalid_argument("penalty must strictly exceed min(w_i, w_j) on every edge");
    q.quadratic.emplace_back(i, j, lam);
  }
  return q;
}

IsingModel qubo_to_ising(const QuboModel& q) {
  IsingModel m;
  m.n = q.n;
  m.h.assign(q.n, Decimal());
  Decimal sum_w, sum_lam;
  for (const auto& w : q.linear) sum_w = sum_w + w;
  for (const auto& [i, j, lam] : q.quadratic) {
    m.h[i] = m.h[i] + lam;
    m.h[j] = m.h[j] + lam;
    m.coupling.emplace_back(i, j, lam);
    sum_lam = sum_lam + lam;
  }
  for (int i = 0; i < q.n; ++i) m.h[i] = m.h[i] - q.linear[i].times(2);
  // E(spins(x)) + offset = -4 Y(x); the formula part alone gives
  // -4Y + (2 sum_w - sum_lam).
  m.offset = sum_lam - sum_w.times(2);
  m.materialize();
  return m;
}

double ising_energy(const IsingModel& m, const std::vector<int>& spins) {
  if (static_cast<int>(spins.size()) != m.n) throw std::invalid_argument("spin count != n");
  double e = m.offsetd;
  for (int i = 0; i < m.n; ++i) e += m.hd[i] * spins[i];
  for (const auto& [i, j, v] : m.jd) e += v * spins[i] * spins[j];
  return e;
}

double ising_energy_basis(const IsingModel& m, uint64_t index) {
  double e = m.offsetd;
  for (int i = 0; i < m.n; ++i) e += ((index >> i) & 1ULL) ? -m.hd[i] : m.hd[i];
  for (const auto& [i, j, v] : m.jd) {
    int s = (((index >> i) ^ (index >> j)) & 1ULL) ? -1 : 1;
    e += v * s;
  }
  return e;
}

uint64_t set_to_basis(VertexSet s, int n) {
  uint64_t full = n == 64 ? ~0ULL : (1ULL << n) - 1;
  return ~s.bits & full;
}

VertexSet basis_to_set(uint64_t index, int n) {
  uint64_t full = n == 64 ? ~0ULL : (1ULL << n) - 1;
  return VertexSet(~index & full);
}

std::vector<Decimal> recover_weights(const IsingModel& m) {
  std::vector<Decimal> jsum(m.n, Decimal());
  for (const auto& [i, j, v] : m.coupling) {
    jsum[i] = jsum[i] + v;
    jsum[j] = jsum[j] + v;
  }
  std::vector<Decimal> w(m.n);
  for (int i = 0; i < m.n; ++i) w[i] = (jsum[i] - m.h[i]).half();
  return w;
}

}  // namespace aclab
