#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

#include "aclab/graph.hpp"

namespace aclab {

/// Pseudo-boolean objective Y(x) = sum w_i x_i - sum lambda_ij x_i x_j.
/// With lambda_ij > min(w_i, w_j) its maximizers are exactly the MWIS
/// indicator vectors.
struct QuboModel {
  int n = 0;
  std::vector<Decimal> linear;
  std::vector<std::tuple<int, int, Decimal>> quadratic;

  double value(uint64_t x_mask) const;
};

/// h_i sigma^z_i + J_ij sigma^z_i sigma^z_j + offset, with
/// h_i = sum_{j in nbr(i)} lambda_ij - 2 w_i and J_ij = lambda_ij.
/// The offset is chosen so that the energy of the spin image of x equals
/// -4 Y(x) exactly; only gaps matter downstream, the scale is recorded here
/// once.  Spin convention: basis bit b_i = 0 means s_i = +1 means x_i = 1.
struct IsingModel {
  int n = 0;
  std::vector<Decimal> h;
  std::vector<std::tuple<int, int, Decimal>> coupling;
  Decimal offset;

  // double-precision mirrors used by the operator builders
  std::vector<double> hd;
  std::vector<std::tuple<int, int, double>> jd;
  double offsetd = 0.0;
  void materialize();
};

QuboModel mwis_to_qubo(const WeightedGraph& g, Decimal penalty = Decimal(4));
QuboModel mwis_to_qubo(const WeightedGraph& g, const std::vector<Decimal>& per_edge_penalty);

IsingModel qubo_to_ising(const QuboModel& q);

/// Spin values +-1 per vertex.
double ising_energy(const IsingModel& m, const std::vector<int>& spins);

/// Energy of computational basis state `index` (bit i = 0 -> s_i = +1).
double ising_energy_basis(const IsingModel& m, uint64_t index);

/// Basis index whose spin configuration encodes vertex set `s`
/// (members have x=1, i.e. bit 0), and its inverse.
uint64_t set_to_basis(VertexSet s, int n);
VertexSet basis_to_set(uint64_t index, int n);

/// w_i = (sum_j J_ij - h_i)/2, exact in decimal arithmetic.
std::vector<Decimal> recover_weights(const IsingModel& m);

}  // namespace aclab
