#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aclab/decimal.hpp"

namespace aclab {

/// Subset of vertices as a bit mask; vertex i is bit i.  Deterministic
/// tie-breaks everywhere use the numeric order of the mask (smallest first).
struct VertexSet {
  uint64_t bits = 0;

  VertexSet() = default;
  explicit VertexSet(uint64_t b) : bits(b) {}
  static VertexSet of(std::initializer_list<int> vs) {
    VertexSet s;
    for (int v : vs) s.add(v);
    return s;
  }

  bool contains(int v) const { return (bits >> v) & 1ULL; }
  void add(int v) { bits |= (1ULL << v); }
  void remove(int v) { bits &= ~(1ULL << v); }
  int size() const { return __builtin_popcountll(bits); }
  bool empty() const { return bits == 0; }

  std::vector<int> members() const {
    std::vector<int> out;
    for (uint64_t b = bits; b; b &= b - 1) out.push_back(__builtin_ctzll(b));
    return out;
  }

  friend bool operator==(VertexSet a, VertexSet b) { return a.bits == b.bits; }
  friend bool operator<(VertexSet a, VertexSet b) { return a.bits < b.bits; }
};

/// An MWIS instance: positive rational vertex weights, undirected edge set.
struct WeightedGraph {
  int n = 0;
  std::vector<Decimal> weights;
  std::vector<std::pair<int, int>> edges;   // i < j, sorted, unique
  std::vector<uint64_t> adj;                // adjacency masks
  std::vector<std::string> labels;          // optional display names

  void finalize();   // sort/dedup edges, build adj, validate invariants
  bool has_edge(int i, int j) const { return (adj[i] >> j) & 1ULL; }
  Decimal weight_of(VertexSet s) const;
  uint64_t all_mask() const { return n == 64 ? ~0ULL : (1ULL << n) - 1; }
};

bool is_independent(const WeightedGraph& g, VertexSet s);
bool is_maximal_independent(const WeightedGraph& g, VertexSet s);

/// Exact MWIS by branch and bound; ties broken toward the smallest mask.
/// Throws if n > 30.
std::pair<VertexSet, Decimal> brute_force_mwis(const WeightedGraph& g);

/// All maximal independent sets, sorted by descending weight, then by mask.
std::vector<std::pair<VertexSet, Decimal>> enumerate_maximal_is(const WeightedGraph& g);

/// Independent-cliques structure: disjoint cliques of partites covering the
/// local minima.  Partites are independent sets; within a clique every pair
/// of partites is joined by at least one edge; distinct cliques share no edge.
struct ICStructure {
  std::vector<std::vector<VertexSet>> cliques;
  VertexSet covered_vertices;

  void recompute_cover();
  /// Empty string when valid, else a description of the violated invariant.
  std::string validate(const WeightedGraph& g) const;
  /// All one-partite-per-clique unions (the generated local-minima family).
  std::vector<VertexSet> generated_sets() const;
};

// ---- bundled instance families ------------------------------------------

/// 9-vertex instance: cliques {0,1},{3,4},{6,7}, global set {2,5,8}.
WeightedGraph build_g9();

/// 12-vertex extension of g9: cliques {0,1,9},{3,4,10},{6,7}; vertex 9 is
/// shared between the first clique and the global optimum {2,5,8,9};
/// vertex 11 is a dominated filler adjacent to everything.
WeightedGraph build_g12();

/// 15-vertex instance: global set {0..5} at weight wg, three triangles
/// {6,7,8},{9,10,11},{12,13,14} at weight wl, complete bipartite between the
/// global vertices and all triangle vertices.  Requires wl < 2*wg.
WeightedGraph build_grm(Decimal wg, Decimal wl);

/// Scalable family: n_cliques complete cliques of clique_size vertices plus
/// one global independent set of n_cliques vertices (weight global_weight
/// each, complete bipartite to every clique vertex).  Clique weights are
/// drawn from [w_lo, w_hi] deterministically from seed.  Guarantees the
/// global set is the strict optimum; throws if the weight regime cannot be
/// satisfied.
WeightedGraph generate_gic(int n_cliques, int clique_size, Decimal global_weight,
                           Decimal w_lo, Decimal w_hi, uint64_t seed);

/// The canonical IC of a generated instance (one singleton partite per
/// clique vertex): cliques over [i*t, (i+1)*t).
ICStructure gic_structure(int n_cliques, int clique_size);

}  // namespace aclab
