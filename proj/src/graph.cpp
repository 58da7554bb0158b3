#include "aclab/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace aclab {

void WeightedGraph::finalize() {
  if (n < 0 || n > 63) throw std::invalid_argument("vertex count out of range");
  if (static_cast<int>(weights.size()) != n) throw std::invalid_argument("weight count != n");
  for (const auto& w : weights)
    if (!w.is_positive()) throw std::invalid_argument("weights must be strictly positive");
  for (auto& e : edges) {
    if (e.first == e.second) throw std::invalid_argument("self-loop");
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.first < 0 || e.second >= n) throw std::invalid_argument("edge endpoint out of range");
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("duplicate edge");
  adj.assign(n, 0);
  for (auto [i, j] : edges) {
    adj[i] |= 1ULL << j;
    adj[j] |= 1ULL << i;
  }
}

Decimal WeightedGraph::weight_of(VertexSet s) const {
  Decimal total;
  for (uint64_t b = s.bits; b; b &= b - 1) total = total + weights[__builtin_ctzll(b)];
  return total;
}

bool is_independent(const WeightedGraph& g, VertexSet s) {
  if (s.bits & ~g.all_mask()) throw std::out_of_range("vertex index out of range");
  for (uint64_t b = s.bits; b; b &= b - 1)
    if (g.adj[__builtin_ctzll(b)] & s.bits) return false;
  return true;
}

bool is_maximal_independent(const WeightedGraph& g, VertexSet s) {
  if (!is_independent(g, s)) return false;
  uint64_t blocked = s.bits;
  for (uint64_t b = s.bits; b; b &= b - 1) blocked |= g.adj[__builtin_ctzll(b)];
  return blocked == g.all_mask();
}

namespace {

struct MwisSearch {
  const WeightedGraph& g;
  std::vector<int> order;            // vertices by descending weight
  std::vector<Decimal> suffix_sum;   // weight still reachable from position k
  Decimal best_weight;
  uint64_t best_mask = ~0ULL;
  bool have_best = false;

  explicit MwisSearch(const WeightedGraph& gr) : g(gr) {
    order.resize(g.n);
    for (int i = 0; i < g.n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return g.weights[b] < g.weights[a]; });
    suffix_sum.assign(g.n + 1, Decimal());
    for (int k = g.n - 1; k >= 0; --k) suffix_sum[k] = suffix_sum[k + 1] + g.weights[order[k]];
  }

  void consider(uint64_t mask, Decimal w) {
    if (!have_best || best_weight < w || (w == best_weight && mask < best_mask)) {
      best_weight = w;
      best_mask = mask;
      have_best = true;
    }
  }

  void run(int pos, uint64_t chosen, uint64_t blocked, Decimal w) {
    if (pos == g.n) {
      consider(chosen, w);
      return;
    }
    if (have_best && w + suffix_sum[pos] < best_weight) return;
    int v = order[pos];
    if (!((blocked >> v) & 1ULL))
      run(pos + 1, chosen | (1ULL << v), blocked | g.adj[v] | (1ULL << v), w + g.weights[v]);
    run(pos + 1, chosen, blocked, w);
  }
};

}  // namespace

std::pair<VertexSet, Decimal> brute_force_mwis(const WeightedGraph& g) {
  if (g.n > 30) throw std::invalid_argument("brute-force MWIS limited to n <= 30");
  MwisSearch search(g);
  search.run(0, 0, 0, Decimal());
  return {VertexSet(search.best_mask), search.best_weight};
}

namespace {

// Maximal independent sets of g are maximal cliques of the complement;
// Bron-Kerbosch with pivoting over bit masks.
void bron_kerbosch(const std::vector<uint64_t>& cadj, uint64_t r, uint64_t p, uint64_t x,
                   std::vector<uint64_t>& out) {
  if (!p && !x) {
    out.push_back(r);
    return;
  }
  uint64_t px = p | x;
  int pivot = -1;
  int best_cover = -1;
  for (uint64_t b = px; b; b &= b - 1) {
    int u = __builtin_ctzll(b);
    int cover = __builtin_popcountll(p & cadj[u]);
    if (cover > best_cover) {
      best_cover = cover;
      pivot = u;
    }
  }
  uint64_t candidates = p & ~cadj[pivot];
  for (uint64_t b = candidates; b; b &= b - 1) {
    int v = __builtin_ctzll(b);
    uint64_t vb = 1ULL << v;
    bron_kerbosch(cadj, r | vb, p & cadj[v], x & cadj[v], out);
    p &= ~vb;
    x |= vb;
  }
}

}  // namespace

std::vector<std::pair<VertexSet, Decimal>> enumerate_maximal_is(const WeightedGraph& g) {
  if (g.n > 30) throw std::invalid_argument("maximal-IS enumeration limited to n <= 30");
  std::vector<uint64_t> cadj(g.n);
  for (int v = 0; v < g.n; ++v) cadj[v] = g.all_mask() & ~g.adj[v] & ~(1ULL << v);
  std::vector<uint64_t> sets;
  bron_kerbosch(cadj, 0, g.all_mask(), 0, sets);
  std::vector<std::pair<VertexSet, Decimal>> out;
  out.reserve(sets.size());
  for (uint64_t m : sets) out.emplace_back(VertexSet(m), g.weight_of(VertexSet(m)));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return b.second < a.second;
    return a.first.bits < b.first.bits;
  });
  return out;
}

void ICStructure::recompute_cover() {
  covered_vertices = VertexSet();
  for (const auto& c : cliques)
    for (const auto& p : c) covered_vertices.bits |= p.bits;
}

std::string ICStructure::validate(const WeightedGraph& g) const {
  uint64_t seen = 0;
  for (const auto& clique : cliques) {
    if (clique.empty()) return "empty clique";
    uint64_t clique_bits = 0;
    for (const auto& part : clique) {
      if (part.empty()) return "empty partite";
      if (part.bits & clique_bits) return "partites overlap within a clique";
      clique_bits |= part.bits;
      if (!is_independent(g, part)) return "partite is not an independent set";
    }
    for (size_t a = 0; a < clique.size(); ++a)
      for (size_t b = a + 1; b < clique.size(); ++b) {
        bool joined = false;
        for (uint64_t bits = clique[a].bits; bits && !joined; bits &= bits - 1)
          joined = (g.adj[__builtin_ctzll(bits)] & clique[b].bits) != 0;
        if (!joined) return "partite pair without a joining edge";
      }
    if (clique_bits & seen) return "cliques overlap";
    seen |= clique_bits;
  }
  // independence of cliques: no edge between vertices of different cliques
  for (size_t a = 0; a < cliques.size(); ++a) {
    uint64_t abits = 0;
    for (const auto& p : cliques[a]) abits |= p.bits;
    for (size_t b = a + 1; b < cliques.size(); ++b) {
      uint64_t bbits = 0;
      for (const auto& p : cliques[b]) bbits |= p.bits;
      for (uint64_t bits = abits; bits; bits &= bits - 1)
        if (g.adj[__builtin_ctzll(bits)] & bbits) return "edge between cliques";
    }
  }
  return {};
}

std::vector<VertexSet> ICStructure::generated_sets() const {
  std::vector<VertexSet> acc{VertexSet()};
  for (const auto& clique : cliques) {
    std::vector<VertexSet> next;
    next.reserve(acc.size() * clique.size());
    for (const auto& base : acc)
      for (const auto& part : clique) next.push_back(VertexSet(base.bits | part.bits));
    acc = std::move(next);
  }
  std::sort(acc.begin(), acc.end());
  return acc;
}

WeightedGraph build_g9() {
  WeightedGraph g;
  g.n = 9;
  auto d = [](const char* s) { return Decimal::parse(s); };
  // Clique pairs sum to 3.70 (lightest local set) and 3.95 (heaviest); the
  // balanced split keeps the eight one-per-clique sets tightly banded, which
  // sharpens the transverse-field anti-crossing near s ~ 0.57.
  g.weights = {d("1.22"), d("1.31"), d("1.34"), d("1.24"), d("1.32"),
               d("1.34"), d("1.24"), d("1.32"), d("1.34")};
  g.edges = {{0, 1}, {3, 4}, {6, 7}};
  for (int global : {2, 5, 8})
    for (int v : {0, 1, 3, 4, 6, 7}) g.edges.emplace_back(std::min(global, v), std::max(global, v));
  g.finalize();
  return g;
}

WeightedGraph build_g12() {
  WeightedGraph g;
  g.n = 12;
  auto d = [](const char* s) { return Decimal::parse(s); };
  g.weights = {d("1.22"), d("1.31"), d("1.00"), d("1.24"), d("1.32"), d("1.00"),
               d("1.24"), d("1.32"), d("1.00"), d("1.25"), d("1.28"), d("0.50")};
  g.edges = {{0, 1}, {0, 9}, {1, 9}, {3, 4}, {3, 10}, {4, 10}, {6, 7}};
  for (int global : {2, 5, 8})
    for (int v : {0, 1, 3, 4, 6, 7, 10})
      g.edges.emplace_back(std::min(global, v), std::max(global, v));
  for (int v = 0; v < 11; ++v) g.edges.emplace_back(v, 11);
  g.finalize();
  return g;
}

WeightedGraph build_grm(Decimal wg, Decimal wl) {
  if (!(wl < wg.times(2)))
    throw std::invalid_argument("grm requires w_l < 2*w_g");
  if (!wg.is_positive() || !wl.is_positive())
    throw std::invalid_argument("grm weights must be positive");
  WeightedGraph g;
  g.n = 15;
  g.weights.assign(6, wg);
  g.weights.insert(g.weights.end(), 9, wl);
  for (int t = 0; t < 3; ++t) {
    int base = 6 + 3 * t;
    g.edges.emplace_back(base, base + 1);
    g.edges.emplace_back(base, base + 2);
    g.edges.emplace_back(base + 1, base + 2);
  }
  for (int global = 0; global < 6; ++global)
    for (int v = 6; v < 15; ++v) g.edges.emplace_back(global, v);
  g.finalize();
  return g;
}

ICStructure gic_structure(int n_cliques, int clique_size) {
  ICStructure ic;
  for (int c = 0; c < n_cliques; ++c) {
    std::vector<VertexSet> parts;
    for (int t = 0; t < clique_size; ++t) parts.push_back(VertexSet::of({c * clique_size + t}));
    ic.cliques.push_back(std::move(parts));
  }
  ic.recompute_cover();
  return ic;
}

namespace {

// Deterministic bounded draw (plain modulus with rejection); keeps generated
// instances identical across standard libraries.
uint64_t draw_below(uint64_t& state, uint64_t bound) {
  // xorshift64* generator
  auto next = [&state]() {
    state ^= state >> 12;
    state ^= state << 25;
    state ^= state >> 27;
    return state * 0x2545F4914F6CDD1DULL;
  };
  uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

WeightedGraph generate_gic(int n_cliques, int clique_size, Decimal global_weight,
                           Decimal w_lo, Decimal w_hi, uint64_t seed) {
  if (n_cliques < 1 || clique_size < 2)
    throw std::invalid_argument("gic requires n_cliques >= 1 and clique_size >= 2");
  if (w_hi < w_lo || !w_lo.is_positive())
    throw std::invalid_argument("bad local weight range");
  int exp = std::max(w_lo.raw_exp(), w_hi.raw_exp());
  long long lo = w_lo.raw_num(), hi = w_hi.raw_num();
  for (int e = w_lo.raw_exp(); e < exp; ++e) lo *= 10;
  for (int e = w_hi.raw_exp(); e < exp; ++e) hi *= 10;

  uint64_t state = seed * 0x9E3779B97F4A7C15ULL + 1;
  int n = n_cliques * clique_size + n_cliques;
  WeightedGraph g;
  g.n = n;
  for (int attempt = 0; attempt < 100; ++attempt) {
    g.weights.assign(n, global_weight);
    Decimal heaviest_local;
    for (int c = 0; c < n_cliques; ++c) {
      Decimal cmax;
      for (int t = 0; t < clique_size; ++t) {
        long long draw = lo + static_cast<long long>(draw_below(state, uint64_t(hi - lo + 1)));
        Decimal w = Decimal::from_scaled(draw, exp);
        g.weights[c * clique_size + t] = w;
        if (t == 0 || cmax < w) cmax = w;
      }
      heaviest_local = heaviest_local + cmax;
    }
    if (heaviest_local < global_weight.times(n_cliques)) break;
    if (attempt == 99)
      throw std::invalid_argument("gic weight regime inconsistent: a local minimum would be global");
  }

  g.edges.clear();
  for (int c = 0; c < n_cliques; ++c)
    for (int a = 0; a < clique_size; ++a)
      for (int b = a + 1; b < clique_size; ++b)
        g.edges.emplace_back(c * clique_size + a, c * clique_size + b);
  int gbase = n_cliques * clique_size;
  for (int gidx = 0; gidx < n_cliques; ++gidx)
    for (int v = 0; v < gbase; ++v) g.edges.emplace_back(v, gbase + gidx);
  g.finalize();
  return g;
}

}  // namespace aclab
