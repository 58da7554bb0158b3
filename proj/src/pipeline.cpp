#include "aclab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace aclab {

namespace {

uint64_t splitmix(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit_draw(uint64_t& state) {
  return double(splitmix(state) >> 11) * 0x1.0p-53;
}

/// Greedy maximal extension by descending weight (mask order breaks ties).
VertexSet extend_to_maximal(const WeightedGraph& g, VertexSet s) {
  std::vector<int> order(g.n);
  for (int i = 0; i < g.n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return g.weights[b] < g.weights[a]; });
  uint64_t blocked = s.bits;
  for (uint64_t b = s.bits; b; b &= b - 1) blocked |= g.adj[__builtin_ctzll(b)];
  for (int v : order) {
    if (!((blocked >> v) & 1ULL)) {
      s.add(v);
      blocked |= g.adj[v] | (1ULL << v);
    }
  }
  return s;
}

std::vector<VertexSet> sample_mode_b(const WeightedGraph& g, const PipelineConfig& cfg) {
  uint64_t state = cfg.seed * 0x243F6A8885A308D3ULL + 99;
  std::set<uint64_t> seen;
  std::vector<std::pair<Decimal, VertexSet>> kept;
  for (int trial = 0; trial < cfg.sample_budget; ++trial) {
    VertexSet s;
    uint64_t blocked = 0;
    while (true) {
      // pick the next vertex with probability proportional to weight
      double total = 0;
      for (int v = 0; v < g.n; ++v)
        if (!((blocked >> v) & 1ULL)) total += g.weights[v].to_double();
      if (total <= 0) break;
      double pick = unit_draw(state) * total;
      int chosen = -1;
      for (int v = 0; v < g.n; ++v) {
        if ((blocked >> v) & 1ULL) continue;
        pick -= g.weights[v].to_double();
        if (pick <= 0) {
          chosen = v;
          break;
        }
      }
      if (chosen < 0) break;
      s.add(chosen);
      blocked |= g.adj[chosen] | (1ULL << chosen);
    }
    if (!s.empty() && seen.insert(s.bits).second) kept.emplace_back(g.weight_of(s), s);
  }
  if (kept.empty()) return {};
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return b.first < a.first;
    return a.second.bits < b.second.bits;
  });
  double best = kept.front().first.to_double();
  std::vector<VertexSet> out;
  for (const auto& [w, s] : kept)
    if (w.to_double() >= cfg.keep_fraction * best) out.push_back(s);
  return out;
}

std::vector<VertexSet> sample_mode_a(const WeightedGraph& g, const PipelineConfig& cfg) {
  if (g.n > 16) return sample_mode_b(g, cfg);
  IsingModel ising = qubo_to_ising(mwis_to_qubo(g, cfg.penalty));
  SystemSpec spec{ising, DriverSpec::transverse_field()};
  SweepOptions so;
  so.k = 2;
  SpectralSweep sw(spec, so);
  sw.run(uniform_grid(201));
  auto minima = find_gap_minima(sw);
  if (minima.empty()) return sample_mode_b(g, cfg);
  auto deepest = *std::min_element(minima.begin(), minima.end(),
                                   [](auto a, auto b) { return a.second < b.second; });
  auto arms = find_arms(sw, deepest.first, cfg.thresholds);
  if (!arms.ok) return sample_mode_b(g, cfg);
  const auto& p = sw.point(sw.ensure_point(arms.ac.s_x - arms.ac.delta));

  uint64_t state = cfg.seed * 0x452821E638D01377ULL + 7;
  std::set<uint64_t> seen;
  std::vector<VertexSet> out;
  for (int trial = 0; trial < cfg.sample_budget; ++trial) {
    double pick = unit_draw(state);
    double acc = 0;
    uint64_t basis = 0;
    for (Eigen::Index k = 0; k < p.vectors.rows(); ++k) {
      acc += p.vectors(k, 0) * p.vectors(k, 0);
      if (acc >= pick) {
        basis = static_cast<uint64_t>(k);
        break;
      }
    }
    VertexSet s = basis_to_set(basis, g.n);
    if (!is_maximal_independent(g, s)) continue;
    if (seen.insert(s.bits).second) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<VertexSet> sample_local_minima(const WeightedGraph& g, const PipelineConfig& cfg) {
  auto sets = cfg.sampler == PipelineConfig::Sampler::AmplitudePreAc ? sample_mode_a(g, cfg)
                                                                     : sample_mode_b(g, cfg);
  std::vector<VertexSet> maximal;
  for (const auto& s : sets)
    if (is_maximal_independent(g, s)) maximal.push_back(s);
  return maximal;
}

IcDiscovery discover_ic(const WeightedGraph& g, const std::vector<VertexSet>& sampled,
                        const PipelineConfig& cfg) {
  IcDiscovery out;
  if (sampled.empty()) {
    out.diagnostics = "no sampled local minima";
    return out;
  }
  uint64_t covered = 0;
  for (const auto& s : sampled) covered |= s.bits;

  // connected components of the induced subgraph seed the partial cliques
  std::vector<int> comp(g.n, -1);
  int ncomp = 0;
  for (int v = 0; v < g.n; ++v) {
    if (!((covered >> v) & 1ULL) || comp[v] >= 0) continue;
    std::vector<int> stack{v};
    comp[v] = ncomp;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (uint64_t b = g.adj[u] & covered; b; b &= b - 1) {
        int w = __builtin_ctzll(b);
        if (comp[w] < 0) {
          comp[w] = ncomp;
          stack.push_back(w);
        }
      }
    }
    ++ncomp;
  }

  // partites within a component: greedy independence classes
  ICStructure ic;
  ic.cliques.resize(ncomp);
  for (int c = 0; c < ncomp; ++c) {
    for (int v = 0; v < g.n; ++v) {
      if (comp[v] != c) continue;
      bool placed = false;
      for (auto& part : ic.cliques[c]) {
        if ((g.adj[v] & part.bits) == 0) {
          part.add(v);
          placed = true;
          break;
        }
      }
      if (!placed) ic.cliques[c].push_back(VertexSet::of({v}));
    }
  }

  auto clique_bits = [&](size_t c) {
    uint64_t bits = 0;
    for (const auto& p : ic.cliques[c]) bits |= p.bits;
    return bits;
  };
  auto mean_partite_weight = [&](size_t c) {
    double sum = 0;
    for (const auto& p : ic.cliques[c]) sum += g.weight_of(p).to_double();
    return sum / double(ic.cliques[c].size());
  };

  // greedy extension with similar-weight adjacent vertices that stay
  // independent of every other clique
  bool grew = true;
  while (grew) {
    grew = false;
    for (size_t c = 0; c < ic.cliques.size(); ++c) {
      uint64_t mine = clique_bits(c);
      uint64_t others = 0;
      for (size_t o = 0; o < ic.cliques.size(); ++o)
        if (o != c) others |= clique_bits(o);
      double ref = mean_partite_weight(c);
      for (int v = 0; v < g.n; ++v) {
        if ((mine >> v) & 1ULL || (others >> v) & 1ULL) continue;
        if ((g.adj[v] & mine) == 0) continue;          // must attach to the clique
        if (g.adj[v] & others) continue;               // must stay independent of the rest
        double w = g.weights[v].to_double();
        if (std::abs(w - ref) > cfg.weight_tolerance * ref) continue;
        // join an existing partite when independent of it but adjacent to all
        // the others; else open a new partite adjacent to every partite
        bool placed = false;
        for (auto& part : ic.cliques[c]) {
          if (g.adj[v] & part.bits) continue;
          bool adj_all_others = true;
          for (const auto& other : ic.cliques[c]) {
            if (&other == &part) continue;
            if ((g.adj[v] & other.bits) == 0) adj_all_others = false;
          }
          if (adj_all_others) {
            part.add(v);
            placed = true;
            break;
          }
        }
        if (!placed) {
          bool adj_all = true;
          for (const auto& part : ic.cliques[c])
            if ((g.adj[v] & part.bits) == 0) adj_all = false;
          if (adj_all) {
            ic.cliques[c].push_back(VertexSet::of({v}));
            placed = true;
          }
        }
        if (placed) {
          mine = clique_bits(c);
          grew = true;
        }
      }
    }
  }

  // prune vertices adjacent across cliques until the cliques are independent
  bool pruned = true;
  while (pruned) {
    pruned = false;
    for (size_t c = 0; c < ic.cliques.size() && !pruned; ++c) {
      uint64_t others = 0;
      for (size_t o = 0; o < ic.cliques.size(); ++o)
        if (o != c) others |= clique_bits(o);
      for (auto& part : ic.cliques[c]) {
        for (uint64_t b = part.bits; b; b &= b - 1) {
          int v = __builtin_ctzll(b);
          if (g.adj[v] & others) {
            part.remove(v);
            pruned = true;
          }
        }
      }
      auto& parts = ic.cliques[c];
      parts.erase(std::remove_if(parts.begin(), parts.end(),
                                 [](const VertexSet& p) { return p.empty(); }),
                  parts.end());
    }
    ic.cliques.erase(std::remove_if(ic.cliques.begin(), ic.cliques.end(),
                                    [](const auto& c) { return c.empty(); }),
                     ic.cliques.end());
  }

  ic.recompute_cover();
  if (ic.cliques.empty()) {
    out.diagnostics = "pruning removed every clique";
    return out;
  }
  std::string err = ic.validate(g);
  if (!err.empty()) {
    out.diagnostics = "inconsistent IC: " + err;
    return out;
  }
  out.ok = true;
  out.ic = std::move(ic);
  return out;
}

std::vector<std::pair<int, int>> driver_graph_from_ic(const WeightedGraph& g,
                                                      const ICStructure& ic) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& clique : ic.cliques) {
    for (size_t a = 0; a < clique.size(); ++a)
      for (size_t b = a + 1; b < clique.size(); ++b)
        for (uint64_t ba = clique[a].bits; ba; ba &= ba - 1) {
          int u = __builtin_ctzll(ba);
          for (uint64_t bb = clique[b].bits & g.adj[u]; bb; bb &= bb - 1)
            edges.emplace_back(std::min(u, __builtin_ctzll(bb)),
                               std::max(u, __builtin_ctzll(bb)));
        }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<VertexSet> greedy_clique_cover(const WeightedGraph& g) {
  std::vector<VertexSet> cover;
  uint64_t remaining = g.all_mask();
  while (remaining) {
    // seed with the heaviest uncovered vertex
    int seed = -1;
    for (uint64_t b = remaining; b; b &= b - 1) {
      int v = __builtin_ctzll(b);
      if (seed < 0 || g.weights[seed] < g.weights[v]) seed = v;
    }
    VertexSet clique = VertexSet::of({seed});
    uint64_t candidates = g.adj[seed] & remaining;
    while (candidates) {
      int pick = -1;
      for (uint64_t b = candidates; b; b &= b - 1) {
        int v = __builtin_ctzll(b);
        if (pick < 0 || g.weights[pick] < g.weights[v]) pick = v;
      }
      clique.add(pick);
      candidates &= g.adj[pick] & ~(1ULL << pick);
    }
    cover.push_back(clique);
    remaining &= ~clique.bits;
  }
  return cover;
}

double estimate_jxx_range(const WeightedGraph& g, const ICStructure& ic,
                          const PipelineConfig& cfg) {
  double bound = 0;
  auto cover = greedy_clique_cover(g);
  if (cover.empty()) {
    for (const auto& w : g.weights) bound += w.to_double();
  } else {
    for (const auto& clique : cover) {
      double m = 0;
      for (int v : clique.members()) m = std::max(m, g.weights[v].to_double());
      bound += m;
    }
  }
  double mean_local = 0;
  for (const auto& clique : ic.cliques) {
    double s = 0;
    for (const auto& part : clique) s += g.weight_of(part).to_double();
    mean_local += s / double(clique.size());
  }
  // energies scale as -4x the set weight under the reduction
  double split = 4.0 * std::max(bound - mean_local, 0.0);
  double u = cfg.mu_max * split;
  if (u <= 0) u = 1.0;
  return std::min(u, cfg.hard_cap);
}

PipelineReport run_pipeline(const WeightedGraph& g, const PipelineConfig& cfg) {
  PipelineReport rep;
  IsingModel ising = qubo_to_ising(mwis_to_qubo(g, cfg.penalty));

  rep.sampled = sample_local_minima(g, cfg);
  auto consider = [&](VertexSet s) {
    if (s.empty()) return;
    VertexSet m = extend_to_maximal(g, s);
    Decimal w = g.weight_of(m);
    if (rep.best.empty() || rep.best_weight < w ||
        (w == rep.best_weight && m.bits < rep.best.bits)) {
      rep.best = m;
      rep.best_weight = w;
    }
  };
  for (const auto& s : rep.sampled) consider(s);

  auto measure = [&](const EvolutionResult& run) {
    double best_p = -1;
    uint64_t best_state = 0;
    for (Eigen::Index k = 0; k < run.final_state.size(); ++k) {
      double p = std::norm(run.final_state[k]);
      if (p > best_p) {
        VertexSet s = basis_to_set(static_cast<uint64_t>(k), g.n);
        if (is_independent(g, s)) {
          best_p = p;
          best_state = static_cast<uint64_t>(k);
        }
      }
    }
    return std::make_pair(basis_to_set(best_state, g.n), best_p);
  };

  auto disc = discover_ic(g, rep.sampled, cfg);
  rep.ic_found = disc.ok;
  rep.ic_note = disc.diagnostics;
  if (disc.ok) {
    rep.ic = disc.ic;
    rep.driver_edges = driver_graph_from_ic(g, rep.ic);
  }

  if (!disc.ok || rep.driver_edges.empty()) {
    // no usable IC: plain transverse-field annealing fallback
    rep.used_fallback = true;
    SystemSpec spec{ising, DriverSpec::transverse_field()};
    AnnealPath path = AnnealPath::from_system(spec);
    for (double tf : cfg.tf_list) {
      JxxOutcome oc;
      oc.jxx = 0.0;
      oc.tf = tf;
      try {
        auto run = evolve(path, tf, cfg.integrator);
        auto [set, prob] = measure(run);
        oc.best_set = extend_to_maximal(g, set);
        oc.best_weight = g.weight_of(oc.best_set);
        oc.probability = prob;
        consider(oc.best_set);
      } catch (const std::exception& e) {
        oc.error = e.what();
      }
      rep.outcomes.push_back(std::move(oc));
    }
  } else {
    rep.jxx_upper = estimate_jxx_range(g, rep.ic, cfg);
    for (int i = 1; i <= cfg.jxx_samples; ++i) {
      double jxx = rep.jxx_upper * double(i) / double(cfg.jxx_samples);
      SystemSpec spec{ising, DriverSpec::catalyst(jxx, rep.driver_edges)};
      AnnealPath path = AnnealPath::from_system(spec);
      for (double tf : cfg.tf_list) {
        JxxOutcome oc;
        oc.jxx = jxx;
        oc.tf = tf;
        try {
          auto run = evolve(path, tf, cfg.integrator);
          auto [set, prob] = measure(run);
          oc.best_set = extend_to_maximal(g, set);
          oc.best_weight = g.weight_of(oc.best_set);
          oc.probability = prob;
          consider(oc.best_set);
        } catch (const std::exception& e) {
          oc.error = e.what();
        }
        rep.outcomes.push_back(std::move(oc));
      }
    }
  }

  if (g.n <= 25) {
    auto [opt, w] = brute_force_mwis(g);
    (void)opt;
    rep.matches_oracle = rep.best_weight == w;
  }
  return rep;
}

}  // namespace aclab
