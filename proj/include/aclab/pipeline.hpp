#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aclab/anticross.hpp"
#include "aclab/dynamics.hpp"

namespace aclab {

struct PipelineConfig {
  enum class Sampler { AmplitudePreAc, GreedyRandom } sampler = Sampler::AmplitudePreAc;
  int sample_budget = 200;
  double keep_fraction = 0.85;    // GreedyRandom keeps sets above this fraction of the best
  double weight_tolerance = 0.15; // relative similarity for IC extension
  int jxx_samples = 12;
  double mu_max = 1.0;            // multiplier on the energy split for the J_xx upper bound
  double hard_cap = 4.0;
  std::vector<double> tf_list{30.0, 90.0};
  IntegratorConfig integrator{IntegratorConfig::Kind::Split, 1e-9, 1e-12, 2e-5};
  uint64_t seed = 1234;
  Decimal penalty = Decimal(4);
  AcThresholds thresholds;
};

struct JxxOutcome {
  double jxx = 0.0;
  double tf = 0.0;
  VertexSet best_set;
  Decimal best_weight;
  double probability = 0.0;   // final probability of the measured state
  std::string error;
};

struct PipelineReport {
  std::vector<VertexSet> sampled;
  bool ic_found = false;
  std::string ic_note;
  ICStructure ic;
  std::vector<std::pair<int, int>> driver_edges;
  double jxx_upper = 0.0;
  std::vector<JxxOutcome> outcomes;
  VertexSet best;
  Decimal best_weight;
  bool used_fallback = false;
  std::optional<bool> matches_oracle;   // set when the brute-force oracle ran
};

/// Classical surrogates for the adiabatic local-minima sampler: mode
/// AmplitudePreAc samples the pre-crossing ground distribution of the
/// transverse-field sweep; mode GreedyRandom repeats a weight-biased greedy
/// maximal-set construction.  Returns maximal independent sets only.
std::vector<VertexSet> sample_local_minima(const WeightedGraph& g, const PipelineConfig& cfg);

struct IcDiscovery {
  bool ok = false;
  std::string diagnostics;
  ICStructure ic;
};

/// Greedy independent-cliques reconstruction from sampled local minima:
/// seed partial cliques from the induced subgraph, extend with similar-weight
/// adjacent vertices independent of the other cliques, prune boundary
/// vertices adjacent across cliques.
IcDiscovery discover_ic(const WeightedGraph& g, const std::vector<VertexSet>& sampled,
                        const PipelineConfig& cfg);

/// All intra-clique inter-partite edges present in the problem graph.
std::vector<std::pair<int, int>> driver_graph_from_ic(const WeightedGraph& g,
                                                      const ICStructure& ic);

/// Upper bound on the coupler strength from a greedy weighted clique cover
/// (bounds the optimum) and the IC's mean local weight.
double estimate_jxx_range(const WeightedGraph& g, const ICStructure& ic,
                          const PipelineConfig& cfg);

/// Greedy weighted clique cover; the sum of per-clique maxima bounds the
/// MWIS weight from above.
std::vector<VertexSet> greedy_clique_cover(const WeightedGraph& g);

PipelineReport run_pipeline(const WeightedGraph& g, const PipelineConfig& cfg);

}  // namespace aclab
