#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "aclab/anticross.hpp"
#include "aclab/dynamics.hpp"
#include "aclab/pipeline.hpp"

namespace aclab {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- graph / ising interchange ---------------------------------------------

/// Schema: {"n": int, "weights": [string], "edges": [[int,int]], "labels": optional}
std::string graph_to_json(const WeightedGraph& g);
WeightedGraph graph_from_json(const std::string& text);
void save_graph(const WeightedGraph& g, const std::filesystem::path& path);
WeightedGraph load_graph(const std::filesystem::path& path);

/// Schema: {"h": [...], "J": [[i,j,val]], "offset": val}
std::string ising_to_json(const IsingModel& m);
IsingModel ising_from_json(const std::string& text);

// ---- CSV exports ------------------------------------------------------------

/// Columns: s, E_0..E_{K-1}, then ov_<state> signed overlaps of the ground
/// level for each watched basis state.
std::string sweep_csv(const SpectralSweep& sw, const std::vector<uint64_t>& watch = {});

std::string scan_csv(const JxxScanResult& scan);
std::string population_csv(const EvolutionResult& run);
std::string success_csv(const DqaScanResult& scan);

/// Parse a CSV with a header row back into named numeric columns.
std::map<std::string, std::vector<double>> parse_csv(const std::string& text);

std::string ac_report_json(const AntiCrossing& ac, const PropertyReport& rep);
std::string double_ac_json(const DoubleAc& d);
std::string pipeline_report_json(const PipelineReport& rep, const WeightedGraph& g);

// ---- run manifests -----------------------------------------------------------

/// FNV-1a over the file bytes, hex string.
std::string file_hash(const std::filesystem::path& path);

/// Every command writes a manifest (resolved configuration, tool version,
/// input hashes) alongside its outputs.
std::string manifest_json(const std::string& command,
                          const std::map<std::string, std::string>& config,
                          const std::vector<std::filesystem::path>& inputs);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// gnuplot script plotting the named CSV columns.
std::string gnuplot_script(const std::string& csv_name, const std::string& title,
                           const std::vector<std::pair<int, std::string>>& columns,
                           bool logscale_y);

constexpr const char* kToolVersion = "0.1.0";

}  // namespace aclab
