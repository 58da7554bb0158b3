#include "aclab/io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace aclab {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json set_json(VertexSet s, int n) {
  json j = json::array();
  for (int v : s.members()) j.push_back(v);
  (void)n;
  return j;
}

std::string state_bits(uint64_t state, int n) {
  std::string out(n, '0');
  for (int i = 0; i < n; ++i)
    if ((state >> i) & 1ULL) out[i] = '1';
  return out;   // character i is the bit of vertex i
}

}  // namespace

std::string graph_to_json(const WeightedGraph& g) {
  json j;
  j["n"] = g.n;
  j["weights"] = json::array();
  for (const auto& w : g.weights) j["weights"].push_back(w.str());
  j["edges"] = json::array();
  for (auto [a, b] : g.edges) j["edges"].push_back(json::array({a, b}));
  if (!g.labels.empty()) j["labels"] = g.labels;
  return j.dump(2) + "\n";
}

WeightedGraph graph_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw IoError(std::string("graph JSON parse error: ") + e.what());
  }
  WeightedGraph g;
  try {
    g.n = j.at("n").get<int>();
    for (const auto& w : j.at("weights")) g.weights.push_back(Decimal::parse(w.get<std::string>()));
    for (const auto& e : j.at("edges")) g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    if (j.contains("labels")) g.labels = j["labels"].get<std::vector<std::string>>();
    g.finalize();
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError(std::string("invalid graph: ") + e.what());
  }
  return g;
}

void save_graph(const WeightedGraph& g, const std::filesystem::path& path) {
  write_text(path, graph_to_json(g));
}

WeightedGraph load_graph(const std::filesystem::path& path) {
  return graph_from_json(read_text(path));
}

std::string ising_to_json(const IsingModel& m) {
  json j;
  j["h"] = json::array();
  for (const auto& v : m.h) j["h"].push_back(v.to_double());
  j["J"] = json::array();
  for (const auto& [a, b, v] : m.coupling) j["J"].push_back(json::array({json(a), json(b), json(v.to_double())}));
  j["offset"] = m.offset.to_double();
  return j.dump(2) + "\n";
}

IsingModel ising_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw IoError(std::string("ising JSON parse error: ") + e.what());
  }
  IsingModel m;
  m.n = static_cast<int>(j.at("h").size());
  for (const auto& v : j.at("h")) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    m.h.push_back(Decimal::parse(os.str()));
  }
  for (const auto& e : j.at("J")) {
    std::ostringstream os;
    os.precision(17);
    os << e.at(2).get<double>();
    m.coupling.emplace_back(e.at(0).get<int>(), e.at(1).get<int>(), Decimal::parse(os.str()));
  }
  {
    std::ostringstream os;
    os.precision(17);
    os << j.value("offset", 0.0);
    m.offset = Decimal::parse(os.str());
  }
  m.materialize();
  return m;
}

std::string sweep_csv(const SpectralSweep& sw, const std::vector<uint64_t>& watch) {
  std::ostringstream os;
  os << "s";
  for (int k = 0; k < sw.levels(); ++k) os << ",E_" << k;
  for (uint64_t w : watch) os << ",ov_" << w;
  os << "\n";
  for (const auto& p : sw.points()) {
    os << fmt(p.s);
    for (int k = 0; k < sw.levels(); ++k) os << "," << fmt(p.energies[k]);
    for (uint64_t w : watch) os << "," << fmt(signed_overlap(p, 0, w));
    os << "\n";
  }
  return os.str();
}

std::string scan_csv(const JxxScanResult& scan) {
  std::ostringstream os;
  os << "jxx,min_gap,s_star,classification,stoquasticity\n";
  for (const auto& r : scan.records) {
    os << fmt(r.jxx) << "," << fmt(r.min_gap) << "," << fmt(r.s_star) << ","
       << (r.error.empty() ? to_string(r.cls) : "error") << "," << to_string(r.stoq) << "\n";
  }
  return os.str();
}

std::string population_csv(const EvolutionResult& run) {
  std::ostringstream os;
  int levels = 0;
  for (const auto& r : run.records) levels = std::max<int>(levels, r.level_pops.size());
  os << "s";
  for (int l = 0; l < levels; ++l) os << ",P_" << l;
  os << ",norm\n";
  for (const auto& r : run.records) {
    os << fmt(r.s);
    for (int l = 0; l < levels; ++l)
      os << "," << fmt(l < r.level_pops.size() ? r.level_pops[l] : 0.0);
    os << "," << fmt(r.norm) << "\n";
  }
  return os.str();
}

std::string success_csv(const DqaScanResult& scan) {
  std::ostringstream os;
  os << "t_f,success\n";
  for (const auto& row : scan.table) os << fmt(row.tf) << "," << fmt(row.success) << "\n";
  return os.str();
}

std::map<std::string, std::vector<double>> parse_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty CSV");
  std::vector<std::string> names;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) names.push_back(cell);
  }
  std::map<std::string, std::vector<double>> cols;
  std::vector<std::vector<double>*> ptrs;
  for (const auto& nm : names) ptrs.push_back(&cols[nm]);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    size_t i = 0;
    while (std::getline(ls, cell, ',')) {
      if (i >= ptrs.size()) throw IoError("ragged CSV row");
      try {
        ptrs[i]->push_back(std::stod(cell));
      } catch (const std::exception&) {
        ptrs[i]->push_back(std::numeric_limits<double>::quiet_NaN());
      }
      ++i;
    }
    if (i != ptrs.size()) throw IoError("ragged CSV row");
  }
  return cols;
}

namespace {

json ac_json(const AntiCrossing& ac, int n) {
  json j;
  j["s_x"] = ac.s_x;
  j["delta"] = ac.delta;
  j["gamma"] = ac.gamma;
  j["gap"] = ac.gap;
  j["sign_pattern"] = ac.sign_pattern == +1 ? "L-same/R-opposite"
                      : ac.sign_pattern == -1 ? "L-opposite/R-same"
                                              : "undetermined";
  j["separation"] = std::isfinite(ac.separation) ? json(ac.separation) : json("inf");
  j["exchange_defect"] = ac.exchange_defect;
  j["weak"] = ac.weak;
  j["ac_distance"] = ac.ac_distance;
  j["L"] = json::array();
  j["R"] = json::array();
  j["L_sets"] = json::array();
  j["R_sets"] = json::array();
  for (uint64_t s : ac.L) {
    j["L"].push_back(state_bits(s, n));
    j["L_sets"].push_back(set_json(basis_to_set(s, n), n));
  }
  for (uint64_t s : ac.R) {
    j["R"].push_back(state_bits(s, n));
    j["R_sets"].push_back(set_json(basis_to_set(s, n), n));
  }
  return j;
}

}  // namespace

std::string ac_report_json(const AntiCrossing& ac, const PropertyReport& rep) {
  // infer a wide-enough n from the largest arm state index
  uint64_t top = 1;
  for (uint64_t s : ac.L) top = std::max(top, s);
  for (uint64_t s : ac.R) top = std::max(top, s);
  int n = 1;
  while ((uint64_t(1) << n) <= top) ++n;
  json j = ac_json(ac, n);
  json p;
  p["c1"] = {{"alpha_formula", rep.alpha_formula},
             {"alpha_fit_ground", rep.alpha_fit_ground},
             {"alpha_fit_excited", rep.alpha_fit_excited},
             {"rel_err", rep.c1_rel_err},
             {"pass", rep.c1_pass}};
  p["c2"] = {{"violations", rep.c2_violations}, {"pass", rep.c2_pass}};
  p["c3"] = {{"pattern", rep.c3_pattern}, {"pass", rep.c3_pass}};
  p["c4"] = {{"residual", rep.c4_residual},
             {"drift_residual", rep.drift_residual},
             {"pass", rep.c4_pass}};
  p["necessary_conditions"] = {{"eta", rep.necc.eta},
                               {"rhs", rep.necc.rhs},
                               {"lhs_before", rep.necc.lhs_before},
                               {"lhs_after", rep.necc.lhs_after},
                               {"resid_before", rep.necc.resid_before},
                               {"resid_after", rep.necc.resid_after},
                               {"ordering_before", rep.necc.ordering_before},
                               {"ordering_after", rep.necc.ordering_after},
                               {"pass", rep.necc_pass}};
  p["gap_formula"] = {{"est_before", rep.gap_formula.est_before},
                      {"est_after", rep.gap_formula.est_after},
                      {"eigengap", rep.gap_formula.eigengap},
                      {"pass", rep.gap_formula_pass}};
  j["property_report"] = p;
  return j.dump(2) + "\n";
}

std::string double_ac_json(const DoubleAc& d) {
  uint64_t top = 1;
  for (uint64_t s : d.common_arm) top = std::max(top, s);
  for (uint64_t s : d.first.L) top = std::max(top, s);
  for (uint64_t s : d.first.R) top = std::max(top, s);
  int n = 1;
  while ((uint64_t(1) << n) <= top) ++n;
  json j;
  j["first"] = ac_json(d.first, n);
  j["second"] = ac_json(d.second, n);
  j["s1"] = d.s1;
  j["s2"] = d.s2;
  j["min_delta21"] = d.min_delta21;
  j["xx_couplers_cross"] = d.xx_couplers_cross;
  j["bridge_pnstoq"] = d.bridge_pnstoq;
  j["bridge_excited_on_r"] = d.bridge_excited_on_r;
  j["bridge_plus"] = json::array();
  j["bridge_minus"] = json::array();
  for (uint64_t s : d.bridge_plus) j["bridge_plus"].push_back(state_bits(s, n));
  for (uint64_t s : d.bridge_minus) j["bridge_minus"].push_back(state_bits(s, n));
  return j.dump(2) + "\n";
}

std::string pipeline_report_json(const PipelineReport& rep, const WeightedGraph& g) {
  json j;
  j["sampled"] = json::array();
  for (const auto& s : rep.sampled) j["sampled"].push_back(set_json(s, g.n));
  j["ic_found"] = rep.ic_found;
  if (!rep.ic_note.empty()) j["ic_note"] = rep.ic_note;
  if (rep.ic_found) {
    json cl = json::array();
    for (const auto& c : rep.ic.cliques) {
      json parts = json::array();
      for (const auto& p : c) parts.push_back(set_json(p, g.n));
      cl.push_back(parts);
    }
    j["ic"] = cl;
  }
  j["driver_edges"] = json::array();
  for (auto [a, b] : rep.driver_edges) j["driver_edges"].push_back(json::array({a, b}));
  j["jxx_upper"] = rep.jxx_upper;
  j["outcomes"] = json::array();
  for (const auto& oc : rep.outcomes) {
    json o;
    o["jxx"] = oc.jxx;
    o["tf"] = oc.tf;
    if (oc.error.empty()) {
      o["best_set"] = set_json(oc.best_set, g.n);
      o["weight"] = oc.best_weight.str();
      o["probability"] = oc.probability;
    } else {
      o["error"] = oc.error;
    }
    j["outcomes"].push_back(o);
  }
  j["best"] = set_json(rep.best, g.n);
  j["best_weight"] = rep.best_weight.str();
  j["used_fallback"] = rep.used_fallback;
  if (rep.matches_oracle) j["matches_oracle"] = *rep.matches_oracle;
  return j.dump(2) + "\n";
}

std::string file_hash(const std::filesystem::path& path) {
  std::string data = read_text(path);
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[24];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string manifest_json(const std::string& command,
                          const std::map<std::string, std::string>& config,
                          const std::vector<std::filesystem::path>& inputs) {
  json j;
  j["tool"] = "aclab";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["config"] = config;
  json in = json::object();
  for (const auto& p : inputs) in[p.string()] = file_hash(p);
  j["inputs"] = in;
  return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << text;
  if (!os) throw IoError("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string gnuplot_script(const std::string& csv_name, const std::string& title,
                           const std::vector<std::pair<int, std::string>>& columns,
                           bool logscale_y) {
  std::ostringstream os;
  os << "set datafile separator ','\n";
  os << "set key autotitle columnhead\n";
  os << "set title '" << title << "'\n";
  if (logscale_y) os << "set logscale y\n";
  os << "plot ";
  for (size_t i = 0; i < columns.size(); ++i) {
    if (i) os << ", ";
    os << "'" << csv_name << "' using 1:" << columns[i].first << " with lines title '"
       << columns[i].second << "'";
  }
  os << "\n";
  return os.str();
}

}  // namespace aclab
