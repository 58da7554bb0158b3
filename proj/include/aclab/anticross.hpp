#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aclab/spectral.hpp"

namespace aclab {

/// Acceptance thresholds for the anti-crossing detectors.  gamma bounds the
/// mass allowed outside the two arms (mass convention: arms carry >= 1-gamma),
/// corner_min is the minimum corner overlap, sep_factor the required
/// level separation Delta_20/Delta_10 at the crossing point, eps_v the
/// full-exchange tolerance, amp_floor the amplitude floor for sign checks.
struct AcThresholds {
  double gamma = 0.2;
  double corner_min = 0.8;
  double sep_factor = 10.0;
  double eps_v = 0.1;
  int arm_cap = 64;
  double amp_floor = 1e-3;
  double sas_eps = 0.05;
  double c1_tol = 0.1;
  double necc_tol = 0.2;
  double window_cap = 0.25;   // widest half-window considered
};

struct ExchangeSample {
  double s;
  double l0, r0, l1, r1;   // projection masses per level
};

struct AntiCrossing {
  double s_x = 0.0;
  double delta = 0.0;        // width from the corner-overlap rule
  double gamma = 0.0;        // achieved mass deficiency
  double gap = 0.0;          // Delta_10(s_x)
  std::vector<uint64_t> L;   // arm occupied by the ground level before s_x
  std::vector<uint64_t> R;   // arm occupied by the first excited level before s_x
  int sign_pattern = 0;      // +1: L same-sign / R opposite; -1: reverse
  double separation = 0.0;   // Delta_20/Delta_10 at s_x (inf when k < 3)
  double exchange_defect = 0.0;   // eps_v achieved by the full-exchange test
  bool weak = false;              // exchange defect above thresholds.eps_v
  int ac_distance = 0;
  std::vector<ExchangeSample> exchange_curves;
};

struct DoubleAc {
  AntiCrossing first;    // AC(R-side, L) at s1
  AntiCrossing second;   // AC(L, R-side) at s2
  std::vector<uint64_t> bridge_plus, bridge_minus;   // split of the common arm
  std::vector<uint64_t> common_arm;
  double min_delta21 = 0.0;        // min of Delta_21 over [s1, s2]
  bool xx_couplers_cross = false;  // every driver coupler inside the arm links L+ to L-
  bool bridge_pnstoq = false;      // mixed ground-state signs across the bridge
  bool bridge_excited_on_r = false;
  double s1 = 0.0, s2 = 0.0;
};

struct NeccResult {
  double eta = 0.0;          // <E1|dH/ds|E0> at s_x
  double rhs = 0.0;          // 2 eta^2 delta / Delta_10(s_x)
  double lhs_before = 0.0;   // <dH>_{E0(s-)} - <dH>_{E1(s-)}
  double lhs_after = 0.0;    // <dH>_{E1(s+)} - <dH>_{E0(s+)}
  double resid_before = 0.0, resid_after = 0.0;
  bool ordering_before = false, ordering_after = false;   // projected-arm orderings
};

struct GapEstimate {
  double est_before = 0.0, est_after = 0.0;
  double eigengap = 0.0;
  bool applicable_before = true, applicable_after = true;
};

struct PropertyReport {
  // C1: opposite parabolas with curvature alpha = eta^2 / Delta_10(s_x)
  double alpha_formula = 0.0;
  double alpha_fit_ground = 0.0, alpha_fit_excited = 0.0;
  double c1_rel_err = 0.0;
  bool c1_pass = false;
  // C2: monotone mass exchange across the window
  int c2_violations = 0;
  bool c2_pass = false;
  // C3: one arm same-sign, the other opposite-sign
  int c3_pattern = 0;
  bool c3_pass = false;
  // C4: symmetry-and-anti-symmetry at s_x, plus the first-order drift check
  double c4_residual = 0.0;
  bool c4_pass = false;
  double drift_residual = 0.0;
  // necessary conditions and the AC-gap formula
  NeccResult necc;
  bool necc_pass = false;
  GapEstimate gap_formula;
  bool gap_formula_pass = false;
};

struct ArmSearchResult {
  bool ok = false;
  std::string reason;
  AntiCrossing ac;
};

/// Interior local minima of Delta_10 (refined by the sweep).
std::vector<std::pair<double, double>> find_gap_minima(const SpectralSweep& sw);

/// Locate the two arms of a candidate anti-crossing at gap minimum s_star.
/// Fails with "no AC structure" when no window satisfies the exchange.
ArmSearchResult find_arms(SpectralSweep& sw, double s_star, const AcThresholds& th = {});

/// Width maximizing the smallest of the four corner overlaps.
double ac_width(SpectralSweep& sw, double s_x, const std::vector<uint64_t>& L,
                const std::vector<uint64_t>& R, const AcThresholds& th = {});

PropertyReport check_properties(SpectralSweep& sw, const AntiCrossing& ac,
                                const AcThresholds& th = {});

NeccResult necessary_conditions(SpectralSweep& sw, const AntiCrossing& ac);

GapEstimate gap_estimate_corollary(SpectralSweep& sw, const AntiCrossing& ac);

/// All qualifying anti-crossings of the sweep (one attempt per gap minimum).
std::vector<AntiCrossing> detect_anticrossings(SpectralSweep& sw, const AcThresholds& th = {});

std::optional<DoubleAc> detect_double_ac(SpectralSweep& sw, const AcThresholds& th = {});

enum class AcClass { NoAc, SingleAc, DoubleAcFound, MultiLevel };
std::string to_string(AcClass c);

struct JxxRecord {
  double jxx = 0.0;
  double min_gap = 0.0;
  double s_star = 0.0;
  AcClass cls = AcClass::NoAc;
  bool weak_only = false;
  StoqClass stoq = StoqClass::Stoquastic;
  std::string error;   // nonempty when this grid point failed
};

struct JxxScanResult {
  std::vector<JxxRecord> records;
  double j_transition = std::numeric_limits<double>::quiet_NaN();
  double j_merge = std::numeric_limits<double>::quiet_NaN();
  double j_split = std::numeric_limits<double>::quiet_NaN();
  double j_double = std::numeric_limits<double>::quiet_NaN();
  bool estoq_gap_monotone = false;
};

struct JxxScanOptions {
  int k = 3;
  int grid_points = 201;
  double bisect_tol = 1e-3;
  bool bisect_criticals = true;
  bool band_detection = false;
  AcThresholds thresholds;
  SweepOptions sweep;
};

JxxScanResult scan_jxx(const IsingModel& problem, const std::vector<std::pair<int, int>>& edges,
                       const std::vector<double>& jxx_grid, const JxxScanOptions& opts = {});

struct BandRecord {
  double s1 = 0.0, s2 = 0.0;
  int band_top_level = 0;
  double max_in_band_gap = 0.0;
  double floor_gap_above = 0.0;
};

/// Interval where levels 1..m collapse onto the ground level while level m+1
/// stays separated.
std::optional<BandRecord> multi_level_band(const SpectralSweep& sw, double band_tol = 1e-6,
                                           double floor_above = 0.01, double min_span = 0.02);

struct DecayProfile {
  std::vector<int> distance;
  std::vector<double> envelope;   // max |amplitude| at that driver distance
  double slope = 0.0;
  double r2 = 0.0;
  bool flat = false;
};

DecayProfile coefficient_decay_profile(const EigenPoint& p, const SystemSpec& spec,
                                       const std::vector<uint64_t>& L,
                                       const std::vector<uint64_t>& R);

struct ScalingFit {
  double slope = 0.0;       // d log(gap) / d distance
  double zeta = 1.0;        // exp(slope)
  double r2 = 0.0;
  int points_used = 0;
  std::vector<int> excluded;   // indices of instances without a detected AC
};

ScalingFit gap_scaling_fit(const std::vector<std::pair<int, double>>& dist_gap);

/// Low-energy neighboring states: driver neighbors of A whose problem energy
/// is at or below the threshold.
std::vector<uint64_t> lens(const SystemSpec& spec, const std::vector<uint64_t>& a,
                           double threshold);

}  // namespace aclab
