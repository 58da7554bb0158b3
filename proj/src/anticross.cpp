#include "aclab/anticross.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace aclab {

namespace {

double mass_on(const EigenPoint& p, int level, const std::vector<uint64_t>& set) {
  double m = 0;
  for (uint64_t x : set) {
    double c = p.vectors(static_cast<Eigen::Index>(x), level);
    m += c * c;
  }
  return m;
}

/// Smallest state set carrying >= target of the level's mass, by descending
/// amplitude, skipping `exclude`; empty result when the cap is hit first.
std::vector<uint64_t> greedy_arm(const EigenPoint& p, int level, double target, int cap,
                                 const std::set<uint64_t>& exclude) {
  std::vector<std::pair<double, uint64_t>> amps;
  const auto d = p.vectors.rows();
  amps.reserve(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    double c = p.vectors(k, level);
    amps.emplace_back(c * c, static_cast<uint64_t>(k));
  }
  std::sort(amps.begin(), amps.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<uint64_t> arm;
  double mass = 0;
  for (const auto& [a, k] : amps) {
    if (exclude.count(k)) continue;
    arm.push_back(k);
    mass += a;
    if (mass >= target) break;
    if (static_cast<int>(arm.size()) >= cap) break;
  }
  if (mass < target) return {};
  std::sort(arm.begin(), arm.end());
  return arm;
}

struct WindowPoints {
  size_t at, lo, hi;   // indices into the sweep for s_x, s_x - xi, s_x + xi
};

double quad_fit_curvature(const std::vector<double>& u, const std::vector<double>& y) {
  // least squares y = c0 + c1 u + c2 u^2, returns c2
  Eigen::MatrixXd a(u.size(), 3);
  Eigen::VectorXd b(u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = u[i];
    a(i, 2) = u[i] * u[i];
    b(i) = y[i];
  }
  Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  return c[2];
}

void linear_fit(const std::vector<double>& x, const std::vector<double>& y, double& slope,
                double& intercept, double& r2) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-30) {
    slope = 0;
    intercept = sy / n;
    r2 = 0;
    return;
  }
  slope = (n * sxy - sx * sy) / den;
  intercept = (sy - slope * sx) / n;
  double ss_tot = 0, ss_res = 0, mean = sy / n;
  for (size_t i = 0; i < x.size(); ++i) {
    double fit = intercept + slope * x[i];
    ss_tot += (y[i] - mean) * (y[i] - mean);
    ss_res += (y[i] - fit) * (y[i] - fit);
  }
  r2 = ss_tot > 1e-30 ? 1.0 - ss_res / ss_tot : 0.0;
}

double cross_expectation(const SparseOperator& op, const Vector& bra, const Vector& ket) {
  return bra.dot(op.apply(ket));
}

}  // namespace

std::vector<std::pair<double, double>> find_gap_minima(const SpectralSweep& sw) {
  if (sw.levels() < 2) throw std::invalid_argument("gap minima need k >= 2");
  return gap_curve(sw, 1, 0).interior_minima;
}

ArmSearchResult find_arms(SpectralSweep& sw, double s_star, const AcThresholds& th) {
  ArmSearchResult res;
  size_t istar = sw.ensure_point(s_star);
  double sx = sw.point(istar).s;
  double gap0 = sw.point(istar).energies[1] - sw.point(istar).energies[0];

  // cap the window at (most of) the distance to the neighboring gap minima
  double cap = th.window_cap;
  for (auto [ms, mg] : find_gap_minima(sw)) {
    (void)mg;
    double dist = std::abs(ms - sx);
    if (dist > 1e-9) cap = std::min(cap, 0.75 * dist);
  }
  cap = std::min({cap, sx, 1.0 - sx});

  double base = std::max(sw.options().refine_ds, 1e-5);
  std::vector<double> offsets;
  for (double xi = base; xi <= cap; xi *= 2) offsets.push_back(xi);
  if (offsets.empty()) {
    res.reason = "no AC structure: window collapsed at the domain edge";
    return res;
  }
  for (double xi : offsets) {
    sw.ensure_point(sx - xi);
    sw.ensure_point(sx + xi);
  }

  const double target = 1.0 - th.gamma;
  std::vector<uint64_t> armL, armR;
  double delta0 = 0;
  for (double xi : offsets) {
    const auto& pm = sw.point(sw.nearest_index(sx - xi));
    const auto& pp = sw.point(sw.nearest_index(sx + xi));
    auto l = greedy_arm(pm, 0, target, th.arm_cap, {});
    if (l.empty()) continue;
    auto r = greedy_arm(pm, 1, target, th.arm_cap, std::set<uint64_t>(l.begin(), l.end()));
    if (r.empty()) continue;
    if (mass_on(pp, 0, r) >= target && mass_on(pp, 1, l) >= target) {
      armL = std::move(l);
      armR = std::move(r);
      delta0 = xi;
      break;
    }
  }
  if (armL.empty()) {
    res.reason = "no AC structure: exchange condition unmet at every window";
    return res;
  }

  AntiCrossing ac;
  ac.s_x = sx;
  ac.gap = gap0;
  ac.L = armL;
  ac.R = armR;
  ac.delta = ac_width(sw, sx, armL, armR, th);
  if (ac.delta <= 0) ac.delta = delta0;

  // Window diagnostics; when the corner-overlap width is too generous for
  // the mass conditions, shrink toward the smallest exchanging window.
  std::string window_fail;
  while (true) {
    window_fail.clear();
    ac.exchange_curves.clear();
    size_t ilo = sw.nearest_index(sx - ac.delta);
    size_t ihi = sw.nearest_index(sx + ac.delta);
    double min_mass = 1.0;
    for (size_t i = ilo; i <= ihi; ++i) {
      const auto& p = sw.point(i);
      ExchangeSample e{p.s, mass_on(p, 0, ac.L), mass_on(p, 0, ac.R), mass_on(p, 1, ac.L),
                       mass_on(p, 1, ac.R)};
      ac.exchange_curves.push_back(e);
      min_mass = std::min({min_mass, e.l0 + e.r0, e.l1 + e.r1});
      if (p.energies[1] - p.energies[0] < gap0 - 1e-12)
        window_fail = "no AC structure: gap not minimal at the crossing point";
    }
    double corner =
        std::min({mass_on(sw.point(ilo), 0, ac.L), mass_on(sw.point(ilo), 1, ac.R),
                  mass_on(sw.point(ihi), 0, ac.R), mass_on(sw.point(ihi), 1, ac.L)});
    ac.gamma = 1.0 - std::min(min_mass, corner);
    if (window_fail.empty() && corner < th.corner_min)
      window_fail = "no AC structure: corner overlaps below threshold";
    if (window_fail.empty() && ac.gamma > th.gamma)
      window_fail = "no AC structure: window mass outside arms exceeds gamma";
    if (window_fail.empty()) break;
    if (ac.delta <= 2 * base) {
      res.reason = window_fail;
      return res;
    }
    ac.delta = std::max(ac.delta / 2, 2 * base);
    sw.ensure_point(sx - ac.delta);
    sw.ensure_point(sx + ac.delta);
  }

  const auto& ps = sw.point(istar);
  if (sw.levels() >= 3)
    ac.separation = (ps.energies[2] - ps.energies[0]) / std::max(gap0, 1e-300);
  else
    ac.separation = std::numeric_limits<double>::infinity();
  if (ac.separation < th.sep_factor) {
    res.reason = "no AC structure: second level too close (separation factor)";
    return res;
  }

  // full-exchange defect, Eq.-style: |c_k(s-)| vs |d_k(s+)| on L, mirrored on R
  const auto& pm = sw.point(sw.nearest_index(sx - ac.delta));
  const auto& pp = sw.point(sw.nearest_index(sx + ac.delta));
  double defect = 0;
  for (uint64_t k : ac.L)
    defect = std::max(defect, std::abs(std::abs(pm.vectors(k, 0)) - std::abs(pp.vectors(k, 1))));
  for (uint64_t k : ac.R)
    defect = std::max(defect, std::abs(std::abs(pp.vectors(k, 0)) - std::abs(pm.vectors(k, 1))));
  ac.exchange_defect = defect;
  ac.weak = defect > th.eps_v;

  // sign pattern at s_x
  int votes_l = 0, votes_r = 0;
  for (uint64_t k : ac.L) {
    double c = ps.vectors(k, 0), d = ps.vectors(k, 1);
    if (std::abs(c) >= th.amp_floor && std::abs(d) >= th.amp_floor)
      votes_l += (c * d > 0) ? 1 : -1;
  }
  for (uint64_t k : ac.R) {
    double c = ps.vectors(k, 0), d = ps.vectors(k, 1);
    if (std::abs(c) >= th.amp_floor && std::abs(d) >= th.amp_floor)
      votes_r += (c * d > 0) ? 1 : -1;
  }
  if (votes_l > 0 && votes_r < 0)
    ac.sign_pattern = +1;
  else if (votes_l < 0 && votes_r > 0)
    ac.sign_pattern = -1;

  SystemSpec spec = sw.spec();
  ac.ac_distance = dist_hd(spec, ac.L, ac.R);

  res.ok = true;
  res.ac = std::move(ac);
  return res;
}

double ac_width(SpectralSweep& sw, double s_x, const std::vector<uint64_t>& L,
                const std::vector<uint64_t>& R, const AcThresholds& th) {
  if (L.empty() || R.empty()) throw std::invalid_argument("ac_width needs both arms");
  for (uint64_t x : L)
    if (std::binary_search(R.begin(), R.end(), x))
      throw std::invalid_argument("arms must be disjoint");
  double cap = std::min({th.window_cap, s_x, 1.0 - s_x});
  if (cap <= 0) throw std::invalid_argument("window exceeds [0,1]");
  double base = std::max(sw.options().refine_ds, 1e-5);

  auto min_corner = [&](double xi) {
    const auto& pm = sw.point(sw.ensure_point(s_x - xi));
    const auto& pp = sw.point(sw.ensure_point(s_x + xi));
    return std::min({mass_on(pm, 0, L), mass_on(pm, 1, R), mass_on(pp, 0, R), mass_on(pp, 1, L)});
  };

  std::vector<double> xs;
  for (double xi = base; xi <= cap; xi *= 2) xs.push_back(xi);
  if (xs.empty()) xs.push_back(cap);
  double best_val = -1;
  for (double xi : xs) best_val = std::max(best_val, min_corner(xi));
  // The corner overlaps plateau once the exchange completes; take the
  // smallest width on the plateau.
  const double plateau = best_val - 1e-3;
  double best_xi = xs.back();
  for (size_t i = 0; i < xs.size(); ++i) {
    if (min_corner(xs[i]) >= plateau) {
      double lo = i > 0 ? xs[i - 1] : xs[i];
      double hi = xs[i];
      for (int it = 0; it < 10 && hi - lo > 1e-5; ++it) {
        double mid = 0.5 * (lo + hi);
        (min_corner(mid) >= plateau ? hi : lo) = mid;
      }
      best_xi = hi;
      break;
    }
  }
  return best_xi;
}

NeccResult necessary_conditions(SpectralSweep& sw, const AntiCrossing& ac) {
  NeccResult out;
  const SystemSpec& spec = sw.spec();
  SparseOperator dh = build_schedule_derivative(spec, ac.s_x);
  const auto& ps = sw.point(sw.nearest_index(ac.s_x));
  const auto& pm = sw.point(sw.ensure_point(ac.s_x - ac.delta));
  const auto& pp = sw.point(sw.ensure_point(ac.s_x + ac.delta));

  out.eta = cross_expectation(dh, ps.vectors.col(1), ps.vectors.col(0));
  out.rhs = 2.0 * out.eta * out.eta * ac.delta / std::max(ac.gap, 1e-300);
  out.lhs_before = cross_expectation(dh, pm.vectors.col(0), pm.vectors.col(0)) -
                   cross_expectation(dh, pm.vectors.col(1), pm.vectors.col(1));
  out.lhs_after = cross_expectation(dh, pp.vectors.col(1), pp.vectors.col(1)) -
                  cross_expectation(dh, pp.vectors.col(0), pp.vectors.col(0));
  double scale_b = std::max(std::abs(out.lhs_before), std::abs(out.rhs));
  double scale_a = std::max(std::abs(out.lhs_after), std::abs(out.rhs));
  out.resid_before = scale_b > 0 ? std::abs(out.lhs_before - out.rhs) / scale_b : 0.0;
  out.resid_after = scale_a > 0 ? std::abs(out.lhs_after - out.rhs) / scale_a : 0.0;

  // Projected-arm orderings: <dH>_{L0,s-} > <dH>_{R1,s-} and
  // <dH>_{L1,s+} > <dH>_{R0,s+} on the unnormalized projections.
  auto project = [](const EigenPoint& p, int level, const std::vector<uint64_t>& set) {
    Vector v = Vector::Zero(p.vectors.rows());
    for (uint64_t x : set) v[x] = p.vectors(x, level);
    return v;
  };
  Vector l0 = project(pm, 0, ac.L), r1 = project(pm, 1, ac.R);
  Vector l1 = project(pp, 1, ac.L), r0 = project(pp, 0, ac.R);
  out.ordering_before = cross_expectation(dh, l0, l0) > cross_expectation(dh, r1, r1);
  out.ordering_after = cross_expectation(dh, l1, l1) > cross_expectation(dh, r0, r0);
  return out;
}

GapEstimate gap_estimate_corollary(SpectralSweep& sw, const AntiCrossing& ac) {
  NeccResult n = necessary_conditions(sw, ac);
  GapEstimate g;
  g.eigengap = ac.gap;
  double num = 2.0 * n.eta * n.eta * ac.delta;
  double tiny = 1e-12 * std::max(1.0, std::abs(num));
  g.applicable_before = std::abs(n.lhs_before) > tiny;
  g.applicable_after = std::abs(n.lhs_after) > tiny;
  if (g.applicable_before) g.est_before = num / n.lhs_before;
  if (g.applicable_after) g.est_after = num / n.lhs_after;
  return g;
}

PropertyReport check_properties(SpectralSweep& sw, const AntiCrossing& ac,
                                const AcThresholds& th) {
  PropertyReport rep;
  const SystemSpec& spec = sw.spec();
  size_t istar = sw.nearest_index(ac.s_x);
  const auto& ps = sw.point(istar);
  SparseOperator dh = build_schedule_derivative(spec, ac.s_x);
  double eta = cross_expectation(dh, ps.vectors.col(1), ps.vectors.col(0));
  rep.alpha_formula = eta * eta / std::max(ac.gap, 1e-300);

  // C1 on a micro-window where the parabolic branch dominates:
  // |2 eta lambda| <~ 0.3 Delta_10(s_x).
  double lf = std::min(ac.delta, 0.3 * ac.gap / std::max(2.0 * std::abs(eta), 1e-300));
  lf = std::max(lf, 1e-7);
  std::vector<double> us{-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> e0s, e1s;
  for (double u : us) {
    const auto& p = sw.point(sw.ensure_point(ac.s_x + u * lf));
    e0s.push_back(p.energies[0]);
    e1s.push_back(p.energies[1]);
  }
  double c2_ground = quad_fit_curvature(us, e0s) / (lf * lf);
  double c2_excited = quad_fit_curvature(us, e1s) / (lf * lf);
  rep.alpha_fit_ground = c2_ground;
  rep.alpha_fit_excited = c2_excited;
  rep.c1_rel_err =
      std::max(std::abs(-c2_ground - rep.alpha_formula), std::abs(c2_excited - rep.alpha_formula)) /
      std::max(rep.alpha_formula, 1e-300);
  rep.c1_pass = c2_ground < 0 && c2_excited > 0 && rep.c1_rel_err <= th.c1_tol;

  // C2: monotone exchange across the stored window curves
  const double noise = 5e-3;
  int viol = 0;
  for (size_t i = 1; i < ac.exchange_curves.size(); ++i) {
    const auto& a = ac.exchange_curves[i - 1];
    const auto& b = ac.exchange_curves[i];
    if (b.l0 > a.l0 + noise) ++viol;
    if (b.r0 + noise < a.r0) ++viol;
    if (b.l1 + noise < a.l1) ++viol;
    if (b.r1 > a.r1 + noise) ++viol;
  }
  rep.c2_violations = viol;
  rep.c2_pass = viol <= 1;

  // C3: constant sign products per arm over the window, opposite between arms
  size_t ilo = sw.nearest_index(ac.s_x - ac.delta);
  size_t ihi = sw.nearest_index(ac.s_x + ac.delta);
  bool l_same = false, l_opp = false, r_same = false, r_opp = false;
  for (size_t i = ilo; i <= ihi; ++i) {
    const auto& p = sw.point(i);
    for (uint64_t k : ac.L) {
      double c = p.vectors(k, 0), d = p.vectors(k, 1);
      if (std::abs(c) >= th.amp_floor && std::abs(d) >= th.amp_floor)
        (c * d > 0 ? l_same : l_opp) = true;
    }
    for (uint64_t k : ac.R) {
      double c = p.vectors(k, 0), d = p.vectors(k, 1);
      if (std::abs(c) >= th.amp_floor && std::abs(d) >= th.amp_floor)
        (c * d > 0 ? r_same : r_opp) = true;
    }
  }
  if (l_same && !l_opp && r_opp && !r_same) rep.c3_pattern = +1;
  if (l_opp && !l_same && r_same && !r_opp) rep.c3_pattern = -1;
  rep.c3_pass = rep.c3_pattern != 0;

  // C4: SAS residual at s_x under the best arm-consistent sign assignment
  double max_amp = ps.vectors.col(0).cwiseAbs().maxCoeff();
  double best = std::numeric_limits<double>::infinity();
  for (double sigma : {1.0, -1.0}) {
    double resid = 0;
    for (uint64_t k : ac.L)
      resid = std::max(resid, std::abs(ps.vectors(k, 0) - sigma * ps.vectors(k, 1)));
    for (uint64_t k : ac.R)
      resid = std::max(resid, std::abs(ps.vectors(k, 0) + sigma * ps.vectors(k, 1)));
    best = std::min(best, resid);
  }
  rep.c4_residual = best / std::max(max_amp, 1e-300);
  rep.c4_pass = rep.c4_residual <= th.sas_eps;

  // first-order drift of the ground amplitudes around s_x
  double ratio = eta / std::max(ac.gap, 1e-300);
  double drift = 0;
  for (double u : {-1.0, -0.5, 0.5, 1.0}) {
    const auto& p = sw.point(sw.ensure_point(ac.s_x + u * lf));
    for (uint64_t k : ac.L) {
      double pred = ps.vectors(k, 0) - u * lf * ratio * ps.vectors(k, 1);
      drift = std::max(drift, std::abs(p.vectors(k, 0) - pred));
    }
    for (uint64_t k : ac.R) {
      double pred = ps.vectors(k, 0) - u * lf * ratio * ps.vectors(k, 1);
      drift = std::max(drift, std::abs(p.vectors(k, 0) - pred));
    }
  }
  rep.drift_residual = drift / std::max(max_amp, 1e-300);

  rep.necc = necessary_conditions(sw, ac);
  rep.necc_pass = rep.necc.ordering_before && rep.necc.ordering_after &&
                  std::max(rep.necc.resid_before, rep.necc.resid_after) <= th.necc_tol;
  rep.gap_formula = gap_estimate_corollary(sw, ac);
  auto within2 = [&](double est) { return est > 0 && est < 2.0 * ac.gap && est > 0.5 * ac.gap; };
  rep.gap_formula_pass = (!rep.gap_formula.applicable_before || within2(rep.gap_formula.est_before)) &&
                         (!rep.gap_formula.applicable_after || within2(rep.gap_formula.est_after)) &&
                         (rep.gap_formula.applicable_before || rep.gap_formula.applicable_after);
  return rep;
}

std::vector<AntiCrossing> detect_anticrossings(SpectralSweep& sw, const AcThresholds& th) {
  std::vector<AntiCrossing> out;
  for (auto [s, g] : find_gap_minima(sw)) {
    (void)g;
    auto r = find_arms(sw, s, th);
    if (r.ok) out.push_back(std::move(r.ac));
  }
  std::sort(out.begin(), out.end(),
            [](const AntiCrossing& a, const AntiCrossing& b) { return a.s_x < b.s_x; });
  return out;
}

std::string to_string(AcClass c) {
  switch (c) {
    case AcClass::NoAc: return "no-AC";
    case AcClass::SingleAc: return "single-AC";
    case AcClass::DoubleAcFound: return "double-AC";
    case AcClass::MultiLevel: return "multi-level";
  }
  return "?";
}

std::optional<DoubleAc> detect_double_ac(SpectralSweep& sw, const AcThresholds& th) {
  if (sw.levels() < 3) throw std::invalid_argument("double-AC detection needs k >= 3");
  const SystemSpec& spec = sw.spec();
  auto all = detect_anticrossings(sw, th);
  // only full-exchange crossings can bridge
  std::vector<AntiCrossing> acs;
  for (auto& ac : all)
    if (!ac.weak) acs.push_back(std::move(ac));
  for (size_t i = 0; i + 1 < acs.size(); ++i) {
    const AntiCrossing& a = acs[i];
    const AntiCrossing& b = acs[i + 1];
    // The bridge arm is the ground composition between the crossings: the
    // outgoing arm of the first and the incoming arm of the second.
    std::vector<uint64_t> core;
    std::set_intersection(a.R.begin(), a.R.end(), b.L.begin(), b.L.end(),
                          std::back_inserter(core));
    std::vector<uint64_t> join;
    std::set_union(a.R.begin(), a.R.end(), b.L.begin(), b.L.end(), std::back_inserter(join));
    if (core.empty() || double(core.size()) / double(join.size()) < 0.3) continue;

    DoubleAc d;
    d.first = a;
    d.second = b;
    d.s1 = a.s_x;
    d.s2 = b.s_x;

    // Grow the arm to the full coupler-connected component of visible
    // mid-bridge states: the arm's states are linked by driver couplers
    // while their negligible single-flip neighbors are not.
    const auto& mid = sw.point(sw.ensure_point(0.5 * (a.s_x + b.s_x)));
    double top = mid.vectors.col(0).cwiseAbs().maxCoeff();
    std::vector<uint64_t> xx_masks;
    if (spec.driver.kind == DriverKind::CatalystXX)
      for (auto [x, y] : spec.driver.edges)
        xx_masks.push_back((uint64_t(1) << x) | (uint64_t(1) << y));
    (void)top;
    std::set<uint64_t> visible;
    for (Eigen::Index k = 0; k < mid.vectors.rows(); ++k)
      if (std::abs(mid.vectors(k, 0)) >= th.amp_floor) visible.insert(static_cast<uint64_t>(k));
    Eigen::Index seed;
    mid.vectors.col(0).cwiseAbs().maxCoeff(&seed);
    std::vector<uint64_t> component;
    if (visible.count(static_cast<uint64_t>(seed))) {
      std::vector<uint64_t> stack{static_cast<uint64_t>(seed)};
      std::set<uint64_t> done{static_cast<uint64_t>(seed)};
      while (!stack.empty()) {
        uint64_t k = stack.back();
        stack.pop_back();
        component.push_back(k);
        for (uint64_t m : xx_masks) {
          uint64_t q = k ^ m;
          if (visible.count(q) && done.insert(q).second) stack.push_back(q);
        }
      }
    }
    std::sort(component.begin(), component.end());
    // the grown arm has to agree with the exchange core
    size_t agree = 0;
    for (uint64_t k : core)
      if (std::binary_search(component.begin(), component.end(), k)) ++agree;
    if (component.empty() || agree * 2 < core.size()) continue;
    d.common_arm = component;

    for (uint64_t k : d.common_arm)
      (mid.vectors(k, 0) > 0 ? d.bridge_plus : d.bridge_minus).push_back(k);
    if (d.bridge_plus.empty() || d.bridge_minus.empty()) continue;

    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& p : sw.points())
      if (p.s >= a.s_x && p.s <= b.s_x) dmin = std::min(dmin, p.energies[2] - p.energies[1]);
    d.min_delta21 = dmin;

    // every driver coupler acting inside the common arm must link the two halves
    bool cross = true;
    std::set<uint64_t> plus(d.bridge_plus.begin(), d.bridge_plus.end());
    std::set<uint64_t> minus(d.bridge_minus.begin(), d.bridge_minus.end());
    for (uint64_t m : xx_masks) {
      for (uint64_t k : d.common_arm) {
        uint64_t q = k ^ m;
        if (!std::binary_search(d.common_arm.begin(), d.common_arm.end(), q)) continue;
        bool crosses = (plus.count(k) && minus.count(q)) || (minus.count(k) && plus.count(q));
        if (!crosses) cross = false;
      }
    }
    d.xx_couplers_cross = cross;

    // bridge diagnostics between the two windows
    bool pn = true, excited_on_r = true;
    const auto& global_side = a.L;   // occupied by the ground level before s1
    for (const auto& p : sw.points()) {
      if (p.s < a.s_x + a.delta || p.s > b.s_x - b.delta) continue;
      auto cls = classify_pointwise(spec, p.s, p.vectors.col(0));
      if (cls.cls != StoqClass::ProperNonStoquastic) pn = false;
      if (mass_on(p, 1, global_side) < 1.0 - th.gamma) excited_on_r = false;
    }
    d.bridge_pnstoq = pn;
    d.bridge_excited_on_r = excited_on_r;
    return d;
  }
  return std::nullopt;
}

std::optional<BandRecord> multi_level_band(const SpectralSweep& sw, double band_tol,
                                           double floor_above, double min_span) {
  int k = sw.levels();
  if (k < 3) return std::nullopt;
  const auto& pts = sw.points();
  for (int m = k - 2; m >= 1; --m) {
    size_t best_start = 0, best_len = 0;
    size_t run_start = 0;
    size_t run = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
      double dm = pts[i].energies[m] - pts[i].energies[0];
      double dup = pts[i].energies[m + 1] - pts[i].energies[0];
      if (dm <= band_tol && dup >= floor_above) {
        if (run == 0) run_start = i;
        ++run;
        if (run > best_len) {
          best_len = run;
          best_start = run_start;
        }
      } else {
        run = 0;
      }
    }
    if (best_len >= 3) {
      double s1 = pts[best_start].s, s2 = pts[best_start + best_len - 1].s;
      if (s2 - s1 >= min_span) {
        BandRecord rec;
        rec.s1 = s1;
        rec.s2 = s2;
        rec.band_top_level = m;
        rec.max_in_band_gap = 0;
        rec.floor_gap_above = std::numeric_limits<double>::infinity();
        for (size_t i = best_start; i < best_start + best_len; ++i) {
          rec.max_in_band_gap =
              std::max(rec.max_in_band_gap, pts[i].energies[m] - pts[i].energies[0]);
          rec.floor_gap_above =
              std::min(rec.floor_gap_above, pts[i].energies[m + 1] - pts[i].energies[0]);
        }
        return rec;
      }
    }
  }
  return std::nullopt;
}

JxxScanResult scan_jxx(const IsingModel& problem, const std::vector<std::pair<int, int>>& edges,
                       const std::vector<double>& jxx_grid, const JxxScanOptions& opts) {
  JxxScanResult out;

  auto analyze = [&](double jxx) {
    JxxRecord rec;
    rec.jxx = jxx;
    SystemSpec spec{problem, DriverSpec::catalyst(jxx, edges)};
    SweepOptions so = opts.sweep;
    so.k = opts.k;
    SpectralSweep sw(spec, so);
    sw.run(uniform_grid(opts.grid_points));
    auto gc = gap_curve(sw, 1, 0);
    size_t imin = 0;
    for (size_t i = 0; i < gc.delta.size(); ++i)
      if (gc.delta[i] < gc.delta[imin]) imin = i;
    rec.min_gap = gc.delta[imin];
    rec.s_star = gc.s[imin];
    auto acs = detect_anticrossings(sw, opts.thresholds);
    int full = static_cast<int>(acs.size());
    std::optional<DoubleAc> dac;
    if (sw.levels() >= 3 && acs.size() >= 2) dac = detect_double_ac(sw, opts.thresholds);
    std::optional<BandRecord> band;
    if (opts.band_detection) band = multi_level_band(sw);
    if (band)
      rec.cls = AcClass::MultiLevel;
    else if (dac)
      rec.cls = AcClass::DoubleAcFound;
    else if (full > 0)
      rec.cls = AcClass::SingleAc;
    else
      rec.cls = AcClass::NoAc;
    rec.weak_only =
        full > 0 && std::all_of(acs.begin(), acs.end(), [](const auto& a) { return a.weak; });
    rec.stoq = classify_system(sw).cls;
    return rec;
  };

  for (double jxx : jxx_grid) {
    try {
      out.records.push_back(analyze(jxx));
    } catch (const std::exception& e) {
      JxxRecord rec;
      rec.jxx = jxx;
      rec.error = e.what();
      out.records.push_back(rec);
    }
  }

  if (!opts.bisect_criticals) return out;
  const auto& recs = out.records;

  auto bisect = [&](double lo, double hi, auto pred) {
    // pred holds at hi, not at lo; returns the boundary pair (lo, hi)
    while (hi - lo > opts.bisect_tol) {
      double mid = 0.5 * (lo + hi);
      bool p = false;
      try {
        p = pred(analyze(mid));
      } catch (const std::exception&) {
      }
      (p ? hi : lo) = mid;
    }
    return std::make_pair(lo, hi);
  };

  // first proper-non-stoquastic point
  for (size_t i = 1; i < recs.size(); ++i) {
    if (recs[i].error.empty() && recs[i - 1].error.empty() &&
        recs[i].stoq == StoqClass::ProperNonStoquastic &&
        recs[i - 1].stoq != StoqClass::ProperNonStoquastic) {
      auto [lo, hi] = bisect(recs[i - 1].jxx, recs[i].jxx, [](const JxxRecord& r) {
        return r.stoq == StoqClass::ProperNonStoquastic;
      });
      (void)lo;
      out.j_transition = hi;
      break;
    }
  }
  // no-AC -> double-AC boundary
  for (size_t i = 1; i < recs.size(); ++i) {
    if (recs[i].error.empty() && recs[i - 1].error.empty() &&
        recs[i].cls == AcClass::DoubleAcFound && recs[i - 1].cls == AcClass::NoAc) {
      auto [lo, hi] = bisect(recs[i - 1].jxx, recs[i].jxx, [](const JxxRecord& r) {
        return r.cls == AcClass::DoubleAcFound;
      });
      out.j_merge = lo;
      out.j_split = hi;
      break;
    }
  }
  // last double-AC point (first AC too weak above)
  for (size_t i = recs.size(); i-- > 1;) {
    if (recs[i].error.empty() && recs[i - 1].error.empty() &&
        recs[i].cls != AcClass::DoubleAcFound && recs[i - 1].cls == AcClass::DoubleAcFound) {
      auto [lo, hi] = bisect(recs[i - 1].jxx, recs[i].jxx, [](const JxxRecord& r) {
        return r.cls != AcClass::DoubleAcFound;
      });
      (void)hi;
      out.j_double = lo;
      break;
    }
  }
  // Min-gap ordering over the stoquastic/eventually-stoquastic prefix.
  out.estoq_gap_monotone = true;
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& r : recs) {
    if (!r.error.empty()) continue;
    if (r.stoq == StoqClass::ProperNonStoquastic) break;
    if (r.min_gap < prev - 1e-12) out.estoq_gap_monotone = false;
    prev = r.min_gap;
  }
  return out;
}

DecayProfile coefficient_decay_profile(const EigenPoint& p, const SystemSpec& spec,
                                       const std::vector<uint64_t>& L,
                                       const std::vector<uint64_t>& R) {
  std::vector<uint64_t> sources = L;
  sources.insert(sources.end(), R.begin(), R.end());
  const size_t dim = spec.dim();
  std::vector<int> dist(dim, -1);
  std::deque<uint64_t> q;
  for (uint64_t s : sources)
    if (dist[s] < 0) {
      dist[s] = 0;
      q.push_back(s);
    }
  auto masks = driver_masks(spec);
  while (!q.empty()) {
    uint64_t k = q.front();
    q.pop_front();
    for (uint64_t m : masks) {
      uint64_t t = k ^ m;
      if (dist[t] < 0) {
        dist[t] = dist[k] + 1;
        q.push_back(t);
      }
    }
  }
  int dmax = *std::max_element(dist.begin(), dist.end());
  DecayProfile prof;
  prof.envelope.assign(dmax + 1, 0.0);
  for (size_t k = 0; k < dim; ++k)
    if (dist[k] >= 0)
      prof.envelope[dist[k]] =
          std::max(prof.envelope[dist[k]], std::abs(p.vectors(static_cast<Eigen::Index>(k), 0)));
  for (int d = 0; d <= dmax; ++d) prof.distance.push_back(d);

  std::vector<double> xs, ys;
  for (int d = 0; d <= dmax; ++d)
    if (prof.envelope[d] > 1e-300) {
      xs.push_back(d);
      ys.push_back(std::log(prof.envelope[d]));
    }
  if (xs.size() >= 2) {
    double intercept;
    linear_fit(xs, ys, prof.slope, intercept, prof.r2);
    double spread = *std::max_element(ys.begin(), ys.end()) - *std::min_element(ys.begin(), ys.end());
    prof.flat = spread < 1e-6;
  } else {
    prof.flat = true;
  }
  return prof;
}

ScalingFit gap_scaling_fit(const std::vector<std::pair<int, double>>& dist_gap) {
  ScalingFit fit;
  std::vector<double> xs, ys;
  for (size_t i = 0; i < dist_gap.size(); ++i) {
    if (dist_gap[i].second > 0) {
      xs.push_back(dist_gap[i].first);
      ys.push_back(std::log(dist_gap[i].second));
    } else {
      fit.excluded.push_back(static_cast<int>(i));
    }
  }
  if (xs.size() < 3) throw std::invalid_argument("gap scaling fit needs at least 3 points");
  double intercept;
  linear_fit(xs, ys, fit.slope, intercept, fit.r2);
  fit.zeta = std::exp(fit.slope);
  fit.points_used = static_cast<int>(xs.size());
  return fit;
}

std::vector<uint64_t> lens(const SystemSpec& spec, const std::vector<uint64_t>& a,
                           double threshold) {
  std::set<uint64_t> nb;
  for (uint64_t s : a)
    for (uint64_t q : nbr_hd(spec, s)) nb.insert(q);
  std::vector<uint64_t> out;
  for (uint64_t q : nb)
    if (ising_energy_basis(spec.ising, q) <= threshold) out.push_back(q);
  return out;
}

}  // namespace aclab
