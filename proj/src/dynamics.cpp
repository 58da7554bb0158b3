#include "aclab/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace aclab {

void fwht(ComplexVector& v) {
  const auto n = v.size();
  for (Eigen::Index len = 1; len < n; len <<= 1) {
    for (Eigen::Index i = 0; i < n; i += len << 1) {
      for (Eigen::Index j = i; j < i + len; ++j) {
        std::complex<double> a = v[j];
        std::complex<double> b = v[j + len];
        v[j] = a + b;
        v[j + len] = a - b;
      }
    }
  }
}

AnnealPath AnnealPath::from_system(const SystemSpec& spec) {
  AnnealPath p;
  p.n = spec.n_qubits();
  const size_t d = spec.dim();
  SparseOperator hp = build_problem_operator(spec.ising);
  p.z = hp.diag;
  p.wx.resize(d);
  for (size_t m = 0; m < d; ++m) p.wx[m] = 2.0 * __builtin_popcountll(m) - p.n;
  p.wxx = Vector::Zero(d);
  double jxx = 0.0;
  if (spec.driver.kind == DriverKind::CatalystXX) {
    jxx = spec.driver.jxx;
    for (auto [i, j] : spec.driver.edges) {
      for (size_t m = 0; m < d; ++m) {
        int par = ((m >> i) ^ (m >> j)) & 1;
        p.wxx[m] += par ? -1.0 : 1.0;
      }
    }
  }
  p.cz = [](double s) { return s; };
  p.cx = [](double s) { return 1.0 - s; };
  p.cxx = [jxx](double s) { return (1.0 - s) * s * jxx; };
  return p;
}

AnnealPath AnnealPath::linear_crossing(double a, double b) {
  AnnealPath p;
  p.n = 1;
  p.z = Vector(2);
  p.z << 1.0, -1.0;
  p.wx = Vector(2);
  p.wx << 1.0, -1.0;
  p.wxx = Vector::Zero(2);
  p.cz = [a](double s) { return a * (s - 0.5); };
  p.cx = [b](double) { return b; };
  p.cxx = [](double) { return 0.0; };
  return p;
}

void AnnealPath::apply(double s, const ComplexVector& x, ComplexVector& y,
                       ComplexVector& scratch) const {
  const double az = cz(s), ax = cx(s), axx = cxx(s);
  scratch = x;
  fwht(scratch);
  const double inv = 1.0 / double(dim());
  for (Eigen::Index k = 0; k < scratch.size(); ++k)
    scratch[k] *= (ax * wx[k] + axx * wxx[k]) * inv;
  fwht(scratch);
  y = scratch;
  for (Eigen::Index k = 0; k < y.size(); ++k) y[k] += az * z[k] * x[k];
}

Matrix AnnealPath::dense(double s) const {
  const auto d = static_cast<Eigen::Index>(dim());
  Matrix h(d, d);
  ComplexVector e(d), y(d), scratch(d);
  for (Eigen::Index c = 0; c < d; ++c) {
    e.setZero();
    e[c] = 1.0;
    apply(s, e, y, scratch);
    h.col(c) = y.real();
  }
  return 0.5 * (h + h.transpose());
}

namespace {

constexpr std::complex<double> kImag{0.0, 1.0};

struct Recorder {
  const SpectralSweep* tracker;
  const std::vector<double>* record_s;
  size_t next = 0;
  EvolutionResult* out;

  double next_s() const {
    return record_s && next < record_s->size() ? (*record_s)[next]
                                               : std::numeric_limits<double>::infinity();
  }

  void record(double s, const ComplexVector& psi) {
    EvolutionRecord rec;
    rec.s = s;
    rec.norm = psi.norm();
    if (tracker) {
      size_t idx = tracker->nearest_index(s);
      const auto& p = tracker->point(idx);
      rec.level_pops.resize(p.levels());
      for (int l = 0; l < p.levels(); ++l) {
        std::complex<double> ov = 0;
        for (Eigen::Index k = 0; k < psi.size(); ++k)
          ov += p.vectors(k, l) * std::conj(psi[k]);
        rec.level_pops[l] = std::norm(ov);
      }
    }
    out->records.push_back(std::move(rec));
    ++next;
  }
};

// Dormand-Prince 5(4) coefficients.
const double kA21 = 1.0 / 5;
const double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
const double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
const double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
             kA54 = -212.0 / 729;
const double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
             kA65 = -5103.0 / 18656;
const double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192, kB5 = -2187.0 / 6784,
             kB6 = 11.0 / 84;
const double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920, kE5 = -17253.0 / 339200,
             kE6 = 22.0 / 525, kE7 = -1.0 / 40;
const double kC2 = 0.2, kC3 = 0.3, kC4 = 0.8, kC5 = 8.0 / 9, kC6 = 1.0, kC7 = 1.0;

void rk45(const AnnealPath& path, double tf, const IntegratorConfig& cfg, ComplexVector& psi,
          Recorder& recorder, EvolutionResult& out) {
  const auto d = psi.size();
  ComplexVector k1(d), k2(d), k3(d), k4(d), k5(d), k6(d), k7(d), tmp(d), scratch(d), ynew(d);
  auto rhs = [&](double s, const ComplexVector& y, ComplexVector& dy) {
    path.apply(s, y, dy, scratch);
    dy *= -kImag * tf;
  };

  double s = 0.0;
  double h = 1e-4;
  rhs(s, psi, k1);
  bool fsal_valid = true;
  while (s < 1.0) {
    double target = std::min(1.0, recorder.next_s());
    if (s + h > target) h = target - s;
    if (h < 1e-15) {
      if (target >= 1.0) break;
      recorder.record(target, psi);
      h = 1e-4;
      continue;
    }
    if (!fsal_valid) rhs(s, psi, k1);
    tmp = psi + h * kA21 * k1;
    rhs(s + kC2 * h, tmp, k2);
    tmp = psi + h * (kA31 * k1 + kA32 * k2);
    rhs(s + kC3 * h, tmp, k3);
    tmp = psi + h * (kA41 * k1 + kA42 * k2 + kA43 * k3);
    rhs(s + kC4 * h, tmp, k4);
    tmp = psi + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
    rhs(s + kC5 * h, tmp, k5);
    tmp = psi + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
    rhs(s + kC6 * h, tmp, k6);
    ynew = psi + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    rhs(s + kC7 * h, ynew, k7);

    double err = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      std::complex<double> e =
          h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] + kE5 * k5[i] + kE6 * k6[i] + kE7 * k7[i]);
      double sc = cfg.atol + cfg.rtol * std::max(std::abs(psi[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    if (err <= 1.0) {
      s += h;
      psi.swap(ynew);
      k1.swap(k7);
      fsal_valid = true;
      out.steps++;
      out.max_step_error = std::max(out.max_step_error, err);
      if (std::abs(s - recorder.next_s()) < 1e-14) recorder.record(s, psi);
    } else {
      fsal_valid = true;   // k1 still matches psi
    }
    double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h *= std::min(5.0, std::max(0.2, fac));
    if (out.steps > cfg.max_steps)
      throw std::runtime_error("integrator step limit reached near s=" + std::to_string(s));
    if (h < 1e-15 && s < 1.0)
      throw std::runtime_error("integrator step underflow at s=" + std::to_string(s));
  }
}

void strang_split(const AnnealPath& path, double tf, const IntegratorConfig& cfg,
                  ComplexVector& psi, Recorder& recorder, EvolutionResult& out) {
  const auto d = psi.size();
  long nsteps = std::lround(std::ceil(1.0 / cfg.split_ds));
  double ds = 1.0 / double(nsteps);
  const double inv = 1.0 / double(d);
  ComplexVector zphase(d), xphase(d);
  for (long step = 0; step < nsteps; ++step) {
    double s0 = step * ds;
    double smid = s0 + 0.5 * ds;
    double dt = tf * ds;
    double az = path.cz(smid) * dt * 0.5;
    double axw = path.cx(smid) * dt;
    double axxw = path.cxx(smid) * dt;
    for (Eigen::Index k = 0; k < d; ++k)
      zphase[k] = std::polar(1.0, -az * path.z[k]);
    for (Eigen::Index k = 0; k < d; ++k)
      xphase[k] = std::polar(inv, -(axw * path.wx[k] + axxw * path.wxx[k]));
    psi.array() *= zphase.array();
    fwht(psi);
    psi.array() *= xphase.array();
    fwht(psi);
    psi.array() *= zphase.array();
    out.steps++;
    double snext = s0 + ds;
    while (recorder.next_s() <= snext + 1e-12) recorder.record(snext, psi);
  }
}

}  // namespace

EvolutionResult evolve(const AnnealPath& path, double tf, const IntegratorConfig& cfg,
                       const SpectralSweep* tracker, const std::vector<double>* record_s,
                       const ComplexVector* initial) {
  if (!(tf > 0)) throw std::invalid_argument("total anneal time must be positive");
  const auto d = static_cast<Eigen::Index>(path.dim());
  ComplexVector psi(d);
  if (initial) {
    if (initial->size() != d) throw std::invalid_argument("initial state dimension mismatch");
    psi = *initial;
  } else {
    psi.setConstant(std::complex<double>(1.0 / std::sqrt(double(d)), 0.0));
  }

  EvolutionResult out;
  out.tf = tf;
  Recorder recorder{tracker, record_s, 0, &out};
  if (record_s && !record_s->empty() && (*record_s)[0] <= 0.0) recorder.record(0.0, psi);

  if (cfg.kind == IntegratorConfig::Kind::Split)
    strang_split(path, tf, cfg, psi, recorder, out);
  else
    rk45(path, tf, cfg, psi, recorder, out);

  while (recorder.next_s() <= 1.0) recorder.record(1.0, psi);
  out.norm_drift = std::abs(psi.norm() - 1.0);

  Eigen::Index gs = 0;
  path.z.minCoeff(&gs);
  out.final_success = std::norm(psi[gs]);
  out.final_state = std::move(psi);
  return out;
}

DqaScanResult dqa_scan(const SystemSpec& spec, const std::vector<double>& tf_grid,
                       const IntegratorConfig& cfg, const SpectralSweep* tracker,
                       const std::vector<double>* record_s) {
  for (size_t i = 1; i < tf_grid.size(); ++i)
    if (tf_grid[i] <= tf_grid[i - 1]) throw std::invalid_argument("tf grid must ascend");
  AnnealPath path = AnnealPath::from_system(spec);
  DqaScanResult res;
  for (double tf : tf_grid) {
    res.runs.push_back(evolve(path, tf, cfg, tracker, record_s));
    res.table.push_back({tf, res.runs.back().final_success});
  }
  return res;
}

DiabaticVerdict diabatic_trace(const EvolutionResult& run, double s1, double s2,
                               int band_top_level) {
  if (run.records.empty()) throw std::invalid_argument("run has no recorded populations");
  DiabaticVerdict v;
  auto pops_at = [&](double s) -> const Vector* {
    const Vector* best = nullptr;
    double bd = std::numeric_limits<double>::infinity();
    for (const auto& r : run.records) {
      if (r.level_pops.size() == 0) continue;
      double d = std::abs(r.s - s);
      if (d < bd) {
        bd = d;
        best = &r.level_pops;
      }
    }
    return best;
  };
  const Vector* after1 = pops_at(std::min(1.0, s1 + 0.02));
  const Vector* after2 = pops_at(std::min(1.0, s2 + 0.02));
  if (!after1 || !after2) throw std::invalid_argument("run lacks tracked populations");
  double band1 = 0;
  for (int l = 1; l <= band_top_level && l < after1->size(); ++l) band1 += (*after1)[l];
  v.diabatic_at_first = band1 >= 0.8;
  bool bridge_ok = true;
  for (const auto& r : run.records) {
    if (r.level_pops.size() == 0 || r.s < s1 + 0.02 || r.s > s2 - 0.02) continue;
    double above = 0;
    for (int l = band_top_level + 1; l < r.level_pops.size(); ++l) above += r.level_pops[l];
    double tracked = r.level_pops.sum();
    above += std::max(0.0, 1.0 - tracked);   // mass outside tracked levels counts as leakage
    if (above > 0.1) bridge_ok = false;
  }
  v.adiabatic_on_bridge = bridge_ok;
  v.returns_at_second = (*after2)[0] >= 0.8;
  return v;
}

}  // namespace aclab
