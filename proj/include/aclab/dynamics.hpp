#pragma once

#include <complex>
#include <functional>
#include <optional>

#include "aclab/spectral.hpp"

namespace aclab {

using ComplexVector = Eigen::VectorXcd;

/// Annealing path H(s) = cz(s) Z + cx(s) X + cxx(s) XX, where Z is diagonal
/// in the computational basis and X, XX are diagonal in the Walsh (sigma^x
/// product) basis.  Every Hamiltonian in this project has this shape, which
/// both integrators exploit.
struct AnnealPath {
  int n = 0;
  Vector z;      // diagonal of the Z part
  Vector wx;     // Walsh diagonal of -sum sigma^x: 2 popcount(m) - n
  Vector wxx;    // Walsh diagonal of sum_driver sigma^x sigma^x
  std::function<double(double)> cz, cx, cxx;

  size_t dim() const { return static_cast<size_t>(z.size()); }
  static AnnealPath from_system(const SystemSpec& spec);
  /// Two-level path a(s - 1/2) sigma^z + b sigma^x.
  static AnnealPath linear_crossing(double a, double b);

  /// y = H(s) x (complex), via two Walsh transforms.
  void apply(double s, const ComplexVector& x, ComplexVector& y, ComplexVector& scratch) const;
  Matrix dense(double s) const;
};

/// In-place fast Walsh-Hadamard transform (unnormalized).
void fwht(ComplexVector& v);

struct IntegratorConfig {
  enum class Kind { Rk45, Split } kind = Kind::Rk45;
  double rtol = 1e-9;
  double atol = 1e-12;
  double split_ds = 1e-5;   // Split: schedule step (Strang, midpoint coefficients)
  long max_steps = 200'000'000;
};

struct EvolutionRecord {
  double s = 0.0;
  Vector level_pops;   // squared overlaps with tracked instantaneous levels
  double norm = 1.0;
};

struct EvolutionResult {
  double tf = 0.0;
  std::vector<EvolutionRecord> records;
  double final_success = 0.0;   // population of the problem ground basis state
  long steps = 0;
  double max_step_error = 0.0;
  double norm_drift = 0.0;
  ComplexVector final_state;
};

/// Integrate d psi/ds = -i tf H(s) psi from s=0 to 1.  The initial state
/// defaults to the uniform superposition (the driver ground state at s=0);
/// custom paths can pass their own.  Level populations are recorded at
/// `record_s` using the tracker sweep's instantaneous eigenvectors.
EvolutionResult evolve(const AnnealPath& path, double tf, const IntegratorConfig& cfg = {},
                       const SpectralSweep* tracker = nullptr,
                       const std::vector<double>* record_s = nullptr,
                       const ComplexVector* initial = nullptr);

struct DqaScanRow {
  double tf;
  double success;
};

struct DqaScanResult {
  std::vector<DqaScanRow> table;
  std::vector<EvolutionResult> runs;
};

DqaScanResult dqa_scan(const SystemSpec& spec, const std::vector<double>& tf_grid,
                       const IntegratorConfig& cfg = {}, const SpectralSweep* tracker = nullptr,
                       const std::vector<double>* record_s = nullptr);

struct DiabaticVerdict {
  bool diabatic_at_first = false;
  bool adiabatic_on_bridge = false;
  bool returns_at_second = false;
};

/// Population-threshold reading of a recorded run against a double-AC (or a
/// multi-level band, via band_top_level > 1): level-1..m population >= 0.8
/// just after s1, higher levels <= 0.1 across the bridge, ground >= 0.8
/// after s2.
DiabaticVerdict diabatic_trace(const EvolutionResult& run, double s1, double s2,
                               int band_top_level = 1);

}  // namespace aclab
