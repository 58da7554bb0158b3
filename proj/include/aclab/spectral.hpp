#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "aclab/operators.hpp"

namespace aclab {

struct SolverOptions {
  int k = 2;
  double tol = 1e-10;            // residual norm ||H v - E v||
  int dense_threshold = 4096;    // dense eigensolver at or below this dimension
  int max_iterations = 0;        // 0 = 10*sqrt(dim) + 500
  int block_extra = 4;           // extra block vectors beyond k
  uint64_t seed = 0x5eed;
};

struct SolveStats {
  int iterations = 0;
  double max_residual = 0.0;
  bool dense = false;
};

/// Eigenpairs at one schedule point: ascending energies, orthonormal
/// phase-fixed real eigenvectors (dim x k).
struct EigenPoint {
  double s = 0.0;
  Vector energies;
  Matrix vectors;

  int levels() const { return static_cast<int>(energies.size()); }
};

/// Lowest-k eigenpairs of a symmetric operator.  Dense (LAPACK dsyevr when
/// available) up to opts.dense_threshold, block-iterative above.  Throws
/// NonConvergence with the achieved residual when the iteration cap is hit.
EigenPoint lowest_k_eigenpairs(const SparseOperator& op, int k, double tol,
                               const SolverOptions& opts = {}, SolveStats* stats = nullptr);

struct NonConvergence : std::runtime_error {
  double achieved_residual;
  NonConvergence(const std::string& what, double res)
      : std::runtime_error(what), achieved_residual(res) {}
};

struct SweepOptions {
  int k = 2;
  double tol = 1e-10;
  int dense_threshold = 1024;    // sweeps favor warm-started iteration earlier
  double refine_ds = 1e-4;       // target grid resolution around gap minima
  int max_extra_points = 4000;
  double continuity_floor = 0.5; // refine between points with weaker overlap
  int threads = 0;               // 0 = library default
  uint64_t seed = 0x5eed;
};

std::vector<double> uniform_grid(int points = 201, double lo = 0.0, double hi = 1.0);

/// Eigenpairs over an s-grid with phase continuity (consecutive overlaps
/// nonnegative, gauge fixed at s = 0 by the first nonzero amplitude of each
/// level) and adaptive refinement around interior gap minima.
class SpectralSweep {
 public:
  SpectralSweep(SystemSpec spec, SweepOptions opts);

  void run(const std::vector<double>& grid);

  const SystemSpec& spec() const { return spec_; }
  int levels() const { return opts_.k; }
  const std::vector<EigenPoint>& points() const { return points_; }
  const EigenPoint& point(size_t i) const { return points_[i]; }
  size_t size() const { return points_.size(); }

  /// Index of the grid point nearest to s.
  size_t nearest_index(double s) const;
  /// Ensure a solved, phase-matched point exists at s (inserts if needed)
  /// and return its index.
  size_t ensure_point(double s);

  const SweepOptions& options() const { return opts_; }

 private:
  SystemSpec spec_;
  SweepOptions opts_;
  std::vector<EigenPoint> points_;
  std::vector<Matrix> basis_;   // iterative-solver block basis per point

  EigenPoint solve_at(double s, const Matrix* warm, Matrix* basis_out) const;
  void match_phase(const EigenPoint& prev, EigenPoint& cur) const;
  void refine_minima();
  void refine_continuity();
};

SpectralSweep sweep(const SystemSpec& spec, const std::vector<double>& grid, int k,
                    const SweepOptions& opts = {});

/// sgn(c) |c|^2 of basis state `state` in level `level`.
double signed_overlap(const EigenPoint& p, int level, uint64_t state);

/// Projection mass sum_{x in a} amplitude(x)^2 at the given level.
double set_projection_norm(const EigenPoint& p, int level, std::span<const uint64_t> a);

struct GapCurve {
  std::vector<double> s;
  std::vector<double> delta;
  std::vector<std::pair<double, double>> interior_minima;   // (s*, gap)
};
GapCurve gap_curve(const SpectralSweep& sw, int i, int j);

double expectation(const EigenPoint& p, int level, const SparseOperator& op);

struct StoqSystemResult {
  StoqClass cls = StoqClass::Stoquastic;
  double witness_s = 0.0;
  uint64_t witness_state = 0;
};

/// System-level classification over the sweep grid: proper non-stoquastic if
/// any point is, else eventually stoquastic if any point has a positive
/// off-diagonal entry, else stoquastic.
StoqSystemResult classify_system(const SpectralSweep& sw, double tol = 1e-10);

}  // namespace aclab
