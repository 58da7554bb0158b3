#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "aclab/ising.hpp"

namespace aclab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class DriverKind {
  TransverseField,        // -sum sigma^x
  CatalystXX,             // -sum sigma^x + schedule-scaled J_xx sum sigma^x sigma^x
  FixedXX,                // reserved; construction is not supported
};

struct DriverSpec {
  DriverKind kind = DriverKind::TransverseField;
  double jxx = 0.0;                          // CatalystXX only
  std::vector<std::pair<int, int>> edges;    // CatalystXX only; any vertex pairs

  static DriverSpec transverse_field() { return {}; }
  static DriverSpec catalyst(double jxx, std::vector<std::pair<int, int>> edges) {
    DriverSpec d;
    d.kind = DriverKind::CatalystXX;
    d.jxx = jxx;
    d.edges = std::move(edges);
    return d;
  }
};

/// Problem Hamiltonian plus driver; generates H(s) = (1-s) H_X
/// + (1-s) s J_xx sum_XX + s H_P over the linear schedule.
struct SystemSpec {
  IsingModel ising;
  DriverSpec driver;

  int n_qubits() const { return ising.n; }
  size_t dim() const { return size_t(1) << ising.n; }
};

/// Real symmetric operator on 2^n states, stored structurally:
/// a diagonal plus XOR-mask flip terms (|k><k^mask| + h.c. with one
/// coefficient per mask).  Single-bit masks are the X part, two-bit masks
/// the XX part.
struct SparseOperator {
  int n = 0;
  Vector diag;
  struct FlipTerm {
    uint64_t mask;
    double coeff;
  };
  std::vector<FlipTerm> flips;

  size_t dim() const { return static_cast<size_t>(diag.size()); }
  void apply(const Vector& x, Vector& y) const;        // y = H x
  Vector apply(const Vector& x) const;
  Matrix dense() const;
  /// Upper-triangle coordinate dump (row col value), row-major order.
  std::vector<std::tuple<uint64_t, uint64_t, double>> coo() const;
  std::string coo_text() const;
};

/// Diagonal operator with entry ising_energy_basis(m, k) at basis state k.
/// Throws for n > 20.
SparseOperator build_problem_operator(const IsingModel& m);

/// H(s); throws if s is outside [0,1] or the driver kind is unsupported.
SparseOperator build_system_operator(const SystemSpec& spec, double s);

/// dH/ds at s: H_P - H_X + (1-2s) J_xx sum_XX.  For the transverse-field
/// driver this is the constant H_P - H_D.
SparseOperator build_schedule_derivative(const SystemSpec& spec, double s);

// ---- driver neighborhoods and distances -----------------------------------

/// XOR masks of the driver terms: single-bit flips, plus double flips on the
/// driver edges for the catalyst.
std::vector<uint64_t> driver_masks(const SystemSpec& spec);

std::vector<uint64_t> nbr_hd(const SystemSpec& spec, uint64_t state);

/// Minimum number of driver moves between the two sets (BFS); Hamming
/// distance for the transverse-field driver.  Throws on an empty set.
int dist_hd(const SystemSpec& spec, const std::vector<uint64_t>& a,
            const std::vector<uint64_t>& b);

/// Partition of all 2^n states relative to disjoint L, R: members of L and R
/// keep their identity, every other state goes to n(L) when its driver
/// distance to L is <= its distance to R (ties to n(L)), else to n(R).
struct StatePartition {
  enum Side : uint8_t { InL = 0, NearL = 1, InR = 2, NearR = 3 };
  std::vector<uint8_t> side;   // indexed by basis state
  size_t count(Side s) const;
};
StatePartition partition_nl_nr(const SystemSpec& spec, const std::vector<uint64_t>& l,
                               const std::vector<uint64_t>& r);

// ---- stoquasticity ---------------------------------------------------------

enum class StoqClass { Stoquastic, EventuallyStoquastic, ProperNonStoquastic };
std::string to_string(StoqClass c);

struct StoqPointResult {
  StoqClass cls = StoqClass::Stoquastic;
  uint64_t witness_state = 0;   // opposite-sign ground amplitude (PNStoq only)
  double witness_amplitude = 0.0;
};

/// Pointwise test at schedule point s given the normalized ground state:
/// Stoquastic when every off-diagonal entry of H(s) is <= 0; otherwise
/// eventually stoquastic when the sign-fixed ground state is entrywise
/// >= -tol (tol relative to the largest amplitude); otherwise proper
/// non-stoquastic with a witness entry.
StoqPointResult classify_pointwise(const SystemSpec& spec, double s, const Vector& ground,
                                   double tol = 1e-10);

}  // namespace aclab
