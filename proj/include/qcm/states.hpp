#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "qcm/pauli.hpp"

namespace qcm {

using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Largest register handled by exact diagonalization.
inline constexpr int kMaxExactQubits = 14;

/// Normalized pure state on n qubits; amplitude index bit i is qubit i.
class StateVector {
 public:
  StateVector(int n_qubits, Vector amplitudes);

  static StateVector basis(int n_qubits, std::uint64_t index);
  /// Rescales `amplitudes` to unit norm first.
  static StateVector normalized(int n_qubits, Vector amplitudes);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  const Vector& amplitudes() const { return amplitudes_; }
  Complex operator[](Eigen::Index k) const { return amplitudes_[k]; }

 private:
  int n_qubits_;
  Vector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite 2^n x 2^n matrix.
class DensityMatrix {
 public:
  DensityMatrix(int n_qubits, Matrix rho);

  static DensityMatrix pure(const StateVector& psi);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return rho_.rows(); }
  const Matrix& matrix() const { return rho_; }

 private:
  int n_qubits_;
  Matrix rho_;
};

class HermitianMatrix {
 public:
  explicit HermitianMatrix(Matrix m);
  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

/// Returned when no ground-state budget or bracket is available.
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GroundState {
  double energy;
  StateVector state;
  /// Dimension of the ground space found within the degeneracy tolerance.
  int degeneracy;
};

/// Minimum eigenpair of a fully bound Hamiltonian.
///
/// The matrix is split into the connected blocks of its computational-basis
/// graph and each block is diagonalized densely. For a degenerate ground space
/// the returned state is the normalized projection of the lowest-index basis
/// state whose projection norm exceeds 1e-8, so it is unique and has a real
/// positive amplitude at that index.
GroundState exact_ground_state(const PauliSum& h);

/// Dense matrix of a fully bound operator.
Matrix to_dense(const PauliSum& a);

double expectation(const StateVector& psi, const PauliString& p);
double expectation(const DensityMatrix& rho, const PauliString& p);
/// sum_s coeff_s <s> over a fully bound operator.
double expectation(const StateVector& psi, const PauliSum& a);
double expectation(const DensityMatrix& rho, const PauliSum& a);

class MissingStringError : public std::out_of_range {
 public:
  explicit MissingStringError(const PauliString& p)
      : std::out_of_range("expectation table has no entry for " + p.to_string()) {}
};

/// Precomputed <P> for a fixed state over a fixed set of strings.
class ExpectationTable {
 public:
  ExpectationTable() = default;
  explicit ExpectationTable(int n_qubits) : n_qubits_(n_qubits) {}

  int n_qubits() const { return n_qubits_; }
  std::size_t size() const { return values_.size(); }
  bool contains(const PauliString& p) const { return p.is_identity() || values_.count(p) != 0; }
  /// Identity is implicitly 1; any other absent string throws MissingStringError.
  double at(const PauliString& p) const;
  void insert(const PauliString& p, double value) { values_[p] = value; }

 private:
  int n_qubits_ = 0;
  std::unordered_map<PauliString, double, PauliStringHash> values_;
};

ExpectationTable expectation_table(const StateVector& psi, std::span<const PauliString> strings);
ExpectationTable expectation_table(const DensityMatrix& rho, std::span<const PauliString> strings);

/// Counters for state contractions (single-string expectations) and table
/// builds. Atomic, process-wide.
struct Instrumentation {
  std::uint64_t contractions = 0;
  std::uint64_t table_builds = 0;
};
Instrumentation instrumentation();
void reset_instrumentation();

enum class NoiseMode { per_qubit, global };

/// Per-qubit: rho -> (1 - 3p/4) rho + p/4 (X rho X + Y rho Y + Z rho Z) on every
/// qubit. Global: rho -> (1 - p) rho + p I / 2^n.
DensityMatrix depolarize(const DensityMatrix& rho, double p, NoiseMode mode = NoiseMode::per_qubit);

/// GUE sample M = (A + A^dag)/2. A's entries are (u + i v)/sqrt(2) with u, v
/// standard normals drawn by Box-Muller from std::mt19937_64(seed), filled in
/// column-major order.
HermitianMatrix random_gue_hermitian(int dim, std::uint64_t seed);

/// exp(-i theta M) applied through the eigendecomposition of M.
class TrialRotation {
 public:
  TrialRotation(const StateVector& psi0, const HermitianMatrix& m);

  StateVector at(double theta) const;
  /// |<psi0| exp(-i theta M) |psi0>|^2 from the spectral weights.
  double fidelity_at(double theta) const;

 private:
  int n_qubits_;
  Matrix eigenvectors_;
  Eigen::VectorXd eigenvalues_;
  Vector coords_;  // eigenbasis coordinates of psi0
};

StateVector rotate_trial(const StateVector& psi0, const HermitianMatrix& m, double theta);

double fidelity(const StateVector& a, const StateVector& b);
double fidelity(const StateVector& a, const DensityMatrix& rho);

struct ThetaTuning {
  double theta;
  double fidelity;
};

/// Scans theta upward from 0 in steps of 0.01 to the first point with
/// F(theta) <= target, then bisects the bracket. Throws StateError when the
/// target is not reached for theta <= 10.
ThetaTuning tune_theta_for_fidelity(const StateVector& psi0, const HermitianMatrix& m, double target,
                                    double tol = 1e-3);

}  // namespace qcm
