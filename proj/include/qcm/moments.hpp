#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcm/pauli.hpp"
#include "qcm/states.hpp"

namespace qcm {

/// <H^k> for k = 1..4.
struct MomentSet {
  std::array<double, 4> m{};
  double operator[](int k) const { return m[static_cast<std::size_t>(k - 1)]; }
};

/// Connected moments c_1..c_4.
struct CumulantSet {
  std::array<double, 4> c{};
  double operator[](int k) const { return c[static_cast<std::size_t>(k - 1)]; }
};

enum class EstimateMode { lanczos, eigenstate_fallback };

struct QcmResult {
  double energy = 0.0;
  EstimateMode mode = EstimateMode::lanczos;
  /// c3^2 - c2 c4
  double denominator = 0.0;
  /// 3 c3^2 - 2 c2 c4
  double radicand = 0.0;
};

class EstimateError : public std::runtime_error {
 public:
  enum class Kind { invalid_radicand, singular_denominator };

  EstimateError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// m_k = sum_s coeff_s <s> over bound powers [H, H^2, H^3, H^4], summed pairwise
/// in canonical string order. Throws MissingStringError for strings the table
/// lacks.
MomentSet compute_moments(std::span<const PauliSum> powers, const ExpectationTable& table);
MomentSet compute_moments(std::span<const PauliSum> powers, const StateVector& psi);
MomentSet compute_moments(std::span<const PauliSum> powers, const DensityMatrix& rho);

/// c_n = m_n - sum_{p=0}^{n-2} binom(n-1, p) c_{p+1} m_{n-1-p}.
CumulantSet cumulants(const MomentSet& moments);

double default_eigen_tolerance(const CumulantSet& c);

/// Fourth-order Lanczos estimate
///   E = c1 - c2^2 / (c3^2 - c2 c4) * (sqrt(3 c3^2 - 2 c2 c4) - c3).
/// Falls back to c1 when c2 < eigen_tol (default 1e-10 max(1, c1^2)).
QcmResult lanczos_energy(const CumulantSet& c, std::optional<double> eigen_tol = std::nullopt);

inline constexpr double kDefaultEpsilon = 1e-4;

/// Name of the finite-difference parameter in H + lambda A.
inline constexpr const char* kLambdaName = "lambda";

/// Symbolic powers of H + lambda A (or of H alone) expanded once; every later
/// evaluation only binds coefficients.
class MomentExpansion {
 public:
  explicit MomentExpansion(const PauliSum& hamiltonian);
  MomentExpansion(const PauliSum& hamiltonian, const PauliSum& observable);

  int n_qubits() const { return hamiltonian_.n_qubits(); }
  const PauliSum& hamiltonian() const { return hamiltonian_; }
  const std::optional<PauliSum>& observable() const { return observable_; }
  const std::vector<PauliSum>& powers() const { return powers_; }

  /// Distinct strings over all four powers, canonical order.
  std::vector<PauliString> strings() const;

  /// Powers with `params` and lambda = `lambda` substituted, nothing dropped.
  std::vector<PauliSum> bound_powers(const Assignment& params, double lambda) const;

 private:
  PauliSum hamiltonian_;
  std::optional<PauliSum> observable_;
  std::vector<PauliSum> powers_;
};

/// E^L(4) of H at `params` (lambda = 0) from a precomputed table.
QcmResult qcm_energy(const MomentExpansion& expansion, const ExpectationTable& table, const Assignment& params);

/// [E^L(4)(+eps) - E^L(4)(-eps)] / (2 eps), both energies from the same table.
/// An EstimateError at either side is rethrown with the sign in its message.
double observable_estimate(const MomentExpansion& expansion, const ExpectationTable& table,
                           const Assignment& params, double epsilon = kDefaultEpsilon);

double observable_estimate(const PauliSum& h, const PauliSum& a, const ExpectationTable& table,
                           double epsilon = kDefaultEpsilon);
double observable_estimate(const PauliSum& h, const PauliSum& a, const StateVector& psi,
                           double epsilon = kDefaultEpsilon);
double observable_estimate(const PauliSum& h, const PauliSum& a, const DensityMatrix& rho,
                           double epsilon = kDefaultEpsilon);

/// Estimates at eps and eps/2 with the Richardson combination (4 f(eps/2) - f(eps)) / 3.
struct RichardsonReport {
  double at_epsilon;
  double at_half_epsilon;
  double extrapolated;
};
RichardsonReport observable_richardson(const MomentExpansion& expansion, const ExpectationTable& table,
                                       const Assignment& params, double epsilon = kDefaultEpsilon);

/// Table-evaluated sum_s coeff_s <s> of an operator bound at `params`.
double table_expectation(const PauliSum& a, const ExpectationTable& table, const Assignment& params = {});

struct SweepRow {
  Assignment params;
  double e_direct = 0.0;
  std::optional<double> e_l4;
  std::optional<double> a_direct;
  std::optional<double> a_l4;
  /// "ok", or the estimator failures joined by "; ".
  std::string status = "ok";
};

/// One row per point of the Cartesian product of `grid` (parameters iterated in
/// name order, last name fastest). Estimator failures land in the row status.
std::vector<SweepRow> qcm_sweep(const MomentExpansion& expansion, const ExpectationTable& table,
                                const std::map<std::string, std::vector<double>>& grid,
                                double epsilon = kDefaultEpsilon);

}  // namespace qcm
