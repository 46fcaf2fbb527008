#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcm/param_poly.hpp"

namespace qcm {

/// Tensor product of single-qubit Paulis in symplectic bitmask form.
///
/// Qubit i carries I, X, Z or Y for (x_i, z_i) = (0,0), (1,0), (0,1), (1,1).
/// The operator is i^{|x & z|} X^x Z^z, so every string is Hermitian.
struct PauliString {
  int n_qubits = 0;
  std::uint64_t x_mask = 0;
  std::uint64_t z_mask = 0;

  static constexpr int kMaxQubits = 64;

  static PauliString identity(int n_qubits);
  /// "XIZY" with qubit 0 leftmost.
  static PauliString parse(std::string_view letters);
  /// Single letter `letter` on `qubit`, identity elsewhere.
  static PauliString single(int n_qubits, int qubit, char letter);
  static PauliString from_letters(int n_qubits, std::initializer_list<std::pair<int, char>> letters);

  bool is_identity() const { return (x_mask | z_mask) == 0; }
  std::uint64_t support() const { return x_mask | z_mask; }
  int weight() const { return std::popcount(support()); }
  char letter(int qubit) const;
  std::string to_string() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
};

/// Canonical order: lexicographic on (z_mask, x_mask).
bool operator<(const PauliString& a, const PauliString& b);

struct PauliStringHash {
  std::size_t operator()(const PauliString& p) const noexcept {
    std::uint64_t h = p.x_mask * 0x9E3779B97F4A7C15ull;
    h ^= p.z_mask + 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h ^ static_cast<std::uint64_t>(p.n_qubits));
  }
};

/// Power of i: 0 -> 1, 1 -> i, 2 -> -1, 3 -> -i.
struct Phase {
  int power = 0;
  Complex value() const;
  friend bool operator==(const Phase&, const Phase&) = default;
};

/// a * b = phase * product.
std::pair<Phase, PauliString> mul_strings(const PauliString& a, const PauliString& b);

/// Linear combination of Pauli strings with ParamPoly coefficients.
///
/// Terms are unique, sorted in canonical string order, and never carry an empty
/// coefficient. Values are immutable once built.
class PauliSum {
 public:
  struct Term {
    PauliString string;
    ParamPoly coeff;
  };

  PauliSum() = default;
  explicit PauliSum(int n_qubits) : n_qubits_(n_qubits) {}
  /// Collects like strings; all strings must have `n_qubits` qubits.
  PauliSum(int n_qubits, std::vector<Term> terms);

  static PauliSum identity(int n_qubits, ParamPoly coeff = 1.0);
  static PauliSum from_string(const PauliString& s, ParamPoly coeff = 1.0);

  int n_qubits() const { return n_qubits_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Coefficient of `s` (empty polynomial when absent).
  ParamPoly coefficient(const PauliString& s) const;
  std::set<std::string> parameters() const;
  bool is_bound() const;

  /// True when every coefficient evaluated at `values` has |imag| < tol.
  bool is_hermitian_at(const Assignment& values, double tol = 1e-12) const;

  PauliSum scaled(const ParamPoly& factor) const;

  /// Takes terms already unique and in canonical order; no collection or pruning.
  static PauliSum from_canonical(int n_qubits, std::vector<Term> terms);

  friend PauliSum operator+(const PauliSum& a, const PauliSum& b);
  friend PauliSum operator-(const PauliSum& a, const PauliSum& b);
  friend bool operator==(const PauliSum& a, const PauliSum& b);

 private:
  int n_qubits_ = 0;
  std::vector<Term> terms_;
};

/// Distributive product with phases folded into coefficients and like strings
/// collected.
PauliSum sum_multiply(const PauliSum& a, const PauliSum& b);
inline PauliSum operator*(const PauliSum& a, const PauliSum& b) { return sum_multiply(a, b); }

/// [A, A^2, ..., A^k] for k in 1..4, each computed as A * A^(j-1).
std::vector<PauliSum> sum_power(const PauliSum& a, int k);

/// Evaluates every coefficient; terms with |coeff| < drop_tolerance vanish.
/// Throws UnboundParameterError when a parameter is missing from `values`.
PauliSum bind(const PauliSum& a, const Assignment& values, double drop_tolerance = kZeroTolerance);

/// Substitutes only the parameters present in `values`.
PauliSum bind_partial(const PauliSum& a, const Assignment& values);

/// A*B - B*A.
PauliSum commutator(const PauliSum& a, const PauliSum& b);

/// One term per line: `<coeff-poly> <string>`.
std::string to_text(const PauliSum& a);
PauliSum parse_pauli_sum(std::string_view text);

std::ostream& operator<<(std::ostream& os, const PauliString& p);
std::ostream& operator<<(std::ostream& os, const PauliSum& a);

}  // namespace qcm
