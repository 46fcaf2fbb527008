#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qcm {

using Complex = std::complex<double>;

/// Coefficients with magnitude below this are treated as zero after collection.
inline constexpr double kZeroTolerance = 1e-15;

/// Parameter values by name, e.g. {"x": 0.5, "lambda": 1e-4}.
using Assignment = std::map<std::string, double>;

/// Process-wide interning of parameter names into small integer slots.
///
/// A monomial packs one 8-bit exponent per slot into a 64-bit word, so at most
/// eight distinct parameter names can exist in one process.
class ParamRegistry {
 public:
  static constexpr int kMaxParams = 8;
  static int id(std::string_view name);
  static std::string name(int id);
  static int size();
};

/// Packed exponent vector: byte k holds the exponent of parameter slot k.
using Monomial = std::uint64_t;

int monomial_exponent(Monomial m, int slot);
int monomial_degree(Monomial m);

/// Parameter values resolved to registry slots for fast evaluation.
class Binding {
 public:
  Binding() = default;
  explicit Binding(const Assignment& values);

  bool has(int slot) const { return (bound_ >> slot) & 1u; }
  double value(int slot) const { return values_[slot]; }

 private:
  double values_[ParamRegistry::kMaxParams] = {};
  unsigned bound_ = 0;
};

/// Sparse polynomial with complex coefficients in named real parameters.
///
/// Terms are kept sorted by packed monomial with no coefficient below
/// kZeroTolerance in magnitude.
class ParamPoly {
 public:
  using Term = std::pair<Monomial, Complex>;

  ParamPoly() = default;
  ParamPoly(Complex constant);  // NOLINT(google-explicit-constructor)
  ParamPoly(double constant) : ParamPoly(Complex(constant, 0.0)) {}  // NOLINT

  static ParamPoly variable(std::string_view name, Complex coeff = 1.0);
  /// Constant kept whenever nonzero, bypassing the zero tolerance.
  static ParamPoly exact_constant(Complex value);
  static ParamPoly parse(std::string_view text);

  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  bool is_constant() const;
  /// The constant term (0 when absent).
  Complex constant_term() const;
  int degree() const;
  std::set<std::string> parameters() const;

  Complex evaluate(const Binding& binding) const;
  Complex evaluate(const Assignment& values) const { return evaluate(Binding(values)); }

  /// Partial evaluation: substitutes bound parameters, keeps the rest symbolic.
  ParamPoly substitute(const Binding& binding) const;

  ParamPoly& operator+=(const ParamPoly& other);
  ParamPoly& operator-=(const ParamPoly& other);
  ParamPoly& operator*=(Complex scale);

  /// this += scale * a * b, without materializing the product.
  void add_product(const ParamPoly& a, const ParamPoly& b, Complex scale);

  /// Drops terms with |coeff| < tolerance.
  void prune(double tolerance = kZeroTolerance);

  /// `(0.25)*x^1 + (-0.5)`; highest total degree first, then by parameter name.
  std::string to_string() const;

  friend ParamPoly operator+(ParamPoly a, const ParamPoly& b) { return a += b; }
  friend ParamPoly operator-(ParamPoly a, const ParamPoly& b) { return a -= b; }
  friend ParamPoly operator*(const ParamPoly& a, const ParamPoly& b);
  friend ParamPoly operator*(ParamPoly a, Complex s) { return a *= s; }
  friend ParamPoly operator*(Complex s, ParamPoly a) { return a *= s; }
  friend ParamPoly operator*(ParamPoly a, double s) { return a *= Complex(s); }
  friend ParamPoly operator*(double s, ParamPoly a) { return a *= Complex(s); }
  friend bool operator==(const ParamPoly&, const ParamPoly&) = default;

 private:
  void normalize();
  std::vector<Term> terms_;
};

}  // namespace qcm
