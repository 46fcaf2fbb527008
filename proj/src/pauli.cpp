#include "qcm/pauli.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "qcm/errors.hpp"

namespace qcm {

namespace {

void require_qubits(int n) {
  if (n < 1 || n > PauliString::kMaxQubits) {
    throw UsageError("qubit count must be in 1..64, got " + std::to_string(n));
  }
}

void require_same_qubits(int a, int b) {
  if (a != b) {
    throw UsageError("qubit-count mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

std::vector<PauliSum::Term> collect(std::unordered_map<PauliString, ParamPoly, PauliStringHash>&& acc) {
  std::vector<PauliSum::Term> terms;
  terms.reserve(acc.size());
  for (auto& [s, c] : acc) {
    c.prune();
    if (!c.empty()) terms.push_back({s, std::move(c)});
  }
  std::sort(terms.begin(), terms.end(),
            [](const PauliSum::Term& a, const PauliSum::Term& b) { return a.string < b.string; });
  return terms;
}

}  // namespace

PauliString PauliString::identity(int n_qubits) {
  require_qubits(n_qubits);
  return {n_qubits, 0, 0};
}

PauliString PauliString::single(int n_qubits, int qubit, char letter) {
  require_qubits(n_qubits);
  if (qubit < 0 || qubit >= n_qubits) throw UsageError("qubit index out of range");
  PauliString p{n_qubits, 0, 0};
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  switch (letter) {
    case 'I': break;
    case 'X': p.x_mask = bit; break;
    case 'Z': p.z_mask = bit; break;
    case 'Y': p.x_mask = bit; p.z_mask = bit; break;
    default: throw UsageError(std::string("invalid Pauli letter '") + letter + "'");
  }
  return p;
}

PauliString PauliString::from_letters(int n_qubits,
                                      std::initializer_list<std::pair<int, char>> letters) {
  PauliString p = identity(n_qubits);
  for (auto [q, l] : letters) {
    PauliString s = single(n_qubits, q, l);
    p.x_mask |= s.x_mask;
    p.z_mask |= s.z_mask;
  }
  return p;
}

PauliString PauliString::parse(std::string_view letters) {
  const int n = static_cast<int>(letters.size());
  require_qubits(n);
  PauliString p{n, 0, 0};
  for (int q = 0; q < n; ++q) {
    char c = letters[static_cast<std::size_t>(q)];
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
      throw ParseError("invalid Pauli string '" + std::string(letters) + "'");
    }
    PauliString s = single(n, q, c);
    p.x_mask |= s.x_mask;
    p.z_mask |= s.z_mask;
  }
  return p;
}

char PauliString::letter(int qubit) const {
  const bool x = (x_mask >> qubit) & 1u;
  const bool z = (z_mask >> qubit) & 1u;
  return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
}

std::string PauliString::to_string() const {
  std::string s(static_cast<std::size_t>(n_qubits), 'I');
  for (int q = 0; q < n_qubits; ++q) s[static_cast<std::size_t>(q)] = letter(q);
  return s;
}

bool operator<(const PauliString& a, const PauliString& b) {
  if (a.z_mask != b.z_mask) return a.z_mask < b.z_mask;
  return a.x_mask < b.x_mask;
}

Complex Phase::value() const {
  switch (power & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

std::pair<Phase, PauliString> mul_strings(const PauliString& a, const PauliString& b) {
  require_same_qubits(a.n_qubits, b.n_qubits);
  // (i^ya X^xa Z^za)(i^yb X^xb Z^zb) = i^(ya+yb) (-1)^|za&xb| X^(xa^xb) Z^(za^zb),
  // then re-absorb i^-|x&z| of the product into its Y letters.
  const PauliString p{a.n_qubits, a.x_mask ^ b.x_mask, a.z_mask ^ b.z_mask};
  const int power = std::popcount(a.x_mask & a.z_mask) + std::popcount(b.x_mask & b.z_mask) +
                    2 * std::popcount(a.z_mask & b.x_mask) - std::popcount(p.x_mask & p.z_mask);
  return {Phase{((power % 4) + 4) % 4}, p};
}

PauliSum::PauliSum(int n_qubits, std::vector<Term> terms) : n_qubits_(n_qubits) {
  require_qubits(n_qubits);
  std::unordered_map<PauliString, ParamPoly, PauliStringHash> acc;
  for (auto& t : terms) {
    require_same_qubits(n_qubits, t.string.n_qubits);
    acc[t.string] += t.coeff;
  }
  terms_ = collect(std::move(acc));
}

PauliSum PauliSum::from_canonical(int n_qubits, std::vector<Term> terms) {
  PauliSum out(n_qubits);
  out.terms_ = std::move(terms);
  return out;
}

PauliSum PauliSum::identity(int n_qubits, ParamPoly coeff) {
  return PauliSum(n_qubits, {{PauliString::identity(n_qubits), std::move(coeff)}});
}

PauliSum PauliSum::from_string(const PauliString& s, ParamPoly coeff) {
  return PauliSum(s.n_qubits, {{s, std::move(coeff)}});
}

ParamPoly PauliSum::coefficient(const PauliString& s) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), s,
                             [](const Term& t, const PauliString& key) { return t.string < key; });
  if (it != terms_.end() && it->string == s) return it->coeff;
  return {};
}

std::set<std::string> PauliSum::parameters() const {
  std::set<std::string> out;
  for (const auto& t : terms_) out.merge(t.coeff.parameters());
  return out;
}

bool PauliSum::is_bound() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.coeff.is_constant(); });
}

bool PauliSum::is_hermitian_at(const Assignment& values, double tol) const {
  Binding b(values);
  return std::all_of(terms_.begin(), terms_.end(),
                     [&](const Term& t) { return std::abs(t.coeff.evaluate(b).imag()) < tol; });
}

PauliSum PauliSum::scaled(const ParamPoly& factor) const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back({t.string, t.coeff * factor});
  return PauliSum(n_qubits_, std::move(out));
}

PauliSum operator+(const PauliSum& a, const PauliSum& b) {
  require_same_qubits(a.n_qubits_, b.n_qubits_);
  std::vector<PauliSum::Term> all = a.terms_;
  all.insert(all.end(), b.terms_.begin(), b.terms_.end());
  return PauliSum(a.n_qubits_, std::move(all));
}

PauliSum operator-(const PauliSum& a, const PauliSum& b) { return a + b.scaled(-1.0); }

bool operator==(const PauliSum& a, const PauliSum& b) {
  if (a.n_qubits_ != b.n_qubits_ || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t k = 0; k < a.terms_.size(); ++k) {
    if (!(a.terms_[k].string == b.terms_[k].string) || !(a.terms_[k].coeff == b.terms_[k].coeff)) {
      return false;
    }
  }
  return true;
}

PauliSum sum_multiply(const PauliSum& a, const PauliSum& b) {
  require_same_qubits(a.n_qubits(), b.n_qubits());
  std::unordered_map<PauliString, ParamPoly, PauliStringHash> acc;
  acc.reserve(a.size() * b.size() / 4 + 16);
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      auto [phase, s] = mul_strings(ta.string, tb.string);
      acc[s].add_product(ta.coeff, tb.coeff, phase.value());
    }
  }
  return PauliSum::from_canonical(a.n_qubits(), collect(std::move(acc)));
}

std::vector<PauliSum> sum_power(const PauliSum& a, int k) {
  if (k < 1 || k > 4) throw UsageError("power order must be in 1..4, got " + std::to_string(k));
  std::vector<PauliSum> powers{a};
  for (int j = 2; j <= k; ++j) powers.push_back(sum_multiply(a, powers.back()));
  return powers;
}

PauliSum bind(const PauliSum& a, const Assignment& values, double drop_tolerance) {
  Binding b(values);
  std::vector<PauliSum::Term> out;
  out.reserve(a.size());
  for (const auto& t : a.terms()) {
    Complex c = t.coeff.evaluate(b);
    if (c == Complex(0.0) || std::abs(c) < drop_tolerance) continue;
    out.push_back({t.string, ParamPoly::exact_constant(c)});
  }
  return PauliSum::from_canonical(a.n_qubits(), std::move(out));
}

PauliSum bind_partial(const PauliSum& a, const Assignment& values) {
  Binding b(values);
  std::vector<PauliSum::Term> out;
  out.reserve(a.size());
  for (const auto& t : a.terms()) out.push_back({t.string, t.coeff.substitute(b)});
  return PauliSum(a.n_qubits(), std::move(out));
}

PauliSum commutator(const PauliSum& a, const PauliSum& b) { return a * b - b * a; }

std::string to_text(const PauliSum& a) {
  std::string out;
  for (const auto& t : a.terms()) out += t.coeff.to_string() + " " + t.string.to_string() + "\n";
  return out;
}

PauliSum parse_pauli_sum(std::string_view text) {
  std::vector<PauliSum::Term> terms;
  int n = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;
    std::size_t split = line.find_last_of(" \t");
    if (split == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected '<coeff-poly> <string>'");
    }
    PauliString s = PauliString::parse(line.substr(split + 1));
    if (n == 0) n = s.n_qubits;
    if (s.n_qubits != n) throw ParseError("line " + std::to_string(line_no) + ": qubit-count mismatch");
    terms.push_back({s, ParamPoly::parse(line.substr(0, split))});
  }
  if (n == 0) throw ParseError("no terms in operator text");
  return PauliSum(n, std::move(terms));
}

std::ostream& operator<<(std::ostream& os, const PauliString& p) { return os << p.to_string(); }

std::ostream& operator<<(std::ostream& os, const PauliSum& a) { return os << to_text(a); }

}  // namespace qcm
