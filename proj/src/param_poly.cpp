#include "qcm/param_poly.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <mutex>

#include "qcm/errors.hpp"

namespace qcm {

namespace {

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::vector<std::string>& registry_names() {
  static std::vector<std::string> names;
  return names;
}

constexpr Monomial kHighBits = 0x8080808080808080ull;

Monomial monomial_product(Monomial a, Monomial b) {
  // Per-byte addition; any exponent reaching 128 is rejected before it can
  // carry into the neighbouring slot.
  Monomial sum = a + b;
  if (((a | b | sum) & kHighBits) != 0) {
    for (int k = 0; k < ParamRegistry::kMaxParams; ++k) {
      if (monomial_exponent(a, k) + monomial_exponent(b, k) > 127) {
        throw UsageError("parameter exponent overflow (degree > 127)");
      }
    }
  }
  return sum;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_coeff(Complex c) {
  std::string out = "(" + format_double(c.real());
  if (c.imag() != 0.0) {
    std::string im = format_double(c.imag());
    if (im.front() != '-') out += '+';
    out += im + "i";
  }
  return out + ")";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("invalid number '" + std::string(s) + "'");
  }
  return v;
}

// "a", "a+bi", "a-bi", "bi"
Complex parse_coeff(std::string_view s) {
  s = trim(s);
  if (s.empty()) throw ParseError("empty coefficient");
  if (s.back() != 'i') return {parse_double(s), 0.0};
  s.remove_suffix(1);
  // Split at the last sign that is not part of an exponent and not leading.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string_view::npos) return {0.0, parse_double(s)};
  return {parse_double(s.substr(0, split)), parse_double(s.substr(split))};
}

}  // namespace

int ParamRegistry::id(std::string_view name) {
  if (name.empty()) throw UsageError("empty parameter name");
  std::lock_guard lock(registry_mutex());
  auto& names = registry_names();
  auto it = std::find(names.begin(), names.end(), name);
  if (it != names.end()) return static_cast<int>(it - names.begin());
  if (static_cast<int>(names.size()) == kMaxParams) {
    throw UsageError("too many distinct parameter names (max 8)");
  }
  names.emplace_back(name);
  return static_cast<int>(names.size()) - 1;
}

std::string ParamRegistry::name(int id) {
  std::lock_guard lock(registry_mutex());
  return registry_names().at(static_cast<std::size_t>(id));
}

int ParamRegistry::size() {
  std::lock_guard lock(registry_mutex());
  return static_cast<int>(registry_names().size());
}

int monomial_exponent(Monomial m, int slot) { return static_cast<int>((m >> (8 * slot)) & 0xFFu); }

int monomial_degree(Monomial m) {
  int d = 0;
  for (int k = 0; k < ParamRegistry::kMaxParams; ++k) d += monomial_exponent(m, k);
  return d;
}

Binding::Binding(const Assignment& values) {
  for (const auto& [name, v] : values) {
    int slot = ParamRegistry::id(name);
    values_[slot] = v;
    bound_ |= 1u << slot;
  }
}

ParamPoly::ParamPoly(Complex constant) {
  if (std::abs(constant) >= kZeroTolerance) terms_.emplace_back(Monomial{0}, constant);
}

ParamPoly ParamPoly::variable(std::string_view name, Complex coeff) {
  ParamPoly p;
  if (std::abs(coeff) >= kZeroTolerance) {
    p.terms_.emplace_back(Monomial{1} << (8 * ParamRegistry::id(name)), coeff);
  }
  return p;
}

ParamPoly ParamPoly::exact_constant(Complex value) {
  ParamPoly p;
  if (value != Complex(0.0)) p.terms_.emplace_back(Monomial{0}, value);
  return p;
}

bool ParamPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.front().first == 0);
}

Complex ParamPoly::constant_term() const {
  if (!terms_.empty() && terms_.front().first == 0) return terms_.front().second;
  return 0.0;
}

int ParamPoly::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, monomial_degree(m));
  return d;
}

std::set<std::string> ParamPoly::parameters() const {
  Monomial used = 0;
  for (const auto& [m, c] : terms_) used |= m;
  std::set<std::string> out;
  for (int k = 0; k < ParamRegistry::kMaxParams; ++k) {
    if (monomial_exponent(used, k) != 0) out.insert(ParamRegistry::name(k));
  }
  return out;
}

Complex ParamPoly::evaluate(const Binding& binding) const {
  Complex sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double factor = 1.0;
    for (Monomial rest = m; rest != 0;) {
      int slot = std::countr_zero(rest) / 8;
      int e = monomial_exponent(m, slot);
      if (!binding.has(slot)) throw UnboundParameterError(ParamRegistry::name(slot));
      for (int k = 0; k < e; ++k) factor *= binding.value(slot);
      rest &= ~(Monomial{0xFF} << (8 * slot));
    }
    sum += c * factor;
  }
  return sum;
}

ParamPoly ParamPoly::substitute(const Binding& binding) const {
  ParamPoly out;
  for (const auto& [m, c] : terms_) {
    Monomial kept = 0;
    Complex coeff = c;
    for (int slot = 0; slot < ParamRegistry::kMaxParams; ++slot) {
      int e = monomial_exponent(m, slot);
      if (e == 0) continue;
      if (binding.has(slot)) {
        for (int k = 0; k < e; ++k) coeff *= binding.value(slot);
      } else {
        kept |= Monomial(e) << (8 * slot);
      }
    }
    out.terms_.emplace_back(kept, coeff);
  }
  out.normalize();
  return out;
}

void ParamPoly::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.first < b.first; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().first == t.first) {
      merged.back().second += t.second;
    } else {
      merged.push_back(t);
    }
  }
  terms_ = std::move(merged);
  prune();
}

void ParamPoly::prune(double tolerance) {
  std::erase_if(terms_, [tolerance](const Term& t) { return std::abs(t.second) < tolerance; });
}

ParamPoly& ParamPoly::operator+=(const ParamPoly& other) {
  std::vector<Term> merged;
  merged.reserve(terms_.size() + other.terms_.size());
  auto a = terms_.begin();
  auto b = other.terms_.begin();
  while (a != terms_.end() || b != other.terms_.end()) {
    if (b == other.terms_.end() || (a != terms_.end() && a->first < b->first)) {
      merged.push_back(*a++);
    } else if (a == terms_.end() || b->first < a->first) {
      merged.push_back(*b++);
    } else {
      merged.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  terms_ = std::move(merged);
  prune();
  return *this;
}

ParamPoly& ParamPoly::operator-=(const ParamPoly& other) { return *this += other * Complex(-1.0); }

ParamPoly& ParamPoly::operator*=(Complex scale) {
  for (auto& t : terms_) t.second *= scale;
  prune();
  return *this;
}

ParamPoly operator*(const ParamPoly& a, const ParamPoly& b) {
  ParamPoly out;
  out.add_product(a, b, 1.0);
  return out;
}

void ParamPoly::add_product(const ParamPoly& a, const ParamPoly& b, Complex scale) {
  const std::size_t old = terms_.size();
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m = monomial_product(ma, mb);
      Complex c = scale * ca * cb;
      auto it = std::lower_bound(terms_.begin(), terms_.begin() + static_cast<std::ptrdiff_t>(old), m,
                                 [](const Term& t, Monomial key) { return t.first < key; });
      if (it != terms_.begin() + static_cast<std::ptrdiff_t>(old) && it->first == m) {
        it->second += c;
      } else {
        terms_.emplace_back(m, c);
      }
    }
  }
  if (terms_.size() != old) {
    normalize();
  } else {
    prune();
  }
}

std::string ParamPoly::to_string() const {
  if (terms_.empty()) return "(0)";
  struct Rendered {
    int degree;
    std::vector<std::pair<std::string, int>> factors;
    Complex coeff;
  };
  std::vector<Rendered> rows;
  for (const auto& [m, c] : terms_) {
    Rendered r{monomial_degree(m), {}, c};
    for (int k = 0; k < ParamRegistry::kMaxParams; ++k) {
      if (int e = monomial_exponent(m, k); e != 0) r.factors.emplace_back(ParamRegistry::name(k), e);
    }
    std::sort(r.factors.begin(), r.factors.end());
    rows.push_back(std::move(r));
  }
  std::sort(rows.begin(), rows.end(), [](const Rendered& a, const Rendered& b) {
    if (a.degree != b.degree) return a.degree > b.degree;
    return a.factors < b.factors;
  });
  std::string out;
  for (const auto& r : rows) {
    if (!out.empty()) out += " + ";
    out += format_coeff(r.coeff);
    for (const auto& [name, e] : r.factors) out += "*" + name + "^" + std::to_string(e);
  }
  return out;
}

ParamPoly ParamPoly::parse(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ParseError("empty polynomial");
  ParamPoly out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] != '(') throw ParseError("expected '(' in polynomial '" + std::string(text) + "'");
    std::size_t close = text.find(')', pos);
    if (close == std::string_view::npos) throw ParseError("unterminated coefficient");
    Complex coeff = parse_coeff(text.substr(pos + 1, close - pos - 1));
    pos = close + 1;
    Monomial m = 0;
    while (pos < text.size() && text[pos] == '*') {
      std::size_t end = text.find_first_of(" )(*", pos + 1);
      if (end == std::string_view::npos) end = text.size();
      std::string_view factor = text.substr(pos + 1, end - pos - 1);
      std::size_t caret = factor.find('^');
      std::string_view name = factor.substr(0, caret);
      int e = 1;
      if (caret != std::string_view::npos) e = static_cast<int>(parse_double(factor.substr(caret + 1)));
      if (name.empty() || e < 0) throw ParseError("bad factor '" + std::string(factor) + "'");
      m = monomial_product(m, Monomial(e) << (8 * ParamRegistry::id(name)));
      pos = end;
    }
    out.terms_.emplace_back(m, coeff);
    std::string_view rest = trim(text.substr(pos));
    if (rest.empty()) break;
    if (rest.front() != '+') throw ParseError("expected '+' between polynomial terms");
    rest.remove_prefix(1);
    rest = trim(rest);
    pos = static_cast<std::size_t>(rest.data() - text.data());
  }
  out.normalize();
  return out;
}

}  // namespace qcm
