#include "qcm/moments.hpp"

#include <cmath>
#include <functional>
#include <set>

#include "qcm/errors.hpp"

namespace qcm {

namespace {

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// Shared by the bound and symbolic routes so both produce identical bits:
// exact-zero coefficients are skipped, everything else summed pairwise in
// canonical order.
double operator_value(const PauliSum& a, const Binding& binding,
                      const std::function<double(const PauliString&)>& lookup) {
  std::vector<double> parts;
  parts.reserve(a.size());
  for (const auto& t : a.terms()) {
    const Complex c = t.coeff.evaluate(binding);
    if (c == Complex(0.0)) continue;
    parts.push_back(c.real() * lookup(t.string));
  }
  return pairwise_sum(parts);
}

MomentSet moments_with(std::span<const PauliSum> powers, const Binding& binding,
                       const std::function<double(const PauliString&)>& lookup) {
  if (powers.size() != 4) throw UsageError("moments need exactly four operator powers");
  MomentSet out;
  for (std::size_t k = 0; k < 4; ++k) out.m[k] = operator_value(powers[k], binding, lookup);
  return out;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

Assignment with_lambda(Assignment params, double lambda) {
  params[kLambdaName] = lambda;
  return params;
}

}  // namespace

MomentSet compute_moments(std::span<const PauliSum> powers, const ExpectationTable& table) {
  return moments_with(powers, Binding{}, [&](const PauliString& p) { return table.at(p); });
}

MomentSet compute_moments(std::span<const PauliSum> powers, const StateVector& psi) {
  return moments_with(powers, Binding{}, [&](const PauliString& p) {
    return p.is_identity() ? 1.0 : expectation(psi, p);
  });
}

MomentSet compute_moments(std::span<const PauliSum> powers, const DensityMatrix& rho) {
  return moments_with(powers, Binding{}, [&](const PauliString& p) {
    return p.is_identity() ? 1.0 : expectation(rho, p);
  });
}

CumulantSet cumulants(const MomentSet& moments) {
  // mom[0] = <H^0> = 1.
  std::array<double, 5> mom{1.0, moments.m[0], moments.m[1], moments.m[2], moments.m[3]};
  std::array<double, 5> cum{};
  for (int n = 1; n <= 4; ++n) {
    double c = mom[static_cast<std::size_t>(n)];
    for (int p = 0; p <= n - 2; ++p) {
      c -= binomial(n - 1, p) * cum[static_cast<std::size_t>(p + 1)] * mom[static_cast<std::size_t>(n - 1 - p)];
    }
    cum[static_cast<std::size_t>(n)] = c;
  }
  return CumulantSet{{cum[1], cum[2], cum[3], cum[4]}};
}

double default_eigen_tolerance(const CumulantSet& c) { return 1e-10 * std::max(1.0, c[1] * c[1]); }

QcmResult lanczos_energy(const CumulantSet& c, std::optional<double> eigen_tol) {
  const double c1 = c[1], c2 = c[2], c3 = c[3], c4 = c[4];
  QcmResult out;
  out.denominator = c3 * c3 - c2 * c4;
  out.radicand = 3.0 * c3 * c3 - 2.0 * c2 * c4;
  if (c2 < eigen_tol.value_or(default_eigen_tolerance(c))) {
    out.mode = EstimateMode::eigenstate_fallback;
    out.energy = c1;
    return out;
  }
  if (out.radicand < 0.0) {
    throw EstimateError(EstimateError::Kind::invalid_radicand,
                        "invalid estimate: radicand 3c3^2 - 2c2c4 = " + std::to_string(out.radicand) + " < 0");
  }
  const double scale = std::max(c3 * c3, std::abs(c2 * c4));
  if (scale == 0.0 || std::abs(out.denominator) < 1e-14 * scale) {
    throw EstimateError(EstimateError::Kind::singular_denominator,
                        "singular denominator c3^2 - c2c4 = " + std::to_string(out.denominator));
  }
  // sqrt(R) - c3 = (R - c3^2) / (sqrt(R) + c3) and R - c3^2 = 2 (c3^2 - c2 c4),
  // so the bracket over the denominator is 2 / (sqrt(R) + c3).
  out.mode = EstimateMode::lanczos;
  out.energy = c1 - 2.0 * c2 * c2 / (std::sqrt(out.radicand) + c3);
  return out;
}

MomentExpansion::MomentExpansion(const PauliSum& hamiltonian)
    : hamiltonian_(hamiltonian), powers_(sum_power(hamiltonian, 4)) {}

MomentExpansion::MomentExpansion(const PauliSum& hamiltonian, const PauliSum& observable)
    : hamiltonian_(hamiltonian), observable_(observable) {
  if (hamiltonian.n_qubits() != observable.n_qubits()) {
    throw UsageError("Hamiltonian and observable act on different qubit counts");
  }
  if (observable.parameters().count(kLambdaName) || hamiltonian.parameters().count(kLambdaName)) {
    throw UsageError(std::string("parameter name '") + kLambdaName + "' is reserved");
  }
  powers_ = sum_power(hamiltonian + observable.scaled(ParamPoly::variable(kLambdaName)), 4);
}

std::vector<PauliString> MomentExpansion::strings() const {
  std::set<PauliString> all;
  for (const auto& p : powers_) {
    for (const auto& t : p.terms()) all.insert(t.string);
  }
  return {all.begin(), all.end()};
}

std::vector<PauliSum> MomentExpansion::bound_powers(const Assignment& params, double lambda) const {
  const Assignment values = with_lambda(params, lambda);
  std::vector<PauliSum> out;
  for (const auto& p : powers_) out.push_back(bind(p, values, 0.0));
  return out;
}

namespace {

MomentSet expansion_moments(const MomentExpansion& e, const ExpectationTable& table, const Assignment& params,
                            double lambda) {
  return moments_with(e.powers(), Binding(with_lambda(params, lambda)),
                      [&](const PauliString& p) { return table.at(p); });
}

}  // namespace

QcmResult qcm_energy(const MomentExpansion& expansion, const ExpectationTable& table, const Assignment& params) {
  return lanczos_energy(cumulants(expansion_moments(expansion, table, params, 0.0)));
}

double observable_estimate(const MomentExpansion& expansion, const ExpectationTable& table,
                           const Assignment& params, double epsilon) {
  if (!(epsilon > 0.0)) throw UsageError("finite-difference step must be positive");
  if (!expansion.observable()) throw UsageError("expansion has no observable");
  auto energy_at = [&](double lambda, const char* tag) {
    try {
      return lanczos_energy(cumulants(expansion_moments(expansion, table, params, lambda))).energy;
    } catch (const EstimateError& e) {
      throw EstimateError(e.kind(), std::string(tag) + ": " + e.what());
    }
  };
  const double plus = energy_at(epsilon, "at +epsilon");
  const double minus = energy_at(-epsilon, "at -epsilon");
  return (plus - minus) / (2.0 * epsilon);
}

double observable_estimate(const PauliSum& h, const PauliSum& a, const ExpectationTable& table, double epsilon) {
  return observable_estimate(MomentExpansion(h, a), table, {}, epsilon);
}

double observable_estimate(const PauliSum& h, const PauliSum& a, const StateVector& psi, double epsilon) {
  MomentExpansion e(h, a);
  const auto strings = e.strings();
  return observable_estimate(e, expectation_table(psi, strings), {}, epsilon);
}

double observable_estimate(const PauliSum& h, const PauliSum& a, const DensityMatrix& rho, double epsilon) {
  MomentExpansion e(h, a);
  const auto strings = e.strings();
  return observable_estimate(e, expectation_table(rho, strings), {}, epsilon);
}

RichardsonReport observable_richardson(const MomentExpansion& expansion, const ExpectationTable& table,
                                       const Assignment& params, double epsilon) {
  const double full = observable_estimate(expansion, table, params, epsilon);
  const double half = observable_estimate(expansion, table, params, 0.5 * epsilon);
  return {full, half, (4.0 * half - full) / 3.0};
}

double table_expectation(const PauliSum& a, const ExpectationTable& table, const Assignment& params) {
  return operator_value(a, Binding(params), [&](const PauliString& p) { return table.at(p); });
}

std::vector<SweepRow> qcm_sweep(const MomentExpansion& expansion, const ExpectationTable& table,
                                const std::map<std::string, std::vector<double>>& grid, double epsilon) {
  std::vector<SweepRow> rows;
  if (grid.empty()) return rows;
  for (const auto& [name, values] : grid) {
    if (values.empty()) return rows;
  }
  std::vector<std::size_t> index(grid.size(), 0);
  while (true) {
    SweepRow row;
    std::size_t k = 0;
    for (const auto& [name, values] : grid) row.params[name] = values[index[k++]];

    std::vector<std::string> failures;
    row.e_direct = expansion_moments(expansion, table, row.params, 0.0)[1];
    try {
      row.e_l4 = qcm_energy(expansion, table, row.params).energy;
    } catch (const EstimateError& e) {
      failures.push_back(std::string("E_L4 ") + e.what());
    }
    if (expansion.observable()) {
      row.a_direct = table_expectation(*expansion.observable(), table, row.params);
      try {
        row.a_l4 = observable_estimate(expansion, table, row.params, epsilon);
      } catch (const EstimateError& e) {
        failures.push_back(std::string("A_L4 ") + e.what());
      }
    }
    if (!failures.empty()) {
      row.status.clear();
      for (const auto& f : failures) row.status += (row.status.empty() ? "" : "; ") + f;
    }
    rows.push_back(std::move(row));

    // Odometer over grid values, last parameter fastest.
    std::size_t pos = grid.size();
    auto it = grid.end();
    while (pos > 0) {
      --pos;
      --it;
      if (++index[pos] < it->second.size()) break;
      index[pos] = 0;
      if (pos == 0) return rows;
    }
  }
}

}  // namespace qcm
