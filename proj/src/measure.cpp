#include "qcm/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "qcm/errors.hpp"
#include "qcm/moments.hpp"

namespace qcm {

bool qubitwise_commutes(const PauliString& a, const PauliString& b) {
  if (a.n_qubits != b.n_qubits) {
    throw UsageError("qubit-count mismatch: " + std::to_string(a.n_qubits) + " vs " + std::to_string(b.n_qubits));
  }
  const std::uint64_t overlap = a.support() & b.support();
  return (((a.x_mask ^ b.x_mask) | (a.z_mask ^ b.z_mask)) & overlap) == 0;
}

char TpbGroup::basis_letter(int qubit) const {
  const char l = basis.letter(qubit);
  return l == 'I' ? '*' : l;
}

std::vector<TpbGroup> group_tpb(std::span<const PauliString> strings) {
  std::vector<PauliString> order;
  order.reserve(strings.size());
  {
    std::set<PauliString> seen;
    for (const auto& s : strings) {
      if (!s.is_identity() && seen.insert(s).second) order.push_back(s);
    }
  }
  std::stable_sort(order.begin(), order.end(), [](const PauliString& a, const PauliString& b) {
    if (a.weight() != b.weight()) return a.weight() > b.weight();
    return a < b;
  });
  std::vector<TpbGroup> groups;
  for (const auto& s : order) {
    auto fit = std::find_if(groups.begin(), groups.end(),
                            [&](const TpbGroup& g) { return qubitwise_commutes(g.basis, s); });
    if (fit == groups.end()) {
      groups.push_back({s, {s}});
    } else {
      fit->basis.x_mask |= s.x_mask;
      fit->basis.z_mask |= s.z_mask;
      fit->members.push_back(s);
    }
  }
  return groups;
}

CensusReport census(const PauliSum& h, const std::optional<PauliSum>& a, int k) {
  if (k < 1 || k > 4) throw UsageError("census order must be in 1..4");
  std::vector<PauliSum> powers =
      a ? sum_power(h + a->scaled(ParamPoly::variable(kLambdaName)), k) : sum_power(h, k);

  CensusReport report;
  std::set<PauliString> all;
  bool identity_in_union = false;
  bool identity_in_top = false;
  std::vector<PauliString> top;
  for (int j = 0; j < k; ++j) {
    std::vector<PauliString> layer;
    for (const auto& t : powers[static_cast<std::size_t>(j)].terms()) {
      all.insert(t.string);
      if (t.string.is_identity()) {
        identity_in_union = true;
        if (j == k - 1) identity_in_top = true;
      } else {
        layer.push_back(t.string);
      }
    }
    report.per_power.push_back(layer.size());
    report.tpb_per_power.push_back(group_tpb(layer).size());
    if (j == k - 1) top = std::move(layer);
  }
  std::vector<PauliString> union_strings;
  for (const auto& s : all) {
    if (!s.is_identity()) union_strings.push_back(s);
  }
  report.n_strings = union_strings.size();
  report.n_tpb = group_tpb(union_strings).size();
  const std::size_t top_tpb = report.tpb_per_power.back();
  const std::string kth = "power" + std::to_string(k);
  report.lines = {
      {"union-excl-identity", report.n_strings, report.n_tpb},
      {"union-incl-identity", report.n_strings + (identity_in_union ? 1 : 0), report.n_tpb},
      {kth + "-excl-identity", top.size(), top_tpb},
      {kth + "-incl-identity", top.size() + (identity_in_top ? 1 : 0), top_tpb},
  };
  return report;
}

ShotCounts sample_shots(const StateVector& psi, const TpbGroup& group, std::uint64_t shots, std::uint64_t seed) {
  if (shots < 1) throw UsageError("shot count must be positive");
  if (group.basis.n_qubits != psi.n_qubits()) throw UsageError("group and state qubit counts differ");
  Vector amp = psi.amplitudes();
  const Complex minus_i(0.0, -1.0);
  const double r = 1.0 / std::numbers::sqrt2;
  for (int q = 0; q < psi.n_qubits(); ++q) {
    const char l = group.basis_letter(q);
    if (l != 'X' && l != 'Y') continue;
    const Eigen::Index bit = Eigen::Index{1} << q;
    for (Eigen::Index b = 0; b < amp.size(); ++b) {
      if (b & bit) continue;
      Complex a0 = amp[b];
      Complex a1 = amp[b | bit];
      if (l == 'Y') a1 *= minus_i;  // S^dag
      amp[b] = r * (a0 + a1);
      amp[b | bit] = r * (a0 - a1);
    }
  }
  std::vector<double> cumulative(static_cast<std::size_t>(amp.size()));
  double running = 0.0;
  for (Eigen::Index b = 0; b < amp.size(); ++b) {
    running += std::norm(amp[b]);
    cumulative[static_cast<std::size_t>(b)] = running;
  }
  std::mt19937_64 gen(seed);
  std::vector<std::uint64_t> hits(cumulative.size(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53 * running;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    ++hits[static_cast<std::size_t>(it - cumulative.begin())];
  }
  ShotCounts counts;
  for (std::size_t b = 0; b < hits.size(); ++b) {
    if (hits[b] == 0) continue;
    std::string key(static_cast<std::size_t>(psi.n_qubits()), '0');
    for (int q = 0; q < psi.n_qubits(); ++q) {
      if ((b >> q) & 1u) key[static_cast<std::size_t>(q)] = '1';
    }
    counts[key] = hits[b];
  }
  return counts;
}

double estimate_from_counts(const ShotCounts& counts, const PauliString& p) {
  double total = 0.0;
  double signed_sum = 0.0;
  for (const auto& [key, n] : counts) {
    if (static_cast<int>(key.size()) != p.n_qubits) throw UsageError("outcome length does not match the string");
    int parity = 0;
    for (int q = 0; q < p.n_qubits; ++q) {
      if (((p.support() >> q) & 1u) && key[static_cast<std::size_t>(q)] == '1') parity ^= 1;
    }
    total += static_cast<double>(n);
    signed_sum += (parity ? -1.0 : 1.0) * static_cast<double>(n);
  }
  if (total == 0.0) throw UsageError("no shots recorded");
  return signed_sum / total;
}

}  // namespace qcm
