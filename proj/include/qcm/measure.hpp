#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcm/pauli.hpp"
#include "qcm/states.hpp"

namespace qcm {

/// At every qubit the letters agree or at least one is I.
bool qubitwise_commutes(const PauliString& a, const PauliString& b);

/// Strings measurable in one per-qubit basis setting.
struct TpbGroup {
  /// Measurement basis; qubits outside basis.support() are unconstrained.
  PauliString basis;
  std::vector<PauliString> members;

  /// 'X', 'Y', 'Z', or '*' for unconstrained.
  char basis_letter(int qubit) const;
};

/// Greedy first-fit over the strings sorted by descending weight then canonical
/// order. Identity strings and duplicates are skipped.
std::vector<TpbGroup> group_tpb(std::span<const PauliString> strings);

struct CensusLine {
  std::string convention;
  std::size_t n_strings;
  std::size_t n_tpb;
};

/// Distinct-string and TPB counts for the expansions of (H + lambda A)^1..4,
/// with coefficients kept symbolic so no string vanishes by accident at a
/// particular parameter value.
struct CensusReport {
  std::vector<CensusLine> lines;
  /// Distinct strings in the union of all four powers, identity excluded.
  std::size_t n_strings = 0;
  /// Groups of that set.
  std::size_t n_tpb = 0;
  /// Distinct strings per power (identity excluded), index k-1.
  std::vector<std::size_t> per_power;
  /// Groups per power (identity excluded), index k-1.
  std::vector<std::size_t> tpb_per_power;
};

CensusReport census(const PauliSum& h, const std::optional<PauliSum>& a = std::nullopt, int k = 4);

/// Measurement outcome string, qubit 0 leftmost.
using ShotCounts = std::map<std::string, std::uint64_t>;

/// Rotates `psi` into the group basis (H for X, H S^dag for Y) and draws `shots`
/// Born-rule samples using std::mt19937_64(seed).
ShotCounts sample_shots(const StateVector& psi, const TpbGroup& group, std::uint64_t shots, std::uint64_t seed);

/// Sample mean of the +-1 parity of `p` over `counts`; `p` must be diagonal in
/// the basis the counts were taken in.
double estimate_from_counts(const ShotCounts& counts, const PauliString& p);

}  // namespace qcm
