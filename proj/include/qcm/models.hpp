#pragma once

#include <utility>
#include <vector>

#include "qcm/pauli.hpp"

namespace qcm {

/// Open-boundary chain or square grid. Sites are numbered row-major from 0.
struct LatticeSpec {
  enum class Kind { chain, grid };

  Kind kind = Kind::chain;
  int rows = 1;
  int cols = 2;

  static LatticeSpec chain(int n_sites);
  static LatticeSpec grid(int rows, int cols);

  int n_sites() const { return rows * cols; }
  /// Nearest-neighbour pairs (i, j), i < j, each listed once.
  std::vector<std::pair<int, int>> edges() const;
  /// Throws UsageError unless there are at least two sites.
  void validate() const;
};

/// Parameter names used by the model builders.
inline constexpr const char* kParamX = "x";
inline constexpr const char* kParamG = "g";

/// H = 1/(4q) * sum_<ij> (Z_i Z_j + x (X_i X_j + Y_i Y_j)), symbolic in x.
PauliSum build_xxz(const LatticeSpec& lattice);

/// Z_i Z_j with unit coefficient.
PauliSum build_zz_correlation(const LatticeSpec& lattice, int i, int j);

/// H = 1/4 sum_<ij> (XX + YY + ZZ) + g/2 sum_k (-1)^k Z_k on an open chain,
/// symbolic in g.
PauliSum build_staggered_afm(int n_sites);

/// M = 1/2 sum_k (-1)^k Z_k.
PauliSum build_staggered_magnetisation(int n_sites);

}  // namespace qcm
