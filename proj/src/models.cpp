#include "qcm/models.hpp"

#include <string>

#include "qcm/errors.hpp"

namespace qcm {

namespace {

PauliString pair_string(int n, int i, int j, char letter) {
  return PauliString::from_letters(n, {{i, letter}, {j, letter}});
}

double stagger_sign(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

LatticeSpec LatticeSpec::chain(int n_sites) {
  LatticeSpec l{Kind::chain, 1, n_sites};
  l.validate();
  return l;
}

LatticeSpec LatticeSpec::grid(int rows, int cols) {
  LatticeSpec l{Kind::grid, rows, cols};
  l.validate();
  return l;
}

void LatticeSpec::validate() const {
  if (rows < 1 || cols < 1 || n_sites() < 2) {
    throw UsageError("lattice needs at least two sites (rows=" + std::to_string(rows) +
                     ", cols=" + std::to_string(cols) + ")");
  }
  if (n_sites() > PauliString::kMaxQubits) throw UsageError("lattice exceeds 64 sites");
}

std::vector<std::pair<int, int>> LatticeSpec::edges() const {
  validate();
  std::vector<std::pair<int, int>> out;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int site = r * cols + c;
      if (c + 1 < cols) out.emplace_back(site, site + 1);
      if (r + 1 < rows) out.emplace_back(site, site + cols);
    }
  }
  return out;
}

PauliSum build_xxz(const LatticeSpec& lattice) {
  const int q = lattice.n_sites();
  const double scale = 1.0 / (4.0 * q);
  const ParamPoly transverse = ParamPoly::variable(kParamX, scale);
  std::vector<PauliSum::Term> terms;
  for (auto [i, j] : lattice.edges()) {
    terms.push_back({pair_string(q, i, j, 'Z'), scale});
    terms.push_back({pair_string(q, i, j, 'X'), transverse});
    terms.push_back({pair_string(q, i, j, 'Y'), transverse});
  }
  return PauliSum(q, std::move(terms));
}

PauliSum build_zz_correlation(const LatticeSpec& lattice, int i, int j) {
  const int q = lattice.n_sites();
  if (i < 0 || j < 0 || i >= q || j >= q) {
    throw UsageError("correlation site out of range: (" + std::to_string(i) + ", " + std::to_string(j) + ")");
  }
  if (i == j) throw UsageError("correlation sites must differ");
  return PauliSum::from_string(pair_string(q, i, j, 'Z'));
}

PauliSum build_staggered_afm(int n_sites) {
  const LatticeSpec chain = LatticeSpec::chain(n_sites);
  std::vector<PauliSum::Term> terms;
  for (auto [i, j] : chain.edges()) {
    for (char l : {'X', 'Y', 'Z'}) terms.push_back({pair_string(n_sites, i, j, l), 0.25});
  }
  for (int k = 0; k < n_sites; ++k) {
    terms.push_back({PauliString::single(n_sites, k, 'Z'), ParamPoly::variable(kParamG, 0.5 * stagger_sign(k))});
  }
  return PauliSum(n_sites, std::move(terms));
}

PauliSum build_staggered_magnetisation(int n_sites) {
  if (n_sites < 1) throw UsageError("staggered magnetisation needs at least one site");
  std::vector<PauliSum::Term> terms;
  for (int k = 0; k < n_sites; ++k) {
    terms.push_back({PauliString::single(n_sites, k, 'Z'), 0.5 * stagger_sign(k)});
  }
  return PauliSum(n_sites, std::move(terms));
}

}  // namespace qcm
