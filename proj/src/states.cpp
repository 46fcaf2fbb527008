#include "qcm/states.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "qcm/errors.hpp"

namespace qcm {

namespace {

std::atomic<std::uint64_t> g_contractions{0};
std::atomic<std::uint64_t> g_table_builds{0};

void require_register(int n_qubits, Eigen::Index dim) {
  if (n_qubits < 1 || n_qubits > 30) throw UsageError("register size must be in 1..30 qubits");
  if (dim != (Eigen::Index{1} << n_qubits)) {
    throw UsageError("dimension " + std::to_string(dim) + " does not match " + std::to_string(n_qubits) +
                     " qubits");
  }
}

void require_same_qubits(int a, int b) {
  if (a != b) throw UsageError("qubit-count mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

// <b ^ x| P |b> = i^{|x&z|} (-1)^{|z&b|}; returned as the i-power and the sign.
inline double z_sign(std::uint64_t z_mask, std::uint64_t b) {
  return (std::popcount(z_mask & b) & 1) ? -1.0 : 1.0;
}

Complex y_phase(const PauliString& p) { return Phase{std::popcount(p.x_mask & p.z_mask) & 3}.value(); }

double expectation_kernel(const Vector& psi, const PauliString& p) {
  const auto x = static_cast<Eigen::Index>(p.x_mask);
  Complex acc = 0.0;
  for (Eigen::Index b = 0; b < psi.size(); ++b) {
    acc += z_sign(p.z_mask, static_cast<std::uint64_t>(b)) * std::conj(psi[b ^ x]) * psi[b];
  }
  return (y_phase(p) * acc).real();
}

double expectation_kernel(const Matrix& rho, const PauliString& p) {
  // Tr(rho P) = sum_b rho(b, b ^ x) <b ^ x|P|b>.
  const auto x = static_cast<Eigen::Index>(p.x_mask);
  Complex acc = 0.0;
  for (Eigen::Index b = 0; b < rho.rows(); ++b) {
    acc += z_sign(p.z_mask, static_cast<std::uint64_t>(b)) * rho(b, b ^ x);
  }
  return (y_phase(p) * acc).real();
}

struct DisjointSets {
  std::vector<std::uint32_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// 53-bit uniform in [0, 1).
double uniform53(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace

StateVector::StateVector(int n_qubits, Vector amplitudes) : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
  require_register(n_qubits_, amplitudes_.size());
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-12) {
    throw UsageError("state vector is not normalized (norm " + std::to_string(amplitudes_.norm()) + ")");
  }
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
  Vector v = Vector::Zero(Eigen::Index{1} << n_qubits);
  if (index >= static_cast<std::uint64_t>(v.size())) throw UsageError("basis index out of range");
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return {n_qubits, std::move(v)};
}

StateVector StateVector::normalized(int n_qubits, Vector amplitudes) {
  const double norm = amplitudes.norm();
  if (norm == 0.0) throw UsageError("cannot normalize the zero vector");
  amplitudes /= norm;
  return {n_qubits, std::move(amplitudes)};
}

DensityMatrix::DensityMatrix(int n_qubits, Matrix rho) : n_qubits_(n_qubits), rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols()) throw UsageError("density matrix must be square");
  require_register(n_qubits_, rho_.rows());
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw UsageError("density matrix is not Hermitian");
  if (std::abs(rho_.trace() - Complex(1.0)) > 1e-12) throw UsageError("density matrix trace is not 1");
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  Matrix rho = psi.amplitudes() * psi.amplitudes().adjoint();
  return {psi.n_qubits(), std::move(rho)};
}

HermitianMatrix::HermitianMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) throw UsageError("Hermitian matrix must be square and nonempty");
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw UsageError("matrix is not Hermitian");
}

Matrix to_dense(const PauliSum& a) {
  if (!a.is_bound()) throw UnboundParameterError(*a.parameters().begin());
  const Eigen::Index dim = Eigen::Index{1} << a.n_qubits();
  Matrix out = Matrix::Zero(dim, dim);
  for (const auto& t : a.terms()) {
    const Complex c = t.coeff.constant_term() * y_phase(t.string);
    const auto x = static_cast<Eigen::Index>(t.string.x_mask);
    for (Eigen::Index b = 0; b < dim; ++b) out(b ^ x, b) += c * z_sign(t.string.z_mask, static_cast<std::uint64_t>(b));
  }
  return out;
}

GroundState exact_ground_state(const PauliSum& h) {
  const int n = h.n_qubits();
  if (n > kMaxExactQubits) {
    throw StateError("exact diagonalization budget exceeded: " + std::to_string(n) + " qubits > " +
                     std::to_string(kMaxExactQubits));
  }
  if (!h.is_bound()) throw UnboundParameterError(*h.parameters().begin());
  const std::uint64_t dim = std::uint64_t{1} << n;

  // Sparse columns grouped by flip pattern: every term sharing an x_mask maps
  // |b> to |b ^ x>.
  std::vector<std::uint64_t> flips;
  for (const auto& t : h.terms()) flips.push_back(t.string.x_mask);
  std::sort(flips.begin(), flips.end());
  flips.erase(std::unique(flips.begin(), flips.end()), flips.end());

  struct Entry {
    std::uint64_t row;
    std::uint64_t col;
    Complex value;
  };
  std::vector<Entry> entries;
  DisjointSets sets(dim);
  for (std::uint64_t x : flips) {
    for (std::uint64_t b = 0; b < dim; ++b) {
      Complex v = 0.0;
      for (const auto& t : h.terms()) {
        if (t.string.x_mask != x) continue;
        v += t.coeff.constant_term() * y_phase(t.string) * z_sign(t.string.z_mask, b);
      }
      if (std::abs(v) < 1e-14) continue;
      entries.push_back({b ^ x, b, v});
      sets.unite(static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b ^ x));
    }
  }

  // Blocks in order of their lowest basis index.
  std::vector<std::vector<std::uint64_t>> blocks;
  std::vector<std::int64_t> block_of_root(dim, -1);
  std::vector<std::uint32_t> local(dim);
  std::vector<std::uint32_t> block_id(dim);
  for (std::uint64_t b = 0; b < dim; ++b) {
    const std::uint32_t r = sets.find(static_cast<std::uint32_t>(b));
    if (block_of_root[r] < 0) {
      block_of_root[r] = static_cast<std::int64_t>(blocks.size());
      blocks.emplace_back();
    }
    auto& blk = blocks[static_cast<std::size_t>(block_of_root[r])];
    block_id[b] = static_cast<std::uint32_t>(block_of_root[r]);
    local[b] = static_cast<std::uint32_t>(blk.size());
    blk.push_back(b);
  }
  std::vector<Matrix> block_mats(blocks.size());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto m = static_cast<Eigen::Index>(blocks[k].size());
    block_mats[k] = Matrix::Zero(m, m);
  }
  std::vector<bool> block_real(blocks.size(), true);
  for (const auto& e : entries) {
    block_mats[block_id[e.col]](local[e.row], local[e.col]) += e.value;
    if (e.value.imag() != 0.0) block_real[block_id[e.col]] = false;
  }

  // Eigenvalues of every block first; eigenvectors only where the minimum is reached.
  auto lowest = [&](std::size_t k) {
    if (block_real[k]) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block_mats[k].real(), Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success) throw StateError("eigensolver failed to converge");
      return es.eigenvalues()[0];
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(block_mats[k], Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw StateError("eigensolver failed to converge");
    return es.eigenvalues()[0];
  };
  std::vector<double> block_min(blocks.size());
  double e0 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    block_min[k] = lowest(k);
    e0 = std::min(e0, block_min[k]);
  }

  struct Pair {
    double energy;
    std::size_t block;
    Vector vec;
  };
  std::vector<Pair> low;
  const double degeneracy_tol = 1e-9 * std::max(1.0, std::abs(e0));
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (block_min[k] > e0 + degeneracy_tol) continue;
    Eigen::VectorXd vals;
    Matrix vecs;
    if (block_real[k]) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block_mats[k].real());
      if (es.info() != Eigen::Success) throw StateError("eigensolver failed to converge");
      vals = es.eigenvalues();
      vecs = es.eigenvectors().cast<Complex>();
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> es(block_mats[k]);
      if (es.info() != Eigen::Success) throw StateError("eigensolver failed to converge");
      vals = es.eigenvalues();
      vecs = es.eigenvectors();
    }
    for (Eigen::Index j = 0; j < vals.size() && vals[j] <= e0 + degeneracy_tol; ++j) {
      low.push_back({vals[j], k, vecs.col(j)});
    }
  }

  // Lowest basis index with a visible projection onto the ground space.
  std::uint64_t pick = dim;
  for (std::uint64_t b = 0; b < dim && pick == dim; ++b) {
    double weight = 0.0;
    for (const auto& p : low) {
      if (p.block == block_id[b]) weight += std::norm(p.vec[local[b]]);
    }
    if (weight > 1e-16) pick = b;
  }
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(dim));
  for (const auto& p : low) {
    if (p.block != block_id[pick]) continue;
    const Complex overlap = std::conj(p.vec[local[pick]]);
    const auto& blk = blocks[p.block];
    for (std::size_t j = 0; j < blk.size(); ++j) {
      psi[static_cast<Eigen::Index>(blk[j])] += p.vec[static_cast<Eigen::Index>(j)] * overlap;
    }
  }
  return {e0, StateVector::normalized(n, std::move(psi)), static_cast<int>(low.size())};
}

double expectation(const StateVector& psi, const PauliString& p) {
  require_same_qubits(psi.n_qubits(), p.n_qubits);
  g_contractions.fetch_add(1, std::memory_order_relaxed);
  return expectation_kernel(psi.amplitudes(), p);
}

double expectation(const DensityMatrix& rho, const PauliString& p) {
  require_same_qubits(rho.n_qubits(), p.n_qubits);
  g_contractions.fetch_add(1, std::memory_order_relaxed);
  return expectation_kernel(rho.matrix(), p);
}

double expectation(const StateVector& psi, const PauliSum& a) {
  double sum = 0.0;
  for (const auto& t : a.terms()) {
    Complex c = t.coeff.evaluate(Binding{});
    sum += (c * expectation(psi, t.string)).real();
  }
  return sum;
}

double expectation(const DensityMatrix& rho, const PauliSum& a) {
  double sum = 0.0;
  for (const auto& t : a.terms()) {
    Complex c = t.coeff.evaluate(Binding{});
    sum += (c * expectation(rho, t.string)).real();
  }
  return sum;
}

double ExpectationTable::at(const PauliString& p) const {
  if (p.is_identity()) return 1.0;
  auto it = values_.find(p);
  if (it == values_.end()) throw MissingStringError(p);
  return it->second;
}

ExpectationTable expectation_table(const StateVector& psi, std::span<const PauliString> strings) {
  g_table_builds.fetch_add(1, std::memory_order_relaxed);
  ExpectationTable table(psi.n_qubits());
  for (const auto& p : strings) table.insert(p, p.is_identity() ? 1.0 : expectation(psi, p));
  return table;
}

ExpectationTable expectation_table(const DensityMatrix& rho, std::span<const PauliString> strings) {
  g_table_builds.fetch_add(1, std::memory_order_relaxed);
  ExpectationTable table(rho.n_qubits());
  for (const auto& p : strings) table.insert(p, p.is_identity() ? 1.0 : expectation(rho, p));
  return table;
}

Instrumentation instrumentation() {
  return {g_contractions.load(std::memory_order_relaxed), g_table_builds.load(std::memory_order_relaxed)};
}

void reset_instrumentation() {
  g_contractions.store(0);
  g_table_builds.store(0);
}

DensityMatrix depolarize(const DensityMatrix& rho, double p, NoiseMode mode) {
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("depolarizing strength must be in [0, 1]");
  const Eigen::Index dim = rho.dim();
  if (mode == NoiseMode::global) {
    Matrix out = (1.0 - p) * rho.matrix();
    out.diagonal().array() += p / static_cast<double>(dim);
    return {rho.n_qubits(), std::move(out)};
  }
  // Single-qubit channel in the equivalent form (1 - p) rho + p (I/2) Tr_q rho:
  // entries diagonal in qubit q mix with their flipped partner, the rest shrink.
  Matrix cur = rho.matrix();
  Matrix next(dim, dim);
  for (int q = 0; q < rho.n_qubits(); ++q) {
    const Eigen::Index bit = Eigen::Index{1} << q;
    for (Eigen::Index c = 0; c < dim; ++c) {
      for (Eigen::Index r = 0; r < dim; ++r) {
        if (((r ^ c) & bit) == 0) {
          next(r, c) = (1.0 - 0.5 * p) * cur(r, c) + 0.5 * p * cur(r ^ bit, c ^ bit);
        } else {
          next(r, c) = (1.0 - p) * cur(r, c);
        }
      }
    }
    cur.swap(next);
  }
  // Restore exact Hermiticity lost to rounding.
  Matrix herm = 0.5 * (cur + cur.adjoint());
  return {rho.n_qubits(), std::move(herm)};
}

HermitianMatrix random_gue_hermitian(int dim, std::uint64_t seed) {
  if (dim < 1) throw UsageError("GUE dimension must be positive");
  std::mt19937_64 gen(seed);
  Matrix a(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double u1 = 1.0 - uniform53(gen);  // (0, 1]
      const double u2 = uniform53(gen);
      const double radius = std::sqrt(-2.0 * std::log(u1));
      const double angle = 2.0 * std::numbers::pi * u2;
      a(r, c) = Complex(radius * std::cos(angle), radius * std::sin(angle)) / std::numbers::sqrt2;
    }
  }
  Matrix m = 0.5 * (a + a.adjoint());
  return HermitianMatrix(std::move(m));
}

TrialRotation::TrialRotation(const StateVector& psi0, const HermitianMatrix& m) : n_qubits_(psi0.n_qubits()) {
  if (m.dim() != psi0.dim()) throw UsageError("rotation generator dimension does not match the state");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix());
  if (solver.info() != Eigen::Success) throw StateError("eigensolver failed to converge");
  eigenvectors_ = solver.eigenvectors();
  eigenvalues_ = solver.eigenvalues();
  coords_ = eigenvectors_.adjoint() * psi0.amplitudes();
}

StateVector TrialRotation::at(double theta) const {
  Vector phased = coords_;
  for (Eigen::Index k = 0; k < phased.size(); ++k) phased[k] *= std::polar(1.0, -theta * eigenvalues_[k]);
  return StateVector::normalized(n_qubits_, eigenvectors_ * phased);
}

double TrialRotation::fidelity_at(double theta) const {
  Complex overlap = 0.0;
  for (Eigen::Index k = 0; k < coords_.size(); ++k) {
    overlap += std::norm(coords_[k]) * std::polar(1.0, -theta * eigenvalues_[k]);
  }
  return std::norm(overlap);
}

StateVector rotate_trial(const StateVector& psi0, const HermitianMatrix& m, double theta) {
  if (theta == 0.0) {
    if (m.dim() != psi0.dim()) throw UsageError("rotation generator dimension does not match the state");
    return psi0;
  }
  return TrialRotation(psi0, m).at(theta);
}

double fidelity(const StateVector& a, const StateVector& b) {
  require_same_qubits(a.n_qubits(), b.n_qubits());
  return std::min(1.0, std::norm(a.amplitudes().dot(b.amplitudes())));
}

double fidelity(const StateVector& a, const DensityMatrix& rho) {
  require_same_qubits(a.n_qubits(), rho.n_qubits());
  const Complex f = a.amplitudes().dot(rho.matrix() * a.amplitudes());
  return std::clamp(f.real(), 0.0, 1.0);
}

ThetaTuning tune_theta_for_fidelity(const StateVector& psi0, const HermitianMatrix& m, double target, double tol) {
  if (!(target > 0.0 && target <= 1.0)) throw UsageError("fidelity target must be in (0, 1]");
  const TrialRotation rotation(psi0, m);
  constexpr double kStep = 0.01;
  constexpr double kMaxTheta = 10.0;
  // F(0) = 1 up to rounding, and F = 1 is only reached at theta = 0.
  if (target >= 1.0 || rotation.fidelity_at(0.0) <= target) return {0.0, fidelity(psi0, psi0)};

  double lo = 0.0;
  double hi = -1.0;
  for (int k = 1; k * kStep <= kMaxTheta + 1e-12; ++k) {
    const double theta = k * kStep;
    if (rotation.fidelity_at(theta) <= target) {
      hi = theta;
      break;
    }
    lo = theta;
  }
  if (hi < 0.0) throw StateError("fidelity target " + std::to_string(target) + " not reached for theta <= 10");

  double theta = hi;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f = rotation.fidelity_at(mid);
    if (f > target) {
      lo = mid;
    } else {
      hi = mid;
    }
    theta = hi;
    if (std::abs(rotation.fidelity_at(hi) - target) <= 1e-3 * tol || hi - lo < 1e-15) break;
  }
  const double achieved = fidelity(rotation.at(theta), psi0);
  if (std::abs(achieved - target) > tol) {
    throw StateError("fidelity bisection did not converge to tolerance");
  }
  return {theta, achieved};
}

}  // namespace qcm
