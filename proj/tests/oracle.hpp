#pragma once

// Independent reference implementations for tests: Pauli strings and sums as
// explicit Kronecker products, and small random generators.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "qcm/pauli.hpp"
#include "qcm/states.hpp"

namespace oracle {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat pauli_2x2(char letter) {
  Mat m(2, 2);
  const Complex i(0.0, 1.0);
  switch (letter) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
  }
  return out;
}

// Basis index bit q is qubit q, so qubit n-1 is the leftmost Kronecker factor.
inline Mat dense(const qcm::PauliString& p) {
  Mat m = Mat::Identity(1, 1);
  for (int q = p.n_qubits - 1; q >= 0; --q) m = kron(m, pauli_2x2(p.letter(q)));
  return m;
}

inline Mat dense(const qcm::PauliSum& a, const qcm::Assignment& values = {}) {
  const Eigen::Index dim = Eigen::Index{1} << a.n_qubits();
  Mat m = Mat::Zero(dim, dim);
  for (const auto& t : a.terms()) m += t.coeff.evaluate(values) * dense(t.string);
  return m;
}

inline qcm::PauliString random_string(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<std::uint64_t> bits(0, (std::uint64_t{1} << n) - 1);
  return {n, bits(rng), bits(rng)};
}

// Real-coefficient sum, hence Hermitian.
inline qcm::PauliSum random_hermitian_sum(std::mt19937_64& rng, int n, int n_terms) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<qcm::PauliSum::Term> terms;
  for (int k = 0; k < n_terms; ++k) terms.push_back({random_string(rng, n), coeff(rng)});
  return {n, terms};
}

inline qcm::PauliSum random_complex_sum(std::mt19937_64& rng, int n, int n_terms) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<qcm::PauliSum::Term> terms;
  for (int k = 0; k < n_terms; ++k) terms.push_back({random_string(rng, n), Complex(coeff(rng), coeff(rng))});
  return {n, terms};
}

inline qcm::StateVector random_state(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Vec v(Eigen::Index{1} << n);
  for (auto& a : v) a = Complex(g(rng), g(rng));
  return qcm::StateVector::normalized(n, v);
}

inline qcm::DensityMatrix random_density(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  const Eigen::Index dim = Eigen::Index{1} << n;
  Mat a(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) a(r, c) = Complex(g(rng), g(rng));
  }
  Mat rho = a * a.adjoint();
  rho /= rho.trace();
  return {n, rho};
}

// <psi| H^k |psi> for k = 1..4 by repeated dense multiplication.
inline std::vector<double> brute_moments(const Mat& h, const Vec& psi) {
  std::vector<double> out;
  Vec v = psi;
  for (int k = 1; k <= 4; ++k) {
    v = h * v;
    out.push_back(psi.dot(v).real());
  }
  return out;
}

}  // namespace oracle
