#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "qcm/errors.hpp"
#include "qcm/models.hpp"
#include "qcm/states.hpp"

using qcm::DensityMatrix;
using qcm::PauliString;
using qcm::PauliSum;
using qcm::StateVector;

TEST(States, ExpectationMatchesKronecker) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    const auto psi = oracle::random_state(rng, n);
    const auto rho = oracle::random_density(rng, n);
    const auto p = oracle::random_string(rng, n);
    const oracle::Mat m = oracle::dense(p);
    EXPECT_NEAR(qcm::expectation(psi, p), psi.amplitudes().dot(m * psi.amplitudes()).real(), 1e-13);
    EXPECT_NEAR(qcm::expectation(rho, p), (rho.matrix() * m).trace().real(), 1e-13);
  }
}

TEST(States, PureDensityMatrixAgreesWithVector) {
  std::mt19937_64 rng(2);
  const auto psi = oracle::random_state(rng, 3);
  const auto rho = DensityMatrix::pure(psi);
  const auto h = oracle::random_hermitian_sum(rng, 3, 8);
  EXPECT_NEAR(qcm::expectation(psi, h), qcm::expectation(rho, h), 1e-13);
}

TEST(States, ConstructorsValidate) {
  EXPECT_THROW(StateVector(2, oracle::Vec::Ones(4)), qcm::UsageError);
  EXPECT_THROW(StateVector(2, oracle::Vec::Ones(3)), qcm::UsageError);
  oracle::Mat bad = oracle::Mat::Identity(2, 2);
  EXPECT_THROW(DensityMatrix(1, bad), qcm::UsageError);
}

TEST(GroundState, MatchesDenseEigensolverOnRandomHamiltonians) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 3;
    const auto h = oracle::random_hermitian_sum(rng, n, 6);
    const Eigen::SelfAdjointEigenSolver<oracle::Mat> es(oracle::dense(h));
    const auto gs = qcm::exact_ground_state(h);
    EXPECT_NEAR(gs.energy, es.eigenvalues()[0], 1e-12);
    const oracle::Vec hv = oracle::dense(h) * gs.state.amplitudes();
    EXPECT_LT((hv - gs.energy * gs.state.amplitudes()).norm(), 1e-10);
  }
}

TEST(GroundState, NeelAtZeroCoupling) {
  const auto h = qcm::bind(qcm::build_xxz(qcm::LatticeSpec::grid(3, 4)), {{"x", 0.0}});
  const auto gs = qcm::exact_ground_state(h);
  EXPECT_NEAR(gs.energy, -17.0 / 48.0, 1e-14);
  // Two Neel patterns; the tie-break keeps the lower basis index.
  EXPECT_EQ(gs.degeneracy, 2);
  double largest = 0.0;
  for (Eigen::Index b = 0; b < gs.state.dim(); ++b) largest = std::max(largest, std::abs(gs.state[b]));
  EXPECT_NEAR(largest, 1.0, 1e-12);
}

TEST(GroundState, DegenerateTieBreakIsDeterministic) {
  // Z0 Z1 has ground states |01> and |10>; the lowest index with weight is 1.
  const PauliSum h = PauliSum::from_string(PauliString::parse("ZZ"));
  const auto a = qcm::exact_ground_state(h);
  const auto b = qcm::exact_ground_state(h);
  EXPECT_EQ(a.degeneracy, 2);
  EXPECT_EQ(a.state.amplitudes(), b.state.amplitudes());
  EXPECT_NEAR(std::abs(a.state[1]), 1.0, 1e-12);
}

TEST(GroundState, BudgetAndBindingChecked) {
  const auto h = qcm::build_xxz(qcm::LatticeSpec::chain(3));
  EXPECT_THROW(qcm::exact_ground_state(h), qcm::UnboundParameterError);
  const auto big = PauliSum::from_string(PauliString::identity(15));
  EXPECT_THROW(qcm::exact_ground_state(big), qcm::StateError);
}

TEST(ExpectationTable, LookupsAndInstrumentation) {
  std::mt19937_64 rng(6);
  const auto psi = oracle::random_state(rng, 3);
  const std::vector<PauliString> strings{PauliString::parse("XIZ"), PauliString::parse("YYI")};
  qcm::reset_instrumentation();
  const auto table = qcm::expectation_table(psi, strings);
  EXPECT_EQ(qcm::instrumentation().table_builds, 1u);
  EXPECT_EQ(qcm::instrumentation().contractions, 2u);
  EXPECT_EQ(table.at(PauliString::identity(3)), 1.0);
  EXPECT_EQ(table.at(strings[0]), qcm::expectation(psi, strings[0]));
  EXPECT_THROW(table.at(PauliString::parse("ZZZ")), qcm::MissingStringError);
}

TEST(Depolarize, ContractsEachPauliByWeight) {
  std::mt19937_64 rng(7);
  for (int n : {1, 2, 3}) {
    const auto rho = oracle::random_density(rng, n);
    for (double p : {0.0, 0.1, 0.37, 1.0}) {
      const auto out = qcm::depolarize(rho, p);
      for (std::uint64_t x = 0; x < (1u << n); ++x) {
        for (std::uint64_t z = 0; z < (1u << n); ++z) {
          const PauliString s{n, x, z};
          const double factor = std::pow(1.0 - p, s.weight());
          EXPECT_NEAR(qcm::expectation(out, s), factor * qcm::expectation(rho, s), 1e-12);
        }
      }
    }
  }
}

TEST(Depolarize, GlobalModeMixesTowardIdentity) {
  std::mt19937_64 rng(8);
  const auto rho = oracle::random_density(rng, 2);
  const auto out = qcm::depolarize(rho, 0.3, qcm::NoiseMode::global);
  const oracle::Mat expected = 0.7 * rho.matrix() + 0.3 * oracle::Mat::Identity(4, 4) / 4.0;
  EXPECT_LT((out.matrix() - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(qcm::depolarize(rho, 1.5), qcm::UsageError);
  EXPECT_THROW(qcm::depolarize(rho, -0.1), qcm::UsageError);
}

TEST(Gue, HermitianAndSeedDeterministic) {
  const auto a = qcm::random_gue_hermitian(8, 99);
  const auto b = qcm::random_gue_hermitian(8, 99);
  const auto c = qcm::random_gue_hermitian(8, 100);
  EXPECT_EQ(a.matrix(), b.matrix());
  EXPECT_NE(a.matrix(), c.matrix());
  EXPECT_LT((a.matrix() - a.matrix().adjoint()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Gue, EntryVarianceIsOneHalf) {
  // Off-diagonal M_rc = (a_rc + conj(a_cr)) / 2 with E|a|^2 = 1 gives E|M_rc|^2 = 1/2.
  const auto m = qcm::random_gue_hermitian(200, 5).matrix();
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = r + 1; c < m.cols(); ++c) {
      sum += std::norm(m(r, c));
      ++count;
    }
  }
  EXPECT_NEAR(sum / count, 0.5, 0.02);
}

TEST(TrialRotation, FidelityTuningHitsTarget) {
  std::mt19937_64 rng(9);
  const auto psi0 = oracle::random_state(rng, 3);
  const auto m = qcm::random_gue_hermitian(8, 3);
  const qcm::TrialRotation rot(psi0, m);
  EXPECT_NEAR(rot.fidelity_at(0.0), 1.0, 1e-12);
  for (double target : {0.4, 0.7, 0.9}) {
    const auto t = qcm::tune_theta_for_fidelity(psi0, m, target);
    EXPECT_NEAR(t.fidelity, target, 1e-3);
    EXPECT_NEAR(qcm::fidelity(rot.at(t.theta), psi0), t.fidelity, 1e-12);
    EXPECT_NEAR(rot.fidelity_at(t.theta), t.fidelity, 1e-10);
  }
  const auto unit = qcm::tune_theta_for_fidelity(psi0, m, 1.0);
  EXPECT_EQ(unit.theta, 0.0);
}

TEST(TrialRotation, UnreachableTargetThrows) {
  // psi0 is an eigenvector of M, so the rotation only adds a phase.
  const auto psi0 = StateVector::basis(1, 0);
  oracle::Mat diag = oracle::Mat::Zero(2, 2);
  diag(0, 0) = 1.0;
  diag(1, 1) = -1.0;
  EXPECT_THROW(qcm::tune_theta_for_fidelity(psi0, qcm::HermitianMatrix(diag), 0.5), qcm::StateError);
}
