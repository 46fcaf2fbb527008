#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracle.hpp"
#include "qcm/measure.hpp"
#include "qcm/models.hpp"

using qcm::PauliString;

TEST(Tpb, QubitwiseCommutation) {
  EXPECT_TRUE(qcm::qubitwise_commutes(PauliString::parse("XIZ"), PauliString::parse("XYI")));
  EXPECT_FALSE(qcm::qubitwise_commutes(PauliString::parse("XIZ"), PauliString::parse("ZIZ")));
  // XX and YY commute but not qubit-wise.
  EXPECT_FALSE(qcm::qubitwise_commutes(PauliString::parse("XX"), PauliString::parse("YY")));
}

TEST(Tpb, GroupsAreSoundAndOrderIndependent) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PauliString> strings;
    for (int k = 0; k < 60; ++k) strings.push_back(oracle::random_string(rng, 5));
    const auto groups = qcm::group_tpb(strings);
    std::set<PauliString> distinct;
    for (const auto& s : strings) {
      if (!s.is_identity()) distinct.insert(s);
    }
    std::size_t members = 0;
    for (const auto& g : groups) {
      members += g.members.size();
      for (std::size_t i = 0; i < g.members.size(); ++i) {
        EXPECT_TRUE(qcm::qubitwise_commutes(g.basis, g.members[i]));
        for (std::size_t j = i + 1; j < g.members.size(); ++j) {
          EXPECT_TRUE(qcm::qubitwise_commutes(g.members[i], g.members[j]));
        }
      }
    }
    EXPECT_EQ(members, distinct.size());
    EXPECT_LE(groups.size(), distinct.size());

    auto shuffled = strings;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto again = qcm::group_tpb(shuffled);
    ASSERT_EQ(again.size(), groups.size());
    for (std::size_t k = 0; k < groups.size(); ++k) EXPECT_EQ(again[k].members, groups[k].members);
  }
}

TEST(Census, SymbolicCountMatchesDenseDecompositionAtGenericX) {
  // Oracle: Pauli components Tr(P H^k) / 2^n of dense powers at a generic x.
  const auto lat = qcm::LatticeSpec::grid(2, 2);
  const auto h = qcm::build_xxz(lat);
  const auto report = qcm::census(h);
  const oracle::Mat hd = oracle::dense(h, {{"x", 0.3718}});
  std::set<std::pair<std::uint64_t, std::uint64_t>> nonzero;
  oracle::Mat power = oracle::Mat::Identity(16, 16);
  for (int k = 1; k <= 4; ++k) {
    power = power * hd;
    for (std::uint64_t x = 0; x < 16; ++x) {
      for (std::uint64_t z = 0; z < 16; ++z) {
        const PauliString p{4, x, z};
        if (p.is_identity()) continue;
        if (std::abs((oracle::dense(p) * power).trace()) / 16.0 > 1e-12) nonzero.insert({x, z});
      }
    }
  }
  EXPECT_EQ(report.n_strings, nonzero.size());
  ASSERT_EQ(report.lines.size(), 4u);
  EXPECT_EQ(report.lines[1].convention, "union-incl-identity");
  EXPECT_EQ(report.lines[1].n_strings, nonzero.size() + 1);
}

TEST(Census, TpbGrowsSublinearlyAcrossPowers) {
  const auto report = qcm::census(qcm::build_xxz(qcm::LatticeSpec::grid(3, 4)));
  ASSERT_EQ(report.per_power.size(), 4u);
  for (std::size_t k = 1; k < 4; ++k) {
    EXPECT_GT(report.per_power[k], report.per_power[k - 1]);
    EXPECT_GE(report.tpb_per_power[k], report.tpb_per_power[k - 1]);
    const double string_growth = double(report.per_power[k]) / double(report.per_power[k - 1]);
    const double tpb_growth = double(report.tpb_per_power[k]) / double(report.tpb_per_power[k - 1]);
    EXPECT_LT(tpb_growth, string_growth);
  }
}

TEST(Shots, EstimatesConvergeToExpectation) {
  std::mt19937_64 rng(67);
  const auto psi = oracle::random_state(rng, 3);
  const std::vector<PauliString> strings{PauliString::parse("XIY"), PauliString::parse("XZI"),
                                         PauliString::parse("IZY")};
  const auto groups = qcm::group_tpb(strings);
  ASSERT_EQ(groups.size(), 1u);
  const std::uint64_t shots = 200000;
  const auto counts = qcm::sample_shots(psi, groups[0], shots, 123);
  for (const auto& s : strings) {
    const double exact = qcm::expectation(psi, s);
    const double sigma = std::sqrt((1.0 - exact * exact) / double(shots));
    EXPECT_LT(std::abs(qcm::estimate_from_counts(counts, s) - exact), 5.0 * sigma + 1e-12) << s.to_string();
  }
}

TEST(Shots, ComputationalBasisCountsAreDeterministicPerSeed) {
  const auto psi = qcm::StateVector::basis(2, 2);  // qubit 1 set
  const qcm::TpbGroup group{PauliString::parse("ZZ"), {PauliString::parse("ZZ")}};
  const auto counts = qcm::sample_shots(psi, group, 10, 1);
  ASSERT_EQ(counts.size(), 1u);
  EXPECT_EQ(counts.begin()->first, "01");
  EXPECT_EQ(qcm::estimate_from_counts(counts, PauliString::parse("IZ")), -1.0);
  EXPECT_EQ(qcm::sample_shots(psi, group, 10, 1), counts);
}
