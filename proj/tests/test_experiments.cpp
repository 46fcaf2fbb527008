#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "qcm/errors.hpp"
#include "qcm/experiments.hpp"

using qcm::ExperimentConfig;

namespace {

ExperimentConfig small_fig1() {
  ExperimentConfig c;
  c.rows = 2;
  c.cols = 3;
  c.corr_i = 0;
  c.corr_j = 4;
  return c;
}

ExperimentConfig small_fig2() {
  ExperimentConfig c;
  c.experiment = "fig2";
  c.sites = 4;
  c.g_min = 0.0;
  c.g_max = 1.0;
  c.g_step = 0.5;
  c.fidelities = {0.4, 1.0};
  c.noise_levels = {0.0, 0.5};
  c.trials = 2;
  c.seed = 5;
  return c;
}

}  // namespace

TEST(Config, TextAndOverrides) {
  ExperimentConfig c;
  for (const auto& [k, v] : qcm::parse_config_text("# comment\nrows = 2  # trailing\nx-step=0.1\nnoise = 0.1, 0.2\n")) {
    c.set(k, v);
  }
  EXPECT_EQ(c.rows, 2);
  EXPECT_EQ(c.x_step, 0.1);
  EXPECT_EQ(c.noise_levels, (std::vector<double>{0.1, 0.2}));
  c.set("noise-mode", "global");
  EXPECT_EQ(c.noise_mode, qcm::NoiseMode::global);
  EXPECT_THROW(c.set("colour", "red"), qcm::ParseError);
  EXPECT_THROW(c.set("rows", "two"), qcm::ParseError);
  EXPECT_THROW(qcm::parse_config_text("rows 2\n"), qcm::ParseError);
}

TEST(Config, Validation) {
  ExperimentConfig c;
  c.validate();
  c.x_step = 0.0;
  EXPECT_THROW(c.validate(), qcm::UsageError);
  c = ExperimentConfig{};
  c.experiment = "fig2";
  c.fidelities = {0.0};
  EXPECT_THROW(c.validate(), qcm::UsageError);
  c.fidelities = {0.5};
  c.noise_levels = {1.2};
  EXPECT_THROW(c.validate(), qcm::UsageError);
  c = ExperimentConfig{};
  c.corr_j = 0;
  EXPECT_THROW(c.validate(), qcm::UsageError);
}

TEST(Config, DefaultGrids) {
  const ExperimentConfig c;
  const auto xs = qcm::make_grid(c.x_min, c.x_max, c.x_step);
  EXPECT_EQ(xs.size(), 40u);
  EXPECT_EQ(xs.front(), -0.975);
  EXPECT_EQ(xs.back(), 0.975);
  EXPECT_EQ(xs[20], 0.025);
  EXPECT_EQ(qcm::make_grid(c.g_min, c.g_max, c.g_step).size(), 21u);
}

TEST(Fig1, TrialRegionsAreHalfOpenToTheLeft) {
  EXPECT_EQ(qcm::fig1_trial_index(-0.975), 0);
  EXPECT_EQ(qcm::fig1_trial_index(-0.5), 0);
  EXPECT_EQ(qcm::fig1_trial_index(-0.4999), 1);
  EXPECT_EQ(qcm::fig1_trial_index(0.5), 1);
  EXPECT_EQ(qcm::fig1_trial_index(0.5001), 2);
  // Resolution never changes the assignment of a given x.
  for (double step : {0.05, 0.025, 0.1}) {
    for (double x : qcm::make_grid(-0.95, 0.95, step)) {
      EXPECT_EQ(qcm::fig1_trial_index(x), x <= -0.5 ? 0 : (x <= 0.5 ? 1 : 2));
    }
  }
}

TEST(Fig1, ThreeTableBuildsRegardlessOfGridSize) {
  for (double step : {0.5, 0.1}) {
    auto c = small_fig1();
    c.x_step = step;
    c.x_min = -0.95;
    c.x_max = 0.95;
    qcm::reset_instrumentation();
    const auto rows = qcm::run_fig1(c);
    EXPECT_EQ(rows.size(), qcm::make_grid(c.x_min, c.x_max, step).size());
    EXPECT_EQ(qcm::instrumentation().table_builds, 3u);
  }
}

TEST(Fig1, NeelRowIsExactOnTheDefaultGrid) {
  ExperimentConfig c;
  c.x_min = c.x_max = 0.0;
  const auto rows = qcm::run_fig1(c);
  ASSERT_EQ(rows.size(), 1u);
  const auto& r = rows[0];
  EXPECT_EQ(r.trial_label, "neel");
  EXPECT_NEAR(r.e_exact, -17.0 / 48.0, 1e-14);
  EXPECT_NEAR(r.e_direct, -17.0 / 48.0, 1e-14);
  EXPECT_NEAR(r.e_l4, -17.0 / 48.0, 1e-14);
  EXPECT_EQ(r.status, "ok");
}

TEST(Fig1, SinglePointMatchesLibraryRoute) {
  auto c = small_fig1();
  c.x_min = c.x_max = 0.35;
  const auto row = qcm::run_fig1(c).at(0);

  const auto lat = qcm::LatticeSpec::grid(2, 3);
  const auto h = qcm::build_xxz(lat);
  const qcm::MomentExpansion e(h, qcm::build_zz_correlation(lat, 0, 4));
  const auto trial = qcm::exact_ground_state(qcm::bind(h, {{"x", 0.0}}));
  const auto strings = e.strings();
  const auto table = qcm::expectation_table(trial.state, strings);
  EXPECT_EQ(row.e_l4, qcm::qcm_energy(e, table, {{"x", 0.35}}).energy);
  EXPECT_EQ(row.c_l4, qcm::observable_estimate(e, table, {{"x", 0.35}}, c.epsilon));
}

TEST(Fig2, ExactTrialWithoutNoiseRecoversMagnetisation) {
  const auto rows = qcm::run_fig2(small_fig2());
  ASSERT_EQ(rows.size(), 3u * 2u * 2u * 2u);
  for (const auto& r : rows) {
    if (r.g == 0.0) EXPECT_NEAR(r.m_exact, 0.0, 1e-12);
    if (r.f_target == 1.0 && r.p == 0.0) {
      EXPECT_EQ(r.status, "ok");
      EXPECT_NEAR(r.m_direct, r.m_exact, 1e-8);
      EXPECT_NEAR(r.m_l4, r.m_exact, 1e-8);
    }
    if (r.status == "ok") EXPECT_NEAR(r.f_achieved, r.f_target, 1e-3);
  }
}

TEST(Fig2, DeterministicAndOrderIndependent) {
  const auto c = small_fig2();
  auto cells = qcm::fig2_cells(c);
  qcm::reset_instrumentation();
  const auto forward = qcm::to_csv(qcm::to_records(qcm::run_fig2(c, cells)));
  EXPECT_EQ(qcm::instrumentation().table_builds, cells.size() * c.noise_levels.size());
  std::reverse(cells.begin(), cells.end());
  const auto backward = qcm::to_csv(qcm::to_records(qcm::run_fig2(c, cells)));
  EXPECT_EQ(forward, backward);
  EXPECT_EQ(forward, qcm::to_csv(qcm::to_records(qcm::run_fig2(c))));
}

TEST(Fig2, SeedsDependOnEveryCellCoordinate) {
  const auto s = qcm::fig2_cell_seed(42, 1, 2, 3, 0);
  EXPECT_EQ(s, qcm::fig2_cell_seed(42, 1, 2, 3, 0));
  EXPECT_NE(s, qcm::fig2_cell_seed(43, 1, 2, 3, 0));
  EXPECT_NE(s, qcm::fig2_cell_seed(42, 2, 2, 3, 0));
  EXPECT_NE(s, qcm::fig2_cell_seed(42, 1, 3, 3, 0));
  EXPECT_NE(s, qcm::fig2_cell_seed(42, 1, 2, 4, 0));
  EXPECT_NE(s, qcm::fig2_cell_seed(42, 1, 2, 3, 1));
  EXPECT_NE(qcm::fig2_cell_seed(42, 1, 2, 0, 0), qcm::fig2_cell_seed(42, 2, 1, 0, 0));
}

TEST(Emit, HeadersAndEmptyTables) {
  EXPECT_EQ(qcm::to_csv(qcm::to_records(std::vector<qcm::Fig2Row>{})),
            "g,F_target,F_achieved,p,trial_index,M_exact,M_direct,M_L4,status\n");
  EXPECT_EQ(qcm::to_csv(qcm::to_records(std::vector<qcm::Fig1Row>{})),
            "x,trial_label,E_exact,E_direct,E_L4,C_exact,C_direct,C_L4,status\n");
  EXPECT_EQ(qcm::to_json(qcm::to_records(std::vector<qcm::Fig1Row>{})), "[]\n");
}

TEST(Emit, FloatFormattingAndQuoting) {
  qcm::RecordTable t{{"a", "b", "c"}, {{1.0 / 3.0, std::int64_t{7}, std::string("x, \"y\"")},
                                       {std::nan(""), std::int64_t{-1}, std::string("ok")}}};
  EXPECT_EQ(qcm::to_csv(t), "a,b,c\n0.333333333333,7,\"x, \"\"y\"\"\"\nnan,-1,ok\n");
}

TEST(Emit, CsvParseToJsonRoundTrip) {
  auto c = small_fig2();
  c.trials = 1;
  c.fidelities = {0.7};
  const auto table = qcm::to_records(qcm::run_fig2(c));
  const auto reparsed = qcm::parse_csv(qcm::to_csv(table));
  EXPECT_EQ(reparsed.header, table.header);
  // CSV drops the int/float distinction of integral values; JSON numbers compare by value.
  EXPECT_EQ(nlohmann::json::parse(qcm::to_json(reparsed)), nlohmann::json::parse(qcm::to_json(table)));
  const auto json = nlohmann::json::parse(qcm::to_json(table));
  ASSERT_EQ(json.size(), table.rows.size());
  EXPECT_EQ(json[0].size(), table.header.size());
  EXPECT_TRUE(json[0].contains("M_L4"));
}

TEST(Emit, WritesFilesAndReportsBadPaths) {
  const auto dir = std::filesystem::temp_directory_path() / "qcm_emit_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "out.csv").string();
  const qcm::RecordTable t{{"a"}, {{1.5}}};
  qcm::emit(t, qcm::OutputFormat::csv, path);
  std::ifstream in(path, std::ios::binary);
  std::string body((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(body, "a\n1.5\n");
  const std::string bad = (dir / "missing" / "out.csv").string();
  try {
    qcm::emit(t, qcm::OutputFormat::csv, bad);
    FAIL() << "expected an I/O error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(bad), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST(Census, ReportFromConfig) {
  ExperimentConfig c;
  c.experiment = "census";
  c.model = "staggered";
  c.sites = 4;
  const auto plain = qcm::run_census(c);
  c.with_correlation = true;
  const auto with = qcm::run_census(c);
  // M is diagonal and already part of H, so no string is added.
  EXPECT_EQ(plain.n_strings, with.n_strings);
  EXPECT_EQ(qcm::to_csv(qcm::to_records(plain)).substr(0, 29), "convention,n_strings,n_tpb\nun");
}
