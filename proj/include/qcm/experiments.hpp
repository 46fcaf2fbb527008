#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qcm/measure.hpp"
#include "qcm/models.hpp"
#include "qcm/moments.hpp"
#include "qcm/states.hpp"

namespace qcm {

enum class OutputFormat { csv, json };

/// Flat experiment configuration; every field has a `key = value` spelling
/// (dashes and underscores are interchangeable in keys).
struct ExperimentConfig {
  std::string experiment = "fig1";  // fig1 | fig2 | census
  std::string model = "xxz";        // xxz | staggered (census)

  int rows = 3;
  int cols = 4;
  int sites = 6;
  int corr_i = 0;
  int corr_j = 5;  // corner and its diagonal neighbour in the middle row

  double x_min = -0.975;
  double x_max = 0.975;
  double x_step = 0.05;
  double g_min = 0.0;
  double g_max = 2.0;
  double g_step = 0.1;

  double epsilon = kDefaultEpsilon;
  std::vector<double> fidelities{0.4, 0.7, 0.9};
  std::vector<double> noise_levels{0.01, 0.1, 0.5};
  int trials = 10;
  std::uint64_t seed = 42;
  NoiseMode noise_mode = NoiseMode::per_qubit;
  bool with_correlation = false;

  std::string out;  // empty: stdout
  OutputFormat format = OutputFormat::csv;

  /// Sets one field from its textual form; throws ParseError on unknown keys
  /// or malformed values.
  void set(const std::string& key, const std::string& value);
  /// Throws UsageError when a field is out of its domain.
  void validate() const;
};

/// `key = value` lines, `#` starts a comment.
std::map<std::string, std::string> parse_config_text(const std::string& text);
void apply_config_file(ExperimentConfig& config, const std::string& path);

/// min, min + step, ... up to max (inclusive within 1e-9 step), rounded to 12
/// decimals.
std::vector<double> make_grid(double min, double max, double step);

// ---------------------------------------------------------------------------
// Fig. 1: XXZ energy and ZZ correlation from three fixed trial states.

struct Fig1Row {
  double x = 0.0;
  std::string trial_label;
  double e_exact = 0.0;
  double e_direct = 0.0;
  double e_l4 = 0.0;
  double c_exact = 0.0;
  double c_direct = 0.0;
  double c_l4 = 0.0;
  std::string status = "ok";
};

/// Trial-state region for x: (-inf, -1/2] ferro (x = -1 ground state),
/// (-1/2, 1/2] neel (x = 0), (1/2, inf) afm (x = 1).
int fig1_trial_index(double x);
inline constexpr std::array<const char*, 3> kFig1TrialLabels{"ferro", "neel", "afm"};
inline constexpr std::array<double, 3> kFig1TrialPoints{-1.0, 0.0, 1.0};

/// Holds the symbolic expansion and the three trial tables; rows are pure
/// post-processing plus the exact-diagonalization oracle.
class Fig1Runner {
 public:
  explicit Fig1Runner(const ExperimentConfig& config);

  Fig1Row row(double x) const;
  std::vector<Fig1Row> run(std::span<const double> xs) const;

  const MomentExpansion& expansion() const { return expansion_; }
  const ExpectationTable& table(int trial) const { return tables_[static_cast<std::size_t>(trial)]; }
  const PauliSum& hamiltonian() const { return hamiltonian_; }
  const PauliSum& correlation() const { return correlation_; }

 private:
  double epsilon_;
  PauliSum hamiltonian_;
  PauliSum correlation_;
  MomentExpansion expansion_;
  std::vector<ExpectationTable> tables_;
};

std::vector<Fig1Row> run_fig1(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Fig. 2: staggered magnetisation under GUE-rotated trials and depolarizing
// noise.

struct Fig2Row {
  double g = 0.0;
  double f_target = 0.0;
  double f_achieved = 0.0;
  double p = 0.0;
  int trial_index = 0;
  double m_exact = 0.0;
  double m_direct = 0.0;
  double m_l4 = 0.0;
  std::string status = "ok";

  // Grid position, used for ordering.
  std::size_t g_index = 0;
  std::size_t f_index = 0;
  std::size_t p_index = 0;
};

/// Seed of the GUE draw for one (g, F, trial) cell: splitmix64 folded over
/// (seed, g_index, f_index, trial, attempt). Attempts > 0 resample when the
/// fidelity target is unreachable.
std::uint64_t fig2_cell_seed(std::uint64_t seed, std::size_t g_index, std::size_t f_index, int trial,
                             int attempt);

struct Fig2Cell {
  std::size_t g_index;
  std::size_t f_index;
  int trial;
};

/// All (g, F, trial) cells of the config in canonical order.
std::vector<Fig2Cell> fig2_cells(const ExperimentConfig& config);

/// Evaluates `cells` in the given order; output is sorted by
/// (g_index, f_index, p_index, trial) regardless of that order.
std::vector<Fig2Row> run_fig2(const ExperimentConfig& config, std::span<const Fig2Cell> cells);
std::vector<Fig2Row> run_fig2(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Output.

using Cell = std::variant<double, std::int64_t, std::string>;

struct RecordTable {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

RecordTable to_records(const std::vector<Fig1Row>& rows);
RecordTable to_records(const std::vector<Fig2Row>& rows);
RecordTable to_records(const CensusReport& report);

/// Header line then one line per row, LF endings, floats as %.12g.
std::string to_csv(const RecordTable& table);
/// Array of records with the header names as keys; NaN becomes null.
std::string to_json(const RecordTable& table);
RecordTable parse_csv(const std::string& text);

/// Writes to `path`, or stdout when `path` is empty or "-". I/O failures throw
/// std::runtime_error naming the path.
void emit(const RecordTable& table, OutputFormat format, const std::string& path);

/// Census for the configured model: xxz on rows x cols (optionally with the
/// corr_i/corr_j correlation), or staggered on `sites` (optionally with M).
CensusReport run_census(const ExperimentConfig& config);

}  // namespace qcm
