#include "qcm/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "qcm/errors.hpp"

namespace qcm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  T out{};
  const char* begin = v.data();
  if constexpr (std::is_floating_point_v<T>) {
    if (!v.empty() && v.front() == '+') ++begin;
  }
  auto [ptr, ec] = std::from_chars(begin, v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ParseError("invalid value for '" + key + "': '" + text + "'");
  }
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, item));
  if (out.empty()) throw ParseError("empty list for '" + key + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError("invalid boolean for '" + key + "': '" + text + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::string csv_field(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  const auto& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

Cell parse_cell(const std::string& text) {
  if (text == "nan") return kNaN;
  std::int64_t i = 0;
  auto [ip, iec] = std::from_chars(text.data(), text.data() + text.size(), i);
  if (!text.empty() && iec == std::errc() && ip == text.data() + text.size()) return i;
  double d = 0.0;
  auto [dp, dec] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (!text.empty() && dec == std::errc() && dp == text.data() + text.size()) return d;
  return text;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = normalize_key(trim(raw_key));
  const std::string value = trim(raw_value);
  if (key == "experiment") {
    experiment = value;
  } else if (key == "model") {
    model = value;
  } else if (key == "rows") {
    rows = parse_number<int>(key, value);
  } else if (key == "cols") {
    cols = parse_number<int>(key, value);
  } else if (key == "sites") {
    sites = parse_number<int>(key, value);
  } else if (key == "corr_i") {
    corr_i = parse_number<int>(key, value);
  } else if (key == "corr_j") {
    corr_j = parse_number<int>(key, value);
  } else if (key == "x_min") {
    x_min = parse_number<double>(key, value);
  } else if (key == "x_max") {
    x_max = parse_number<double>(key, value);
  } else if (key == "x_step") {
    x_step = parse_number<double>(key, value);
  } else if (key == "g_min") {
    g_min = parse_number<double>(key, value);
  } else if (key == "g_max") {
    g_max = parse_number<double>(key, value);
  } else if (key == "g_step") {
    g_step = parse_number<double>(key, value);
  } else if (key == "epsilon") {
    epsilon = parse_number<double>(key, value);
  } else if (key == "fidelities") {
    fidelities = parse_list(key, value);
  } else if (key == "noise" || key == "noise_levels") {
    noise_levels = parse_list(key, value);
  } else if (key == "trials") {
    trials = parse_number<int>(key, value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "noise_mode") {
    if (value == "per-qubit" || value == "per_qubit") {
      noise_mode = NoiseMode::per_qubit;
    } else if (value == "global") {
      noise_mode = NoiseMode::global;
    } else {
      throw ParseError("noise_mode must be per-qubit or global, got '" + value + "'");
    }
  } else if (key == "with_correlation") {
    with_correlation = parse_bool(key, value);
  } else if (key == "out") {
    out = value;
  } else if (key == "format") {
    if (value == "csv") {
      format = OutputFormat::csv;
    } else if (value == "json") {
      format = OutputFormat::json;
    } else {
      throw ParseError("format must be csv or json, got '" + value + "'");
    }
  } else {
    throw ParseError("unknown config key '" + raw_key + "'");
  }
}

void ExperimentConfig::validate() const {
  if (experiment != "fig1" && experiment != "fig2" && experiment != "census") {
    throw UsageError("experiment must be fig1, fig2 or census");
  }
  if (model != "xxz" && model != "staggered") throw UsageError("model must be xxz or staggered");
  if (rows < 1 || cols < 1 || rows * cols < 2) throw UsageError("grid needs at least two sites");
  if (sites < 2) throw UsageError("chain needs at least two sites");
  if (!(epsilon > 0.0)) throw UsageError("epsilon must be positive");
  if (!(x_step > 0.0) || !(g_step > 0.0)) throw UsageError("grid steps must be positive");
  if (x_max < x_min || g_max < g_min) throw UsageError("grid max must not be below grid min");
  if (experiment == "fig1") {
    if (x_min < -1.0 || x_max > 1.0) throw UsageError("fig1 x grid must lie within [-1, 1]");
    LatticeSpec::grid(rows, cols);
    build_zz_correlation(LatticeSpec::grid(rows, cols), corr_i, corr_j);
    if (rows * cols > kMaxExactQubits) throw UsageError("fig1 lattice exceeds the exact-diagonalization budget");
  }
  if (experiment == "fig2") {
    if (fidelities.empty() || noise_levels.empty()) throw UsageError("fidelity and noise lists must be nonempty");
    for (double f : fidelities) {
      if (!(f > 0.0 && f <= 1.0)) throw UsageError("fidelities must lie in (0, 1]");
    }
    for (double p : noise_levels) {
      if (!(p >= 0.0 && p <= 1.0)) throw UsageError("noise levels must lie in [0, 1]");
    }
    if (trials < 1) throw UsageError("trials must be at least 1");
    if (sites > 10) throw UsageError("fig2 density matrices are limited to 10 sites");
  }
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    out[normalize_key(trim(line.substr(0, eq)))] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_config_file(ExperimentConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  for (const auto& [k, v] : parse_config_text(ss.str())) config.set(k, v);
}

std::vector<double> make_grid(double min, double max, double step) {
  if (!(step > 0.0) || max < min) throw UsageError("invalid grid");
  const auto n = static_cast<long>(std::floor((max - min) / step + 1e-9));
  std::vector<double> out;
  for (long k = 0; k <= n; ++k) out.push_back(std::round((min + static_cast<double>(k) * step) * 1e12) / 1e12);
  return out;
}

// ---------------------------------------------------------------------------
// Fig. 1

int fig1_trial_index(double x) {
  if (x <= -0.5) return 0;
  if (x <= 0.5) return 1;
  return 2;
}

Fig1Runner::Fig1Runner(const ExperimentConfig& config)
    : epsilon_(config.epsilon),
      hamiltonian_(build_xxz(LatticeSpec::grid(config.rows, config.cols))),
      correlation_(build_zz_correlation(LatticeSpec::grid(config.rows, config.cols), config.corr_i, config.corr_j)),
      expansion_(hamiltonian_, correlation_) {
  const auto strings = expansion_.strings();
  for (double point : kFig1TrialPoints) {
    const GroundState gs = exact_ground_state(bind(hamiltonian_, {{kParamX, point}}));
    tables_.push_back(expectation_table(gs.state, strings));
  }
}

Fig1Row Fig1Runner::row(double x) const {
  const int trial = fig1_trial_index(x);
  const ExpectationTable& table = tables_[static_cast<std::size_t>(trial)];
  const Assignment params{{kParamX, x}};

  Fig1Row r;
  r.x = x;
  r.trial_label = kFig1TrialLabels[static_cast<std::size_t>(trial)];
  const GroundState exact = exact_ground_state(bind(hamiltonian_, params));
  r.e_exact = exact.energy;
  r.c_exact = expectation(exact.state, correlation_);
  r.e_direct = table_expectation(hamiltonian_, table, params);
  r.c_direct = table_expectation(correlation_, table, params);

  std::vector<std::string> failures;
  try {
    r.e_l4 = qcm_energy(expansion_, table, params).energy;
  } catch (const EstimateError& e) {
    r.e_l4 = kNaN;
    failures.push_back(std::string("E_L4 ") + e.what());
  }
  try {
    r.c_l4 = observable_estimate(expansion_, table, params, epsilon_);
  } catch (const EstimateError& e) {
    r.c_l4 = kNaN;
    failures.push_back(std::string("C_L4 ") + e.what());
  }
  if (!failures.empty()) {
    r.status.clear();
    for (const auto& f : failures) r.status += (r.status.empty() ? "" : "; ") + f;
  }
  return r;
}

std::vector<Fig1Row> Fig1Runner::run(std::span<const double> xs) const {
  std::vector<Fig1Row> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(row(x));
  return out;
}

std::vector<Fig1Row> run_fig1(const ExperimentConfig& config) {
  config.validate();
  const auto xs = make_grid(config.x_min, config.x_max, config.x_step);
  return Fig1Runner(config).run(xs);
}

// ---------------------------------------------------------------------------
// Fig. 2

std::uint64_t fig2_cell_seed(std::uint64_t seed, std::size_t g_index, std::size_t f_index, int trial, int attempt) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t v : {static_cast<std::uint64_t>(g_index), static_cast<std::uint64_t>(f_index),
                          static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(attempt)}) {
    h = splitmix64(h ^ splitmix64(v));
  }
  return h;
}

std::vector<Fig2Cell> fig2_cells(const ExperimentConfig& config) {
  const auto gs = make_grid(config.g_min, config.g_max, config.g_step);
  std::vector<Fig2Cell> cells;
  for (std::size_t gi = 0; gi < gs.size(); ++gi) {
    for (std::size_t fi = 0; fi < config.fidelities.size(); ++fi) {
      for (int t = 0; t < config.trials; ++t) cells.push_back({gi, fi, t});
    }
  }
  return cells;
}

std::vector<Fig2Row> run_fig2(const ExperimentConfig& config, std::span<const Fig2Cell> cells) {
  config.validate();
  constexpr int kMaxAttempts = 16;
  const auto g_values = make_grid(config.g_min, config.g_max, config.g_step);
  const PauliSum h = build_staggered_afm(config.sites);
  const PauliSum m = build_staggered_magnetisation(config.sites);
  const MomentExpansion expansion(h, m);
  const auto strings = expansion.strings();
  const int dim = 1 << config.sites;

  std::map<std::size_t, GroundState> ground;
  std::vector<Fig2Row> rows;
  for (const auto& cell : cells) {
    const double g = g_values.at(cell.g_index);
    const double target = config.fidelities.at(cell.f_index);
    const Assignment params{{kParamG, g}};
    auto it = ground.find(cell.g_index);
    if (it == ground.end()) it = ground.emplace(cell.g_index, exact_ground_state(bind(h, params))).first;
    const GroundState& gs = it->second;
    const double m_exact = expectation(gs.state, m);

    std::optional<ThetaTuning> tuning;
    std::optional<HermitianMatrix> generator;
    for (int attempt = 0; attempt < kMaxAttempts && !tuning; ++attempt) {
      generator = random_gue_hermitian(dim, fig2_cell_seed(config.seed, cell.g_index, cell.f_index, cell.trial, attempt));
      try {
        tuning = tune_theta_for_fidelity(gs.state, *generator, target);
      } catch (const StateError&) {
      }
    }

    std::optional<DensityMatrix> rho;
    if (tuning) rho = DensityMatrix::pure(rotate_trial(gs.state, *generator, tuning->theta));
    for (std::size_t pi = 0; pi < config.noise_levels.size(); ++pi) {
      Fig2Row r;
      r.g = g;
      r.f_target = target;
      r.p = config.noise_levels[pi];
      r.trial_index = cell.trial;
      r.m_exact = m_exact;
      r.g_index = cell.g_index;
      r.f_index = cell.f_index;
      r.p_index = pi;
      if (!tuning) {
        r.f_achieved = r.m_direct = r.m_l4 = kNaN;
        r.status = "fidelity target not reached";
        rows.push_back(r);
        continue;
      }
      r.f_achieved = tuning->fidelity;
      const DensityMatrix noisy = depolarize(*rho, r.p, config.noise_mode);
      const ExpectationTable table = expectation_table(noisy, strings);
      r.m_direct = table_expectation(m, table);
      try {
        r.m_l4 = observable_estimate(expansion, table, params, config.epsilon);
      } catch (const EstimateError& e) {
        r.m_l4 = kNaN;
        r.status = std::string("M_L4 ") + e.what();
      }
      rows.push_back(r);
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Fig2Row& a, const Fig2Row& b) {
    return std::tie(a.g_index, a.f_index, a.p_index, a.trial_index) <
           std::tie(b.g_index, b.f_index, b.p_index, b.trial_index);
  });
  return rows;
}

std::vector<Fig2Row> run_fig2(const ExperimentConfig& config) {
  config.validate();
  const auto cells = fig2_cells(config);
  return run_fig2(config, cells);
}

// ---------------------------------------------------------------------------
// Output

RecordTable to_records(const std::vector<Fig1Row>& rows) {
  RecordTable t{{"x", "trial_label", "E_exact", "E_direct", "E_L4", "C_exact", "C_direct", "C_L4", "status"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({r.x, r.trial_label, r.e_exact, r.e_direct, r.e_l4, r.c_exact, r.c_direct, r.c_l4, r.status});
  }
  return t;
}

RecordTable to_records(const std::vector<Fig2Row>& rows) {
  RecordTable t{{"g", "F_target", "F_achieved", "p", "trial_index", "M_exact", "M_direct", "M_L4", "status"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({r.g, r.f_target, r.f_achieved, r.p, static_cast<std::int64_t>(r.trial_index), r.m_exact,
                      r.m_direct, r.m_l4, r.status});
  }
  return t;
}

RecordTable to_records(const CensusReport& report) {
  RecordTable t{{"convention", "n_strings", "n_tpb"}, {}};
  for (const auto& line : report.lines) {
    t.rows.push_back({line.convention, static_cast<std::int64_t>(line.n_strings), static_cast<std::int64_t>(line.n_tpb)});
  }
  return t;
}

std::string to_csv(const RecordTable& table) {
  std::string out;
  for (std::size_t k = 0; k < table.header.size(); ++k) out += (k ? "," : "") + table.header[k];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + csv_field(row[k]);
    out += '\n';
  }
  return out;
}

std::string to_json(const RecordTable& table) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json rec = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < row.size() && k < table.header.size(); ++k) {
      const auto& name = table.header[k];
      if (const auto* d = std::get_if<double>(&row[k])) {
        // Same precision as the CSV so both formats agree.
        if (std::isnan(*d)) {
          rec[name] = nullptr;
        } else {
          rec[name] = std::stod(format_double(*d));
        }
      } else if (const auto* i = std::get_if<std::int64_t>(&row[k])) {
        rec[name] = *i;
      } else {
        rec[name] = std::get<std::string>(row[k]);
      }
    }
    arr.push_back(std::move(rec));
  }
  return arr.dump(2) + "\n";
}

RecordTable parse_csv(const std::string& text) {
  RecordTable t;
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw ParseError("empty CSV");
  t.header = split_csv_line(line);
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != t.header.size()) throw ParseError("CSV row has the wrong number of fields");
    std::vector<Cell> row;
    for (const auto& f : fields) row.push_back(parse_cell(f));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void emit(const RecordTable& table, OutputFormat format, const std::string& path) {
  const std::string body = format == OutputFormat::csv ? to_csv(table) : to_json(table);
  if (path.empty() || path == "-") {
    std::cout << body << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << body;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

CensusReport run_census(const ExperimentConfig& config) {
  if (config.model == "staggered") {
    return census(build_staggered_afm(config.sites),
                  config.with_correlation ? std::optional(build_staggered_magnetisation(config.sites)) : std::nullopt);
  }
  const LatticeSpec lattice = LatticeSpec::grid(config.rows, config.cols);
  std::optional<PauliSum> a;
  if (config.with_correlation) a = build_zz_correlation(lattice, config.corr_i, config.corr_j);
  return census(build_xxz(lattice), a);
}

}  // namespace qcm
