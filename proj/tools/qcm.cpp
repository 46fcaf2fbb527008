// qcm: command-line runner for the moments experiments.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qcm/errors.hpp"
#include "qcm/experiments.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::map<std::string, std::string> values;
  bool with_correlation = false;
};

void add_value(CLI::App* app, Flags& flags, const std::string& key, const std::string& help) {
  app->add_option_function<std::string>(
      "--" + key, [&flags, key](const std::string& v) { flags.values[key] = v; }, help);
}

qcm::ExperimentConfig resolve(const std::string& experiment, const Flags& flags) {
  qcm::ExperimentConfig config;
  config.experiment = experiment;
  if (!flags.config_path.empty()) qcm::apply_config_file(config, flags.config_path);
  if (experiment != "run") config.experiment = experiment;
  for (const auto& [k, v] : flags.values) config.set(k, v);
  if (flags.with_correlation) config.with_correlation = true;
  return config;
}

void run_experiment(const qcm::ExperimentConfig& config) {
  config.validate();
  if (config.experiment == "fig1") {
    qcm::emit(qcm::to_records(qcm::run_fig1(config)), config.format, config.out);
  } else if (config.experiment == "fig2") {
    qcm::emit(qcm::to_records(qcm::run_fig2(config)), config.format, config.out);
  } else {
    qcm::emit(qcm::to_records(qcm::run_census(config)), config.format, config.out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum computed moments: ground-state energies and observables from <H^k>"};
  app.require_subcommand(1);

  Flags flags;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "key = value config file; flags override it");
    add_value(sub, flags, "out", "output path (default stdout)");
    add_value(sub, flags, "format", "csv or json");
  };

  auto* fig1 = app.add_subcommand("fig1", "XXZ grid: energy and ZZ correlation from three trial states");
  common(fig1);
  for (const char* k : {"rows", "cols", "x-min", "x-max", "x-step", "epsilon", "corr-i", "corr-j"}) {
    add_value(fig1, flags, k, "");
  }

  auto* fig2 = app.add_subcommand("fig2", "staggered chain: magnetisation under GUE trials and depolarizing noise");
  common(fig2);
  for (const char* k : {"sites", "g-min", "g-max", "g-step", "epsilon", "fidelities", "noise", "trials", "seed",
                        "noise-mode"}) {
    add_value(fig2, flags, k, "");
  }

  auto* census = app.add_subcommand("census", "distinct Pauli strings and TPB groups of H^1..H^4");
  common(census);
  for (const char* k : {"model", "rows", "cols", "sites", "corr-i", "corr-j"}) add_value(census, flags, k, "");
  census->add_flag("--with-correlation", flags.with_correlation, "include the observable in the expansion");

  auto* run = app.add_subcommand("run", "run the experiment named in --config");
  run->add_option("--config", flags.config_path, "config file with experiment = fig1 | fig2 | census")->required();
  add_value(run, flags, "out", "output path (default stdout)");
  add_value(run, flags, "format", "csv or json");

  std::string export_model = "xxz";
  int export_power = 1;
  auto* exp = app.add_subcommand("export", "print a model operator in the text term format");
  exp->add_option("--config", flags.config_path, "config file");
  exp->add_option("--model", export_model, "xxz | zz | staggered | magnetisation")
      ->check(CLI::IsMember({"xxz", "zz", "staggered", "magnetisation"}));
  exp->add_option("--power", export_power, "power 1..4 of the operator")->check(CLI::Range(1, 4));
  for (const char* k : {"rows", "cols", "sites", "corr-i", "corr-j", "out"}) add_value(exp, flags, k, "");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (fig1->parsed()) {
      run_experiment(resolve("fig1", flags));
    } else if (fig2->parsed()) {
      run_experiment(resolve("fig2", flags));
    } else if (census->parsed()) {
      run_experiment(resolve("census", flags));
    } else if (run->parsed()) {
      run_experiment(resolve("run", flags));
    } else if (exp->parsed()) {
      const auto config = resolve("census", flags);
      const auto lattice = qcm::LatticeSpec::grid(config.rows, config.cols);
      qcm::PauliSum op;
      if (export_model == "xxz") {
        op = qcm::build_xxz(lattice);
      } else if (export_model == "zz") {
        op = qcm::build_zz_correlation(lattice, config.corr_i, config.corr_j);
      } else if (export_model == "staggered") {
        op = qcm::build_staggered_afm(config.sites);
      } else {
        op = qcm::build_staggered_magnetisation(config.sites);
      }
      const std::string text = qcm::to_text(qcm::sum_power(op, export_power).back());
      if (config.out.empty() || config.out == "-") {
        std::cout << text;
      } else {
        std::FILE* f = std::fopen(config.out.c_str(), "wb");
        if (!f || std::fwrite(text.data(), 1, text.size(), f) != text.size()) {
          if (f) std::fclose(f);
          throw std::runtime_error("cannot write '" + config.out + "'");
        }
        std::fclose(f);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "qcm: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
