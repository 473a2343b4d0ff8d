/* Copyright 2026 The bnse Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Command-line front end: estimate, train, sample, peaks, experiment and
// baseline. Exit status 0 on success, 1 on usage or input errors, 2 on
// numerical failures.

#include <iostream>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "bnse/error.hpp"
#include "bnse/experiments.hpp"

namespace {

struct Flags {
  std::string input;
  std::string config;
  std::string kernel;
  std::string alpha;
  std::string centre;
  std::optional<double> freq_min;
  std::optional<double> freq_max;
  std::optional<std::size_t> grid_size;
  std::string method;
  std::string training;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> starts;
  bool no_svg = false;
  bool demean = false;
  std::string log_level = "info";
};

void add_common(CLI::App* cmd, Flags& f, bool needs_input) {
  auto* in = cmd->add_option("--input,-i", f.input, "Input CSV with t,y columns");
  if (needs_input) in->description("Input CSV with t,y columns (or set \"input\" in --config)");
  cmd->add_option("--config,-c", f.config, "JSON run configuration; flags override it");
  cmd->add_option("--kernel,-k", f.kernel, "Kernel spec: inline JSON or a JSON file");
  cmd->add_option("--alpha", f.alpha, "Window decay alpha, or 'auto'");
  cmd->add_option("--centre", f.centre, "Window centre, or 'auto' for the data midpoint");
  cmd->add_option("--freq-min", f.freq_min, "Lowest grid frequency");
  cmd->add_option("--freq-max", f.freq_max, "Highest grid frequency");
  cmd->add_option("--grid-size", f.grid_size, "Number of grid frequencies");
  cmd->add_option("--method", f.method, "bnse | ls | periodogram | music | all");
  cmd->add_option("--training", f.training, "fixed | train");
  cmd->add_option("--seed", f.seed, "Seed for every stochastic step");
  cmd->add_option("--out,-o", f.out, "Output directory");
  cmd->add_flag("--no-svg", f.no_svg, "Skip SVG figures");
  cmd->add_flag("--demean", f.demean, "Subtract the sample mean before analysis");
}

bnse::RunConfig build_config(const Flags& f) {
  bnse::RunConfig cfg;
  if (!f.config.empty()) cfg = bnse::load_run_config(f.config);
  if (!f.input.empty()) cfg.input = f.input;
  if (!f.kernel.empty()) cfg.kernel = f.kernel;
  auto number_or_auto = [](const std::string& v, const char* name) -> std::optional<double> {
    if (v == "auto") return std::nullopt;
    try {
      std::size_t used = 0;
      const double x = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw bnse::InputError(std::string("--") + name + " expects a number or 'auto', got '" + v +
                             "'");
    }
  };
  if (!f.alpha.empty()) cfg.alpha = number_or_auto(f.alpha, "alpha");
  if (!f.centre.empty()) cfg.centre = number_or_auto(f.centre, "centre");
  if (f.freq_min) cfg.freq_min = f.freq_min;
  if (f.freq_max) cfg.freq_max = f.freq_max;
  if (f.grid_size) cfg.grid_size = *f.grid_size;
  if (!f.method.empty()) cfg.method = bnse::parse_method(f.method);
  if (!f.training.empty()) cfg.training = bnse::parse_training_mode(f.training);
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.out = f.out;
  if (f.samples) cfg.samples = *f.samples;
  if (f.starts) cfg.peak_starts = *f.starts;
  if (f.no_svg) cfg.svg = false;
  if (f.demean) cfg.demean = true;
  return cfg;
}

void print_summary(const bnse::ExperimentReport& report, const bnse::RunConfig& cfg) {
  std::cout << report.name << ": wrote " << report.files.size() << " files to "
            << cfg.out.string() << "\n";
  for (const auto& [flag, ok] : report.flags) {
    std::cout << "  " << (ok ? "PASS " : "FAIL ") << flag << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian nonparametric spectral estimation"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  std::string experiment;
  app.add_option("--log-level", f.log_level, "trace | debug | info | warn | error | off")
      ->capture_default_str();

  auto* estimate = app.add_subcommand("estimate", "Posterior spectrum and baselines");
  add_common(estimate, f, true);
  estimate->add_option("--starts", f.starts, "Peak-search restarts");
  auto* train = app.add_subcommand("train", "Fit SM kernel hyperparameters");
  add_common(train, f, true);
  auto* sample = app.add_subcommand("sample", "Draw posterior PSD samples");
  add_common(sample, f, true);
  sample->add_option("--samples,-n", f.samples, "Number of PSD draws");
  auto* peaks = app.add_subcommand("peaks", "Local maxima of the posterior-mean PSD");
  add_common(peaks, f, true);
  peaks->add_option("--starts", f.starts, "Peak-search restarts");
  auto* exp = app.add_subcommand("experiment", "Bundled experiments");
  exp->add_option("name", experiment, "line-spectra | discrimination | sunspots")->required();
  add_common(exp, f, false);
  auto* baseline = app.add_subcommand("baseline", "Lomb-Scargle, periodogram and MUSIC");
  add_common(baseline, f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  spdlog::set_default_logger(spdlog::stderr_color_mt("bnse"));
  spdlog::set_level(spdlog::level::from_str(f.log_level));

  try {
    auto cfg = build_config(f);
    bnse::ExperimentReport report;
    if (*estimate) {
      report = bnse::run_estimate(cfg);
    } else if (*train) {
      report = bnse::run_train(cfg);
    } else if (*sample) {
      report = bnse::run_sample(cfg);
    } else if (*peaks) {
      report = bnse::run_peaks(cfg);
    } else if (*exp) {
      report = bnse::run_experiment(experiment, cfg);
    } else {
      if (f.method.empty() && f.config.empty()) cfg.method = bnse::Method::all;
      report = bnse::run_baseline(cfg);
    }
    print_summary(report, cfg);
    return 0;
  } catch (const bnse::NumericalError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const bnse::Error& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}
