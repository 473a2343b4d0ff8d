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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace bnse {

enum class Method { bnse, ls, periodogram, music, all };
enum class TrainingMode { fixed, train };

Method parse_method(const std::string& name);
std::string to_string(Method method);
TrainingMode parse_training_mode(const std::string& name);
std::string to_string(TrainingMode mode);

// Everything a run needs. Unset optionals fall back to data-driven
// defaults: the automatic window, a grid on [0, N / (2 span)] and a
// single-component SM kernel fitted to the data scale.
struct RunConfig {
  std::filesystem::path input;
  std::string kernel;  // inline JSON or a path to a JSON file; empty for the default
  std::optional<double> alpha;
  std::optional<double> centre;
  std::optional<double> freq_min;
  std::optional<double> freq_max;
  std::size_t grid_size = 1000;
  Method method = Method::bnse;
  TrainingMode training = TrainingMode::fixed;
  std::filesystem::path out = "bnse_out";
  std::uint64_t seed = 0;

  std::size_t samples = 100;    // PSD draws for `sample`
  std::size_t peak_starts = 8;  // Powell restarts for peak search
  std::size_t peaks_reported = 5;
  int train_restarts = 5;
  int music_order = 4;
  int music_embedding = 40;
  bool svg = true;
  bool demean = false;
  // Frequencies the top peaks are expected at; each adds a report flag.
  std::vector<double> expect_peaks;
  double peak_tolerance = 0.01;

  void validate() const;

  // Keys mirror the field names; unknown keys are rejected.
  static RunConfig from_json(const nlohmann::json& doc);
  static RunConfig from_json(const nlohmann::json& doc, RunConfig base);
  nlohmann::json to_json() const;
};

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

// Outcome of one CLI run. `files` lists only what this run wrote, relative
// to the output directory.
struct ExperimentReport {
  std::string name;
  nlohmann::json config;
  std::vector<std::string> files;
  std::map<std::string, bool> flags;
  std::map<std::string, double> timings;  // seconds per stage
  nlohmann::json details = nlohmann::json::object();

  bool passed() const;
  nlohmann::json to_json() const;
};

// Posterior spectrum (and, per `method`, the baselines) for cfg.input.
// Trains first when cfg.training == train. Writes <method>.csv per
// estimate, peaks.csv, optional SVG and report.json.
ExperimentReport run_estimate(const RunConfig& cfg);

// Fits SM hyperparameters; writes model.json and trace.csv.
ExperimentReport run_train(const RunConfig& cfg);

// Posterior PSD draws on the grid; writes samples.csv and bnse.csv.
ExperimentReport run_sample(const RunConfig& cfg);

// Ranked local maxima of the posterior-mean PSD; writes peaks.csv.
ExperimentReport run_peaks(const RunConfig& cfg);

// Baseline estimators only (method ls, periodogram, music or all).
ExperimentReport run_baseline(const RunConfig& cfg);

// Bundled experiments: "line-spectra", "discrimination", "sunspots". The
// report flags carry the acceptance checks of each. cfg.input, when set,
// replaces the bundled sunspots file.
ExperimentReport run_experiment(const std::string& name, const RunConfig& cfg);

// Where the bundled datasets live (overridable with BNSE_DATA_DIR).
std::filesystem::path data_dir();

}  // namespace bnse
