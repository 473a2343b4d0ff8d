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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bnse/gp.hpp"
#include "bnse/optim.hpp"
#include "bnse/spectrum_estimate.hpp"
#include "bnse/time_series.hpp"

namespace bnse {

// Reads a two-column CSV of (time, value). A first line that does not parse
// as numbers is taken as a header. Rows are sorted by time (stable);
// malformed rows and duplicate timestamps raise InputError naming the line.
TimeSeries ingest_csv(const std::filesystem::path& path);

// Same parser on an in-memory buffer; `source` names it in errors.
TimeSeries parse_series_csv(const std::string& text, const std::string& source = "<input>");

// Writes `t,y` rows at full precision.
void write_series_csv(const std::filesystem::path& path, const TimeSeries& data);

// `freq,mean_re,mean_im,var_re,var_im,psd_mean`, every value in its
// shortest round-trip form so that read_spectrum_csv restores it exactly.
void write_spectrum_csv(const std::filesystem::path& path, const SpectrumEstimate& est);
SpectrumEstimate read_spectrum_csv(const std::filesystem::path& path);

// One row per draw: `draw,<freq_0>,...,<freq_M-1>` header, then the index
// of the draw and its values.
void write_samples_csv(const std::filesystem::path& path, std::span<const double> grid,
                       const Eigen::MatrixXd& draws);

// `rank,freq,psd_mean`, rank starting at 1.
void write_peaks_csv(const std::filesystem::path& path, const std::vector<Peak>& peaks);

// `iteration,nlml,step`.
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace);

// Writes through a temporary file in the same directory and renames it into
// place, so readers never see a half-written file.
void write_text_file(const std::filesystem::path& path, const std::string& content);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace bnse
