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
#include <string>
#include <vector>

namespace bnse {

// One curve of a line plot. When band_lo/band_hi are set (same length as x)
// the region between them is shaded behind the curve.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> band_lo;
  std::vector<double> band_hi;
  std::string colour = "#1f77b4";
};

struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
  double width = 800.0;
  double height = 420.0;
};

// Self-contained SVG document for `plot`.
std::string render_svg(const SvgPlot& plot);
void write_svg(const std::filesystem::path& path, const SvgPlot& plot);

}  // namespace bnse
