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

#include "bnse/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <spdlog/fmt/fmt.h>

#include "bnse/error.hpp"
#include "bnse/io.hpp"

namespace bnse {

namespace {

constexpr double kLeft = 70.0, kRight = 150.0, kTop = 36.0, kBottom = 48.0;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Extent {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (lo == hi) lo -= 0.5, hi += 0.5;
  }
};

}  // namespace

std::string render_svg(const SvgPlot& plot) {
  Extent ex, ey;
  for (const auto& s : plot.series) {
    if (s.x.size() != s.y.size()) throw InputError("svg: series '" + s.label + "' x/y mismatch");
    const bool band = !s.band_lo.empty();
    if (band && (s.band_lo.size() != s.x.size() || s.band_hi.size() != s.x.size())) {
      throw InputError("svg: series '" + s.label + "' band length mismatch");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      ex.add(s.x[i]);
      ey.add(s.y[i]);
      if (band) {
        ey.add(s.band_lo[i]);
        ey.add(s.band_hi[i]);
      }
    }
  }
  ex.finish();
  ey.finish();
  const double pw = plot.width - kLeft - kRight;
  const double ph = plot.height - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - ex.lo) / (ex.hi - ex.lo) * pw; };
  auto py = [&](double y) {
    y = std::clamp(y, ey.lo, ey.hi);
    return kTop + (1.0 - (y - ey.lo) / (ey.hi - ey.lo)) * ph;
  };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      plot.width, plot.height);
  out += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     kLeft + pw / 2, escape(plot.title));

  for (int k = 0; k <= 5; ++k) {
    const double xv = ex.lo + (ex.hi - ex.lo) * k / 5.0;
    const double yv = ey.lo + (ey.hi - ey.lo) * k / 5.0;
    out += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#ddd\"/>\n"
        "<text x=\"{0:.2f}\" y=\"{3:.2f}\" text-anchor=\"middle\">{4:.4g}</text>\n",
        px(xv), kTop, kTop + ph, kTop + ph + 16, xv);
    out += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>\n"
        "<text x=\"{3:.2f}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:.4g}</text>\n",
        kLeft, py(yv), kLeft + pw, kLeft - 6, py(yv) + 4, yv);
  }
  out += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
      kLeft, kTop, pw, ph);
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2,
                     plot.height - 10, escape(plot.x_label));
  out += fmt::format(
      "<text transform=\"translate(16,{}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
      kTop + ph / 2, escape(plot.y_label));

  for (const auto& s : plot.series) {
    if (s.x.empty()) continue;
    if (!s.band_lo.empty()) {
      std::string pts;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        pts += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.band_hi[i]));
      }
      for (std::size_t i = s.x.size(); i-- > 0;) {
        pts += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.band_lo[i]));
      }
      out += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" stroke=\"none\"/>\n",
                         pts, s.colour);
    }
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      pts += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i]));
    }
    out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                       pts, s.colour);
  }

  double ly = kTop + 10;
  for (const auto& s : plot.series) {
    out += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"3\"/>\n"
        "<text x=\"{4}\" y=\"{5}\">{6}</text>\n",
        kLeft + pw + 10, ly, kLeft + pw + 30, s.colour, kLeft + pw + 36, ly + 4, escape(s.label));
    ly += 18;
  }
  out += "</svg>\n";
  return out;
}

void write_svg(const std::filesystem::path& path, const SvgPlot& plot) {
  write_text_file(path, render_svg(plot));
}

}  // namespace bnse
