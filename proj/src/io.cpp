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

#include "bnse/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <spdlog/spdlog.h>

#include "bnse/error.hpp"

namespace bnse {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_number(std::string_view field, double& value) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  return ec == std::errc() && ptr == field.data() + field.size();
}

std::string read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw InputError("input file not found: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Parses comma-separated numeric rows of a fixed width. The first
// non-empty line may be a header; `header` receives it (empty if none).
std::vector<std::pair<std::size_t, std::vector<double>>> parse_rows(const std::string& text,
                                                                    std::size_t width,
                                                                    const std::string& source,
                                                                    std::string* header) {
  std::vector<std::pair<std::size_t, std::vector<double>>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto fields = split(content);
    std::vector<double> values(fields.size());
    bool numeric = fields.size() == width;
    for (std::size_t i = 0; numeric && i < fields.size(); ++i) {
      numeric = parse_number(fields[i], values[i]);
    }
    if (!numeric) {
      if (first && fields.size() == width) {
        if (header) *header = std::string(content);
        first = false;
        continue;
      }
      throw InputError(source + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(width) + " numeric fields, got '" + std::string(content) +
                       "'");
    }
    for (std::size_t i = 0; i < width; ++i) {
      if (!std::isfinite(values[i])) {
        throw InputError(source + ":" + std::to_string(line_no) + ": non-finite value");
      }
    }
    first = false;
    rows.emplace_back(line_no, std::move(values));
  }
  return rows;
}

std::string join_row(std::initializer_list<double> values) {
  std::string out;
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_double(v);
    first = false;
  }
  out += '\n';
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

TimeSeries parse_series_csv(const std::string& text, const std::string& source) {
  const auto rows = parse_rows(text, 2, source, nullptr);
  if (rows.empty()) throw InputError(source + ": no data rows");
  std::vector<double> t, y;
  t.reserve(rows.size());
  y.reserve(rows.size());
  std::map<double, std::size_t> seen;
  for (const auto& [line_no, v] : rows) {
    const auto [it, inserted] = seen.emplace(v[0], line_no);
    if (!inserted) {
      throw InputError(source + ":" + std::to_string(line_no) + ": duplicate time " +
                       format_double(v[0]) + " (first seen on line " +
                       std::to_string(it->second) + ")");
    }
    t.push_back(v[0]);
    y.push_back(v[1]);
  }
  return TimeSeries::from_unsorted(std::move(t), std::move(y));
}

TimeSeries ingest_csv(const std::filesystem::path& path) {
  auto data = parse_series_csv(read_file(path), path.string());
  spdlog::info("read {} rows from {} spanning [{}, {}]", data.size(), path.string(),
               data.times().front(), data.times().back());
  return data;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << content;
    if (!out) throw InputError("write failed for " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_series_csv(const std::filesystem::path& path, const TimeSeries& data) {
  std::string out = "t,y\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += join_row({data.times()[i], data.values()[i]});
  }
  write_text_file(path, out);
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumEstimate& est) {
  est.validate();
  std::string out = "freq,mean_re,mean_im,var_re,var_im,psd_mean\n";
  for (std::size_t i = 0; i < est.size(); ++i) {
    out += join_row({est.grid[i], est.mean_real[i], est.mean_imag[i], est.var_real[i],
                     est.var_imag[i], est.psd_mean[i]});
  }
  write_text_file(path, out);
}

SpectrumEstimate read_spectrum_csv(const std::filesystem::path& path) {
  std::string header;
  const auto rows = parse_rows(read_file(path), 6, path.string(), &header);
  SpectrumEstimate est;
  est.method = path.stem().string();
  for (const auto& [line_no, v] : rows) {
    est.grid.push_back(v[0]);
    est.mean_real.push_back(v[1]);
    est.mean_imag.push_back(v[2]);
    est.var_real.push_back(v[3]);
    est.var_imag.push_back(v[4]);
    est.psd_mean.push_back(v[5]);
  }
  return est;
}

void write_samples_csv(const std::filesystem::path& path, std::span<const double> grid,
                       const Eigen::MatrixXd& draws) {
  if (draws.cols() != static_cast<Eigen::Index>(grid.size())) {
    throw InputError("samples: matrix width does not match the grid");
  }
  std::string out = "draw";
  for (double f : grid) out += ',' + format_double(f);
  out += '\n';
  for (Eigen::Index r = 0; r < draws.rows(); ++r) {
    out += std::to_string(r);
    for (Eigen::Index c = 0; c < draws.cols(); ++c) out += ',' + format_double(draws(r, c));
    out += '\n';
  }
  write_text_file(path, out);
}

void write_peaks_csv(const std::filesystem::path& path, const std::vector<Peak>& peaks) {
  std::string out = "rank,freq,psd_mean\n";
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    out += std::to_string(i + 1) + ',' + format_double(peaks[i].frequency) + ',' +
           format_double(peaks[i].psd) + '\n';
  }
  write_text_file(path, out);
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace) {
  std::string out = "iteration,nlml,step\n";
  for (const auto& row : trace) {
    out += std::to_string(row.iteration) + ',' + format_double(row.nlml) + ',' +
           format_double(row.step) + '\n';
  }
  write_text_file(path, out);
}

}  // namespace bnse
