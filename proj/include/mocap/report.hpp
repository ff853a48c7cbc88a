#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mocap/metrics.hpp"

namespace mocap {

/// Human-readable table over report rows.
std::string report_table(const std::vector<MetricReport>& reports);

/// Machine-readable flat key-value rendering (row.<i>.<field> = value).
std::string report_kv(const std::vector<MetricReport>& reports);

void write_report_files(const std::filesystem::path& dir, const std::string& stem,
                        const std::vector<MetricReport>& reports);

struct PlotSeries {
  std::string label;
  std::vector<double> ys;
};

/// Minimal deterministic SVG line plot.
void write_line_plot_svg(const std::filesystem::path& path, const std::string& title,
                         const std::string& x_label, const std::vector<double>& xs,
                         const std::vector<PlotSeries>& series);

}  // namespace mocap
