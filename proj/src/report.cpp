#include "mocap/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "mocap/config.hpp"
#include "mocap/errors.hpp"

namespace mocap {

namespace {

std::string fixed3(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string report_table(const std::vector<MetricReport>& reports) {
  std::string out;
  out += "mode          dataset     S   sigma   slide  mpjpe_mm   pa_mpjpe_mm  latency_s\n";
  out += "-----------------------------------------------------------------------------\n";
  for (const MetricReport& r : reports) {
    char line[256];
    std::snprintf(line, sizeof(line), "%-13s %-10s %3d  %6.3f   %4d  %9.3f  %11.3f  %8.3f\n",
                  r.fingerprint.mode.c_str(), r.fingerprint.dataset_id.c_str(),
                  r.fingerprint.sampling_steps, r.fingerprint.sigma, r.fingerprint.slide,
                  r.mpjpe_mm, r.pa_mpjpe_mm, r.latency_s);
    out += line;
  }
  return out;
}

std::string report_kv(const std::vector<MetricReport>& reports) {
  KeyValueConfig kv;
  kv.set_int("rows", static_cast<long>(reports.size()));
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const MetricReport& r = reports[i];
    const std::string p = "row." + std::to_string(i) + ".";
    kv.set(p + "mode", r.fingerprint.mode);
    kv.set(p + "dataset", r.fingerprint.dataset_id);
    kv.set_int(p + "sampling_steps", r.fingerprint.sampling_steps);
    kv.set_double(p + "sigma", r.fingerprint.sigma);
    kv.set_int(p + "slide", r.fingerprint.slide);
    kv.set_u64(p + "seed", r.seed);
    kv.set_double(p + "mpjpe_mm", r.mpjpe_mm);
    kv.set_double(p + "pa_mpjpe_mm", r.pa_mpjpe_mm);
    kv.set_double(p + "latency_s", r.latency_s);
    for (std::size_t s = 0; s < r.per_sequence.size(); ++s) {
      const SequenceMetrics& m = r.per_sequence[s];
      const std::string q = p + "seq." + std::to_string(s) + ".";
      kv.set(q + "name", m.name);
      kv.set_int(q + "frames", m.frames);
      kv.set_double(q + "mpjpe_mm", m.mpjpe_mm);
      kv.set_double(q + "pa_mpjpe_mm", m.pa_mpjpe_mm);
    }
  }
  return kv.serialize();
}

void write_report_files(const std::filesystem::path& dir, const std::string& stem,
                        const std::vector<MetricReport>& reports) {
  std::filesystem::create_directories(dir);
  std::ofstream txt(dir / (stem + ".txt"), std::ios::binary);
  if (!txt) throw IoError("cannot write report text file");
  txt << report_table(reports);
  std::ofstream kv(dir / (stem + ".kv"), std::ios::binary);
  if (!kv) throw IoError("cannot write report kv file");
  kv << report_kv(reports);
}

void write_line_plot_svg(const std::filesystem::path& path, const std::string& title,
                         const std::string& x_label, const std::vector<double>& xs,
                         const std::vector<PlotSeries>& series) {
  if (xs.empty() || series.empty()) throw InvalidConfig("plot: nothing to draw");
  const int width = 640, height = 420;
  const double left = 70, right = 610, top = 50, bottom = 370;

  double ymin = 1e300, ymax = -1e300;
  for (const PlotSeries& s : series)
    for (double v : s.ys) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (ymin == ymax) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double xmin = xs.front(), xmax = xs.back();
  const double xspan = (xmax == xmin) ? 1.0 : xmax - xmin;

  auto px = [&](double x) { return left + (x - xmin) / xspan * (right - left); };
  auto py = [&](double y) { return bottom - (y - ymin) / (ymax - ymin) * (bottom - top); };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" + title +
         "</text>\n";
  svg += "<line x1=\"" + fixed3(left) + "\" y1=\"" + fixed3(bottom) + "\" x2=\"" +
         fixed3(right) + "\" y2=\"" + fixed3(bottom) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fixed3(left) + "\" y1=\"" + fixed3(top) + "\" x2=\"" + fixed3(left) +
         "\" y2=\"" + fixed3(bottom) + "\" stroke=\"black\"/>\n";
  svg += "<text x=\"320\" y=\"405\" text-anchor=\"middle\" font-size=\"12\">" + x_label +
         "</text>\n";

  for (const double x : xs) {
    svg += "<text x=\"" + fixed3(px(x)) + "\" y=\"385\" text-anchor=\"middle\" font-size=\"10\">" +
           format_double(x) + "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double y = ymin + (ymax - ymin) * i / 4.0;
    svg += "<text x=\"" + fixed3(left - 8) + "\" y=\"" + fixed3(py(y) + 4) +
           "\" text-anchor=\"end\" font-size=\"10\">" + fixed3(y) + "</text>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    if (series[s].ys.size() != xs.size())
      throw ShapeMismatch("plot: series length does not match x values");
    const char* color = kColors[s % 5];
    std::string points;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      points += fixed3(px(xs[i])) + "," + fixed3(py(series[s].ys[i]));
      if (i + 1 < xs.size()) points += " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
    svg += "<text x=\"" + fixed3(right - 4) + "\" y=\"" + fixed3(top + 16 + 16 * s) +
           "\" text-anchor=\"end\" font-size=\"12\" fill=\"" + color + "\">" +
           series[s].label + "</text>\n";
  }
  svg += "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write plot " + path.string());
  out << svg;
}

}  // namespace mocap
