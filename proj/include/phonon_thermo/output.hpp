#pragma once

// CSV and SVG serialization of sweep results.
//
// Numbers are written as the shortest decimal that round-trips to the same double,
// independent of the process locale. Sentinel cells serialize as empty fields.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <locale>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "phonon_thermo/sweep.hpp"

namespace phonon_thermo {

inline std::string format_number(double x) {
  if (std::isnan(x)) return {};
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return ec == std::errc{} ? std::string(buf.data(), end) : std::string{};
}

/// Parses a field written by format_number; empty means sentinel.
inline std::optional<double> parse_number(std::string_view field) {
  if (field.empty()) return std::nullopt;
  double x = 0.0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
  if (ec != std::errc{} || end != field.data() + field.size()) return std::nullopt;
  return x;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    fields.push_back(line.substr(begin, comma == std::string_view::npos ? std::string_view::npos : comma - begin));
    if (comma == std::string_view::npos) break;
    begin = comma + 1;
  }
  return fields;
}

inline constexpr std::string_view kSweepCsvHeader = "axis_name,axis_value,P_e,dPe_dT,F_Q,f,omega_eff,gamma";
inline constexpr std::string_view kHeatmapCsvHeader = "T,eta,F_Q";

inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  const AxisSpec& axis = r.axes.at(0);
  const std::vector<double> xs = axis.values();
  os << kSweepCsvHeader << '\n';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const SweepCell& c = r.at(i);
    os << to_string(axis.parameter()) << ',' << format_number(xs[i]);
    if (c.valid) {
      os << ',' << format_number(c.qfi.P_e) << ',' << format_number(c.qfi.dPe_dT) << ','
         << format_number(c.qfi.F_Q) << ',' << format_number(c.f) << ','
         << format_number(c.omega_eff) << ',' << format_number(c.gamma);
    } else {
      os << ",,,,,,";
    }
    os << '\n';
  }
}

inline void write_heatmap_csv(std::ostream& os, const SweepResult& r) {
  const std::vector<double> Ts = r.axes.at(0).values();
  const std::vector<double> etas = r.axes.at(1).values();
  os << kHeatmapCsvHeader << '\n';
  for (std::size_t i = 0; i < Ts.size(); ++i)
    for (std::size_t j = 0; j < etas.size(); ++j) {
      const SweepCell& c = r.at(i, j);
      os << format_number(Ts[i]) << ',' << format_number(etas[j]) << ','
         << (c.valid ? format_number(c.qfi.F_Q) : std::string{}) << '\n';
    }
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

inline std::string svg_num(double x) {
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss.precision(4);
  ss << std::fixed << x;
  std::string s = ss.str();
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

inline std::string tick_label(double x) {
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss.precision(3);
  ss << x;
  return ss.str();
}

/// Perceptually ordered dark-purple -> yellow ramp (viridis anchor colours).
inline std::string colormap(double u) {
  static constexpr std::array<std::array<double, 3>, 5> anchors{{{68, 1, 84},
                                                                 {59, 82, 139},
                                                                 {33, 145, 140},
                                                                 {94, 201, 98},
                                                                 {253, 231, 37}}};
  u = std::clamp(std::isfinite(u) ? u : 0.0, 0.0, 1.0);
  const double pos = u * (anchors.size() - 1);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(pos), anchors.size() - 2);
  const double t = pos - static_cast<double>(k);
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<int>(std::lround(anchors[k][c] + t * (anchors[k + 1][c] - anchors[k][c])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

struct Frame {
  double width = 640, height = 480;
  double left = 80, right = 30, top = 40, bottom = 60;
  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
};

inline void svg_open(std::ostream& os, const Frame& fr, std::string_view title) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_num(fr.width) << "\" height=\""
     << svg_num(fr.height) << "\" viewBox=\"0 0 " << svg_num(fr.width) << ' ' << svg_num(fr.height)
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << svg_num(fr.width) << "\" height=\"" << svg_num(fr.height)
     << "\" fill=\"white\"/>\n"
     << "<text x=\"" << svg_num(fr.width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << xml_escape(title) << "</text>\n";
}

inline void svg_axes(std::ostream& os, const Frame& fr, double x0, double x1, double y0, double y1,
                     std::string_view xlabel, std::string_view ylabel, bool xlog = false) {
  const double bx = fr.left, by = fr.top + fr.plot_h();
  os << "<rect x=\"" << svg_num(fr.left) << "\" y=\"" << svg_num(fr.top) << "\" width=\""
     << svg_num(fr.plot_w()) << "\" height=\"" << svg_num(fr.plot_h())
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double u = k / 4.0;
    const double xv = xlog ? std::exp(std::log(x0) + u * (std::log(x1) - std::log(x0))) : x0 + u * (x1 - x0);
    const double px = bx + u * fr.plot_w();
    os << "<line x1=\"" << svg_num(px) << "\" y1=\"" << svg_num(by) << "\" x2=\"" << svg_num(px)
       << "\" y2=\"" << svg_num(by + 5) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << svg_num(px) << "\" y=\"" << svg_num(by + 18) << "\" text-anchor=\"middle\">"
       << xml_escape(tick_label(xv)) << "</text>\n";
    const double yv = y0 + u * (y1 - y0);
    const double py = by - u * fr.plot_h();
    os << "<line x1=\"" << svg_num(bx - 5) << "\" y1=\"" << svg_num(py) << "\" x2=\"" << svg_num(bx)
       << "\" y2=\"" << svg_num(py) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << svg_num(bx - 8) << "\" y=\"" << svg_num(py + 4) << "\" text-anchor=\"end\">"
       << xml_escape(tick_label(yv)) << "</text>\n";
  }
  os << "<text x=\"" << svg_num(bx + fr.plot_w() / 2) << "\" y=\"" << svg_num(fr.height - 15)
     << "\" text-anchor=\"middle\">" << xml_escape(xlabel) << "</text>\n"
     << "<text x=\"18\" y=\"" << svg_num(fr.top + fr.plot_h() / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << svg_num(fr.top + fr.plot_h() / 2) << ")\">" << xml_escape(ylabel) << "</text>\n";
}

}  // namespace detail

/// Line plot of F_Q along the sweep axis. Sentinel cells break the polyline.
inline void write_sweep_svg(std::ostream& os, const SweepResult& r) {
  const AxisSpec& axis = r.axes.at(0);
  const std::vector<double> xs = axis.values();
  const bool xlog = axis.scale() == Scale::Log;
  double ymax = 0.0;
  for (const auto& c : r.cells)
    if (c.valid && std::isfinite(c.qfi.F_Q)) ymax = std::max(ymax, c.qfi.F_Q);
  if (ymax <= 0.0) ymax = 1.0;

  detail::Frame fr;
  detail::svg_open(os, fr, std::string("QFI versus ") + to_string(axis.parameter()));
  detail::svg_axes(os, fr, axis.start(), axis.stop(), 0.0, ymax, to_string(axis.parameter()), "F_Q", xlog);

  auto px = [&](double x) {
    const double u = xlog ? (std::log(x) - std::log(axis.start())) / (std::log(axis.stop()) - std::log(axis.start()))
                          : (x - axis.start()) / (axis.stop() - axis.start());
    return fr.left + u * fr.plot_w();
  };
  auto py = [&](double y) { return fr.top + fr.plot_h() * (1.0 - y / ymax); };

  std::string points;
  auto flush = [&] {
    if (!points.empty())
      os << "<polyline fill=\"none\" stroke=\"#3b528b\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
    points.clear();
  };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const SweepCell& c = r.at(i);
    if (!c.valid || !std::isfinite(c.qfi.F_Q)) {
      flush();
      continue;
    }
    if (!points.empty()) points += ' ';
    points += detail::svg_num(px(xs[i])) + "," + detail::svg_num(py(c.qfi.F_Q));
  }
  flush();
  os << "</svg>\n";
}

/// Heatmap of F_Q with coupling on the horizontal axis and temperature on the vertical axis.
inline void write_heatmap_svg(std::ostream& os, const SweepResult& r) {
  const AxisSpec& T_axis = r.axes.at(0);
  const AxisSpec& eta_axis = r.axes.at(1);
  const std::size_t rows = r.rows(), cols = r.cols();
  double vmax = 0.0;
  for (const auto& c : r.cells)
    if (c.valid && std::isfinite(c.qfi.F_Q)) vmax = std::max(vmax, c.qfi.F_Q);
  if (vmax <= 0.0) vmax = 1.0;

  detail::Frame fr;
  fr.width = 720;
  fr.right = 110;
  detail::svg_open(os, fr, "QFI over temperature and coupling");
  const double cw = fr.plot_w() / static_cast<double>(cols);
  const double ch = fr.plot_h() / static_cast<double>(rows);
  os << "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const SweepCell& c = r.at(i, j);
      const std::string fill = c.valid ? detail::colormap(c.qfi.F_Q / vmax) : std::string("#808080");
      os << "<rect x=\"" << detail::svg_num(fr.left + j * cw) << "\" y=\""
         << detail::svg_num(fr.top + fr.plot_h() - (i + 1) * ch) << "\" width=\"" << detail::svg_num(cw + 0.05)
         << "\" height=\"" << detail::svg_num(ch + 0.05) << "\" fill=\"" << fill << "\"/>\n";
    }
  os << "</g>\n";
  detail::svg_axes(os, fr, eta_axis.start(), eta_axis.stop(), T_axis.start(), T_axis.stop(), "eta", "T");

  const double bar_x = fr.left + fr.plot_w() + 25;
  constexpr int kBarSteps = 50;
  for (int k = 0; k < kBarSteps; ++k) {
    const double u = (k + 0.5) / kBarSteps;
    const double y = fr.top + fr.plot_h() * (1.0 - static_cast<double>(k + 1) / kBarSteps);
    os << "<rect x=\"" << detail::svg_num(bar_x) << "\" y=\"" << detail::svg_num(y) << "\" width=\"18\" height=\""
       << detail::svg_num(fr.plot_h() / kBarSteps + 0.05) << "\" fill=\"" << detail::colormap(u) << "\"/>\n";
  }
  os << "<text x=\"" << detail::svg_num(bar_x + 22) << "\" y=\"" << detail::svg_num(fr.top + 10) << "\">"
     << detail::xml_escape(detail::tick_label(vmax)) << "</text>\n"
     << "<text x=\"" << detail::svg_num(bar_x + 22) << "\" y=\"" << detail::svg_num(fr.top + fr.plot_h()) << "\">0</text>\n"
     << "<text x=\"" << detail::svg_num(bar_x) << "\" y=\"" << detail::svg_num(fr.top - 8) << "\">F_Q</text>\n";
  os << "</svg>\n";
}

}  // namespace phonon_thermo
