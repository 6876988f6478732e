#pragma once

// Static SVG figures of chart boundaries and slice masks. Output depends only
// on the inputs, so identical results give byte-identical documents.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ccchart/chart_geometry.hpp"
#include "ccchart/converter_model.hpp"
#include "ccchart/io.hpp"
#include "ccchart/slice.hpp"

namespace ccchart::svg {

using Point = std::array<double, 2>;

enum class Coordinates { alpha_beta, nominal };

inline const char* to_string(Coordinates c) { return c == Coordinates::nominal ? "nominal" : "abg"; }

struct Polyline {
  std::vector<Point> points;
  std::string stroke = "#c00000";
  bool dashed = false;
  bool closed = false;
  std::string label;
};

struct Figure {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::vector<Point>> fills;  // filled polygons
  std::vector<Polyline> lines;
};

namespace detail {

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", std::abs(v) < 0.005 ? 0.0 : v);
  return buf;
}

}  // namespace detail

inline std::string render(const Figure& fig) {
  constexpr double size = 520, margin = 60, plot = size - 2 * margin;
  double extent = 0.0;
  auto grow = [&](const Point& p) { extent = std::max({extent, std::abs(p[0]), std::abs(p[1])}); };
  for (const auto& f : fig.fills)
    for (const auto& p : f) grow(p);
  for (const auto& l : fig.lines)
    for (const auto& p : l.points) grow(p);
  extent = std::max(0.1, std::ceil(extent * 1.1 / 0.05) * 0.05);
  const double tick = extent <= 0.5 ? 0.1 : (extent <= 1.0 ? 0.2 : 0.5);

  auto sx = [&](double x) { return margin + (x + extent) / (2 * extent) * plot; };
  auto sy = [&](double y) { return margin + (extent - y) / (2 * extent) * plot; };
  using detail::num;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << size << "\" height=\"" << size << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << size / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"14\">"
     << detail::escape(fig.title) << "</text>\n";

  // axes and ticks
  os << "<g stroke=\"#888888\" stroke-width=\"0.5\" font-family=\"sans-serif\" font-size=\"10\">\n";
  os << "<rect x=\"" << num(margin) << "\" y=\"" << num(margin) << "\" width=\"" << num(plot)
     << "\" height=\"" << num(plot) << "\" fill=\"none\"/>\n";
  const int ticks = static_cast<int>(std::floor(extent / tick + 1e-9));
  for (int k = -ticks; k <= ticks; ++k) {
    const double v = k * tick;
    os << "<line x1=\"" << num(sx(v)) << "\" y1=\"" << num(margin + plot) << "\" x2=\"" << num(sx(v))
       << "\" y2=\"" << num(margin + plot + 5) << "\"/>\n";
    os << "<line x1=\"" << num(margin - 5) << "\" y1=\"" << num(sy(v)) << "\" x2=\"" << num(margin)
       << "\" y2=\"" << num(sy(v)) << "\"/>\n";
    os << "<text x=\"" << num(sx(v)) << "\" y=\"" << num(margin + plot + 17)
       << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"black\">" << io::fmt(std::round(v * 100) / 100)
       << "</text>\n";
    os << "<text x=\"" << num(margin - 8) << "\" y=\"" << num(sy(v) + 3)
       << "\" text-anchor=\"end\" stroke=\"none\" fill=\"black\">" << io::fmt(std::round(v * 100) / 100)
       << "</text>\n";
  }
  os << "<line x1=\"" << num(sx(0)) << "\" y1=\"" << num(margin) << "\" x2=\"" << num(sx(0))
     << "\" y2=\"" << num(margin + plot) << "\" stroke-dasharray=\"2,2\"/>\n";
  os << "<line x1=\"" << num(margin) << "\" y1=\"" << num(sy(0)) << "\" x2=\"" << num(margin + plot)
     << "\" y2=\"" << num(sy(0)) << "\" stroke-dasharray=\"2,2\"/>\n";
  os << "</g>\n";
  os << "<text x=\"" << size / 2 << "\" y=\"" << num(size - 14)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
     << detail::escape(fig.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << size / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\" transform=\"rotate(-90 16 "
     << size / 2 << ")\">" << detail::escape(fig.y_label) << "</text>\n";

  if (!fig.fills.empty()) {
    os << "<g fill=\"#6fa8dc\" stroke=\"none\" shape-rendering=\"crispEdges\">\n";
    for (const auto& poly : fig.fills) {
      os << "<polygon points=\"";
      for (std::size_t i = 0; i < poly.size(); ++i)
        os << (i ? " " : "") << num(sx(poly[i][0])) << ',' << num(sy(poly[i][1]));
      os << "\"/>\n";
    }
    os << "</g>\n";
  }

  int legend = 0;
  for (const auto& line : fig.lines) {
    if (line.points.empty()) continue;
    os << "<" << (line.closed ? "polygon" : "polyline") << " fill=\"none\" stroke=\"" << line.stroke
       << "\" stroke-width=\"1.5\"";
    if (line.dashed) os << " stroke-dasharray=\"6,4\"";
    os << " points=\"";
    for (std::size_t i = 0; i < line.points.size(); ++i)
      os << (i ? " " : "") << num(sx(line.points[i][0])) << ',' << num(sy(line.points[i][1]));
    os << "\"/>\n";
    if (!line.label.empty()) {
      const double ly = margin + 14 + 14 * legend++;
      os << "<line x1=\"" << num(margin + plot - 110) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
         << num(margin + plot - 90) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << line.stroke
         << "\" stroke-width=\"1.5\"" << (line.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
      os << "<text x=\"" << num(margin + plot - 85) << "\" y=\"" << num(ly)
         << "\" font-family=\"sans-serif\" font-size=\"10\">" << detail::escape(line.label)
         << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Figure builders

/// Maps a point of the unbalance plane (offset by a balanced total) to the
/// plotting coordinates.
inline Point project(double x, double y, double total, Coordinates coords) {
  if (coords == Coordinates::alpha_beta) return {x, y};
  const PhasePowers P = plane_point(x, y, total);
  return {P[0], P[1]};
}

inline Polyline trace_line(const BoundaryTrace& t, Coordinates coords, std::string stroke, bool dashed,
                           std::string label) {
  Polyline line{{}, std::move(stroke), dashed, t.mode != DirectionMode::spherical, std::move(label)};
  const double total = t.total_power.value_or(0.0);
  for (const auto& s : t.samples) {
    if (t.mode == DirectionMode::spherical)
      line.points.push_back({s.r * std::sin(s.theta), s.r * std::cos(s.theta)});
    else
      line.points.push_back(project(s.r * std::cos(s.theta), s.r * std::sin(s.theta), total, coords));
  }
  return line;
}

inline std::string axis_x(Coordinates c) {
  return c == Coordinates::nominal ? "P[1] (pu)" : "P_hat[1] (pu)";
}
inline std::string axis_y(Coordinates c) {
  return c == Coordinates::nominal ? "P[2] (pu)" : "P_hat[2] (pu)";
}

/// Boundary of a chart over dashed benchmark boundaries.
inline Figure boundary_figure(const BoundaryTrace& trace, const std::vector<BoundaryTrace>& references,
                              Coordinates coords) {
  Figure fig;
  fig.title = trace.design + " boundary (" + ccchart::to_string(trace.mode) +
              (trace.total_power ? ", P_Ttl = " + io::fmt(*trace.total_power) + " pu" : "") + ")";
  if (trace.mode == DirectionMode::spherical) {
    const double psi = trace.samples.empty() ? 0.0 : trace.samples.front().psi;
    fig.title += ", psi = " + io::fmt(std::round(psi * 180.0 / kPi * 1e6) / 1e6) + " deg";
    fig.x_label = "radius in unbalance plane (pu)";
    fig.y_label = "P_hat[3] (pu)";
  } else {
    fig.x_label = axis_x(coords);
    fig.y_label = axis_y(coords);
  }
  static const char* palette[] = {"#000000", "#555555", "#999999"};
  for (std::size_t i = 0; i < references.size(); ++i)
    fig.lines.push_back(trace_line(references[i], coords, palette[i % 3], true, references[i].design));
  fig.lines.push_back(trace_line(trace, coords, "#c00000", false, trace.design));
  return fig;
}

/// Slice mask as filled cells (horizontal runs merged) with isolated
/// features and dashed reference boundaries.
inline Figure slice_figure(const SliceMask& mask, const std::string& design,
                           const std::vector<BoundaryTrace>& references, Coordinates coords) {
  Figure fig;
  fig.title = design + " slice, P_Ttl = " + io::fmt(mask.total_power) + " pu";
  fig.x_label = axis_x(coords);
  fig.y_label = axis_y(coords);
  const int n = mask.n();
  const double h = mask.grid.spacing();
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n;) {
      if (!mask.at(ix, iy)) {
        ++ix;
        continue;
      }
      int end = ix;
      while (end + 1 < n && mask.at(end + 1, iy)) ++end;
      const double x0 = mask.grid.coord(ix) - h / 2, x1 = mask.grid.coord(end) + h / 2;
      const double y = mask.grid.coord(iy);
      const double y0 = y - h / 2, y1 = y + h / 2;
      const double t = mask.total_power;
      fig.fills.push_back({project(x0, y0, t, coords), project(x1, y0, t, coords),
                           project(x1, y1, t, coords), project(x0, y1, t, coords)});
      ix = end + 1;
    }
  }
  static const char* palette[] = {"#000000", "#555555", "#999999"};
  for (std::size_t i = 0; i < references.size(); ++i)
    fig.lines.push_back(trace_line(references[i], coords, palette[i % 3], true, references[i].design));
  for (const auto& f : mask.features) {
    Polyline line{{project(f.start[0], f.start[1], mask.total_power, coords),
                   project(f.end[0], f.end[1], mask.total_power, coords)},
                  "#c00000", false, false, ""};
    if (f.kind == IsolatedFeature::Kind::point) {
      // small cross so that points remain visible
      const double d = 2 * h;
      const Point c = line.points[0];
      line.points = {{c[0] - d, c[1]}, {c[0] + d, c[1]}, c, {c[0], c[1] - d}, {c[0], c[1] + d}};
    }
    fig.lines.push_back(std::move(line));
  }
  return fig;
}

}  // namespace ccchart::svg
