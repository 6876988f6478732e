#pragma once

// Fixed-P_Ttl slices of an interconnected chart: feasibility mask on the
// unbalance plane, its topology, and lower-dimensional features that the
// mask cannot resolve.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "ccchart/chart_geometry.hpp"
#include "ccchart/converter_model.hpp"
#include "ccchart/error.hpp"
#include "ccchart/feasibility.hpp"
#include "ccchart/parallel.hpp"

namespace ccchart {

struct IsolatedFeature {
  enum class Kind { point, segment };
  Kind kind = Kind::point;
  int wire = 0;  // 1..3 phase with zero power, 4 for the zero-neutral axis
  std::array<double, 2> start{};
  std::array<double, 2> end{};
};

inline const char* to_string(IsolatedFeature::Kind k) {
  return k == IsolatedFeature::Kind::point ? "point" : "segment";
}

struct SliceMask {
  double total_power = 0.0;
  GridSpec grid;
  std::vector<std::uint8_t> mask;  // row-major: index = iy * n + ix
  int components = 0;
  int holes = 0;
  std::vector<IsolatedFeature> features;
  double area = 0.0;  // feasible cells times cell area

  int n() const { return grid.resolution; }
  bool at(int ix, int iy) const { return mask[static_cast<std::size_t>(iy) * n() + ix] != 0; }
  std::size_t feasible_cells() const {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
  }
};

namespace detail {

// 4-connected components of cells equal to `value`. Returns the count and
// optionally whether each component touches the border.
inline int label_components(const std::vector<std::uint8_t>& mask, int n, std::uint8_t value,
                            std::vector<bool>* touches_border) {
  std::vector<int> label(mask.size(), -1);
  int count = 0;
  std::queue<int> q;
  for (int start = 0; start < static_cast<int>(mask.size()); ++start) {
    if (mask[start] != value || label[start] >= 0) continue;
    bool border = false;
    label[start] = count;
    q.push(start);
    while (!q.empty()) {
      const int c = q.front();
      q.pop();
      const int x = c % n, y = c / n;
      if (x == 0 || y == 0 || x == n - 1 || y == n - 1) border = true;
      const int nbr[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (const auto& p : nbr) {
        if (p[0] < 0 || p[1] < 0 || p[0] >= n || p[1] >= n) continue;
        const int idx = p[1] * n + p[0];
        if (mask[idx] == value && label[idx] < 0) {
          label[idx] = count;
          q.push(idx);
        }
      }
    }
    if (touches_border) touches_border->push_back(border);
    ++count;
  }
  return count;
}

}  // namespace detail

/// Feasibility mask of the plane P_hat[3] = P_Ttl / sqrt(3) with topology and
/// isolated zero-current features. Cells use the design's exhaustive
/// indicator.
inline SliceMask slice(const CapabilityChart& chart, double total_power, const GridSpec& grid) {
  grid.validate();
  if (!(std::abs(total_power) <= 1.0))
    throw Error(ErrorKind::invalid_input, "total power must lie in [-1, 1]");
  const int n = grid.resolution;
  SliceMask out;
  out.total_power = total_power;
  out.grid = grid;
  out.mask.assign(static_cast<std::size_t>(n) * n, 0);
  parallel_for(n, [&](std::size_t iy) {
    const double y = grid.coord(static_cast<int>(iy));
    for (int ix = 0; ix < n; ++ix)
      out.mask[iy * n + ix] = chart.contains_exact(plane_point(grid.coord(ix), y, total_power));
  });

  out.components = detail::label_components(out.mask, n, 1, nullptr);
  std::vector<bool> border;
  detail::label_components(out.mask, n, 0, &border);
  out.holes = static_cast<int>(std::count(border.begin(), border.end(), false));
  const double h = grid.spacing();
  out.area = static_cast<double>(out.feasible_cells()) * h * h;

  // A location is resolved by the mask when a feasible cell lies within one
  // cell of it.
  auto nearest = [&](double v) {
    return static_cast<int>(std::lround((v + grid.half_width) / h));
  };
  auto covered = [&](double x, double y, bool include_self) {
    const int cx = nearest(x), cy = nearest(y);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (!include_self && dx == 0 && dy == 0) continue;
        const int ix = cx + dx, iy = cy + dy;
        if (ix >= 0 && iy >= 0 && ix < n && iy < n && out.at(ix, iy)) return true;
      }
    return false;
  };

  // Phase i has zero power on the line g_i . (x, y) = -P_Ttl / 3.
  const double sample = h / 4.0;
  for (int i = 0; i < 3; ++i) {
    const double gx = kClarke[0][i], gy = kClarke[1][i];
    const double g2 = gx * gx + gy * gy;
    const double g = std::sqrt(g2);
    const double fx = -total_power / 3.0 * gx / g2, fy = -total_power / 3.0 * gy / g2;
    const double tx = -gy / g, ty = gx / g;
    const double reach = grid.half_width * std::sqrt(2.0);
    const long steps = static_cast<long>(std::ceil(reach / sample));
    bool open = false;
    IsolatedFeature cur;
    auto close = [&](double x, double y) {
      cur.end = {x, y};
      cur.kind = std::hypot(cur.end[0] - cur.start[0], cur.end[1] - cur.start[1]) < h
                     ? IsolatedFeature::Kind::point
                     : IsolatedFeature::Kind::segment;
      out.features.push_back(cur);
      open = false;
    };
    double px = 0, py = 0;
    for (long s = -steps; s <= steps; ++s) {
      const double x = fx + tx * s * sample, y = fy + ty * s * sample;
      bool hit = false;
      if (std::abs(x) <= grid.half_width && std::abs(y) <= grid.half_width) {
        PhasePowers P = plane_point(x, y, total_power);
        P[i] = 0.0;
        hit = chart.contains_exact(P) && !covered(x, y, true);
      }
      if (hit && !open) {
        cur = IsolatedFeature{IsolatedFeature::Kind::point, i + 1, {x, y}, {x, y}};
        open = true;
      } else if (!hit && open) {
        close(px, py);
      }
      px = x;
      py = y;
    }
    if (open) close(px, py);
  }

  // Zero neutral current only at the slice centre.
  const int c = (n - 1) / 2;
  if (out.at(c, c) && !covered(0.0, 0.0, false))
    out.features.push_back({IsolatedFeature::Kind::point, 4, {0.0, 0.0}, {0.0, 0.0}});
  return out;
}

inline SliceMask slice(const ConverterDesign& design, double total_power,
                       const GridSpec& grid = {801, 1.0}) {
  return slice(CapabilityChart(design), total_power, grid);
}

}  // namespace ccchart
