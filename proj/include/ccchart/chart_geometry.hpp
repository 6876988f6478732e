#pragma once

// Chart sizes (CCA/CCV) by grid counting and by boundary-radius quadrature,
// boundary traces, zero-power loci and size ratios.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ccchart/converter_model.hpp"
#include "ccchart/error.hpp"
#include "ccchart/feasibility.hpp"
#include "ccchart/parallel.hpp"

namespace ccchart {

inline constexpr double kPi = std::numbers::pi;

/// Regular grid over the symmetric box [-half_width, half_width] per axis.
struct GridSpec {
  int resolution = 801;
  double half_width = 1.0;

  void validate() const {
    if (resolution < 21 || resolution % 2 == 0)
      throw Error(ErrorKind::invalid_grid, "grid resolution must be an odd integer >= 21");
    if (!(std::isfinite(half_width) && half_width > 0.0))
      throw Error(ErrorKind::invalid_grid, "grid half width must be positive");
  }

  double spacing() const { return 2.0 * half_width / (resolution - 1); }

  /// Coordinate of node k; the middle node is exactly zero.
  double coord(int k) const {
    const int n1 = resolution - 1;
    return half_width * static_cast<double>(2 * k - n1) / static_cast<double>(n1);
  }
};

enum class MetricKind { area, volume };
enum class MetricMethod { grid, boundary_integral };

inline const char* to_string(MetricKind k) { return k == MetricKind::area ? "area" : "volume"; }
inline const char* to_string(MetricMethod m) {
  return m == MetricMethod::grid ? "grid" : "boundary-integral";
}

struct ChartMetrics {
  MetricKind kind = MetricKind::area;
  double value = 0.0;  // pu^2 for areas, pu^3 for volumes
  MetricMethod method = MetricMethod::grid;
  std::vector<int> resolution;
};

// ---------------------------------------------------------------------------
// Grid measures
//
// Chart faces often pass exactly through grid nodes (capacities are multiples
// of the spacing), so nodes on the boundary count one half.

/// Standalone chart area from grid counting in the alpha-beta plane.
inline ChartMetrics cca_grid(const CapabilityChart& chart, const GridSpec& grid) {
  grid.validate();
  const int n = grid.resolution;
  std::vector<long> rows(n, 0);
  parallel_for(n, [&](std::size_t iy) {
    const double y = grid.coord(static_cast<int>(iy));
    long count = 0;
    for (int ix = 0; ix < n; ++ix)
      count += chart.grid_weight(plane_point(grid.coord(ix), y, 0.0));
    rows[iy] = count;
  });
  long total = 0;
  for (long c : rows) total += c;
  const double h = grid.spacing();
  return {MetricKind::area, 0.5 * static_cast<double>(total) * h * h, MetricMethod::grid, {n, n}};
}

inline ChartMetrics cca_grid(const ConverterDesign& design, const GridSpec& grid = {}) {
  return cca_grid(CapabilityChart(design), grid);
}

/// Same area measured on a grid over nominal (P1, P2) with P3 = -P1 - P2.
/// The plane's area element is sqrt(3) times the projected cell.
inline ChartMetrics cca_grid_nominal(const CapabilityChart& chart, const GridSpec& grid) {
  grid.validate();
  const int n = grid.resolution;
  std::vector<long> rows(n, 0);
  parallel_for(n, [&](std::size_t iy) {
    const double p2 = grid.coord(static_cast<int>(iy));
    long count = 0;
    for (int ix = 0; ix < n; ++ix) {
      const double p1 = grid.coord(ix);
      count += chart.grid_weight(PhasePowers{{p1, p2, -p1 - p2}});
    }
    rows[iy] = count;
  });
  long total = 0;
  for (long c : rows) total += c;
  const double h = grid.spacing();
  return {MetricKind::area, 0.5 * static_cast<double>(total) * h * h * std::sqrt(3.0), MetricMethod::grid,
          {n, n}};
}

/// Interconnected chart volume from grid counting over nominal P.
inline ChartMetrics ccv_grid(const CapabilityChart& chart, const GridSpec& grid) {
  grid.validate();
  const int n = grid.resolution;
  std::vector<long> slabs(n, 0);
  parallel_for(n, [&](std::size_t iz) {
    const double p3 = grid.coord(static_cast<int>(iz));
    long count = 0;
    for (int iy = 0; iy < n; ++iy) {
      const double p2 = grid.coord(iy);
      for (int ix = 0; ix < n; ++ix)
        count += chart.grid_weight(PhasePowers{{grid.coord(ix), p2, p3}});
    }
    slabs[iz] = count;
  });
  long total = 0;
  for (long c : slabs) total += c;
  const double h = grid.spacing();
  return {MetricKind::volume, 0.5 * static_cast<double>(total) * h * h * h, MetricMethod::grid,
          {n, n, n}};
}

inline ChartMetrics ccv_grid(const ConverterDesign& design, const GridSpec& grid = {201, 1.0}) {
  return ccv_grid(CapabilityChart(design), grid);
}

// ---------------------------------------------------------------------------
// Boundary radius

namespace detail {

// sup{ r >= 0 : |a_i + b_i r| <= cap_i (i < 3), k r <= cap_3 }, or nothing
// when no r >= 0 satisfies every constraint.
inline std::optional<double> interval_top(const std::array<double, 3>& a,
                                          const std::array<double, 3>& b, double k,
                                          const WireVector& cap) {
  double lo = 0.0, hi = cap[3] / k;
  for (int i = 0; i < 3; ++i) {
    if (b[i] == 0.0) {
      if (!(std::abs(a[i]) <= cap[i])) return std::nullopt;
      continue;
    }
    double r1 = (-cap[i] - a[i]) / b[i];
    double r2 = (cap[i] - a[i]) / b[i];
    if (r1 > r2) std::swap(r1, r2);
    lo = std::max(lo, r1);
    hi = std::min(hi, r2);
  }
  if (!(lo <= hi)) return std::nullopt;
  return hi;
}

// sup{ r >= 0 : sum_i |a_i + b_i r| + k r <= limit } for the idealised chart.
inline std::optional<double> idealised_top(const std::array<double, 3>& a,
                                           const std::array<double, 3>& b, double k,
                                           double limit) {
  auto f = [&](double r) {
    double s = k * r;
    for (int i = 0; i < 3; ++i) s += std::abs(a[i] + b[i] * r);
    return s;
  };
  std::vector<double> knots{0.0};
  for (int i = 0; i < 3; ++i)
    if (b[i] != 0.0 && -a[i] / b[i] > 0.0) knots.push_back(-a[i] / b[i]);
  std::sort(knots.begin(), knots.end());
  int last = -1;
  for (int j = 0; j < static_cast<int>(knots.size()); ++j)
    if (f(knots[j]) <= limit) last = j;
  if (last < 0) return std::nullopt;
  const double s0 = knots[last];
  const double f0 = f(s0);
  double slope;
  if (last + 1 < static_cast<int>(knots.size())) {
    const double s1 = knots[last + 1];
    slope = (f(s1) - f0) / (s1 - s0);
  } else {
    slope = k;
    for (int i = 0; i < 3; ++i) slope += std::abs(b[i]);
  }
  if (slope <= 0.0) throw Error(ErrorKind::unbounded_direction, "idealised ray is unbounded");
  return s0 + (limit - f0) / slope;
}

}  // namespace detail

/// Outer radius of the chart on a fixed-P_Ttl plane along azimuth psi. The
/// feasible part of such a ray need not contain the origin; the result is
/// empty when no point of the ray is feasible.
inline std::optional<double> cylindrical_radius(const CapabilityChart& chart, double psi,
                                                double total) {
  const double v0 = chart.voltage();
  std::array<double, 3> a{}, b{};
  for (int i = 0; i < 3; ++i) {
    a[i] = total / 3.0 / v0;
    b[i] = (kClarke[0][i] * std::cos(psi) + kClarke[1][i] * std::sin(psi)) / v0;
  }
  const double k = kSqrt3_2 / v0;
  if (chart.design().is_idealised())
    return detail::idealised_top(a, b, k, chart.design().base_current());
  std::optional<double> best;
  for (const WireVector& cap : chart.capacity_vectors()) {
    const auto top = detail::interval_top(a, b, k, cap);
    if (top && (!best || *top > *best)) best = top;
  }
  return best;
}

/// Maximal radius of the chart along a direction. Planar and spherical rays
/// start at the origin and always return a value.
inline std::optional<double> boundary_radius(const CapabilityChart& chart, const DirectionSpec& d) {
  d.validate();
  if (d.mode == DirectionMode::cylindrical) return cylindrical_radius(chart, d.psi, *d.total_power);
  const PhasePowers unit = clarke_inverse(d.unit());
  return chart.ray_limit(current_magnitudes(unit, chart.voltage()));
}

inline std::optional<double> boundary_radius(const ConverterDesign& design, const DirectionSpec& d) {
  return boundary_radius(CapabilityChart(design), d);
}

// Ray limit along a Clarke-space unit vector; used by the quadratures.
inline double ray_radius(const CapabilityChart& chart, double u1, double u2, double u3) {
  return chart.ray_limit(current_magnitudes(clarke_inverse(ClarkePowers{{u1, u2, u3}}), chart.voltage()));
}

// ---------------------------------------------------------------------------
// Quadratures over star-shaped charts

/// CCA = 1/2 * integral of r(psi)^2 over the unbalance plane, midpoint rule.
inline ChartMetrics cca_boundary_integral(const CapabilityChart& chart, int n_angles = 720) {
  if (n_angles < 90) throw Error(ErrorKind::invalid_grid, "at least 90 angles are required");
  const double step = 2.0 * kPi / n_angles;
  std::vector<double> r2(n_angles);
  parallel_for(n_angles, [&](std::size_t k) {
    const double psi = (static_cast<double>(k) + 0.5) * step;
    const double r = ray_radius(chart, std::cos(psi), std::sin(psi), 0.0);
    r2[k] = r * r;
  });
  double sum = 0.0;
  for (double v : r2) sum += v;
  return {MetricKind::area, 0.5 * sum * step, MetricMethod::boundary_integral, {n_angles}};
}

inline ChartMetrics cca_boundary_integral(const ConverterDesign& design, int n_angles = 720) {
  return cca_boundary_integral(CapabilityChart(design), n_angles);
}

/// CCV = sum of r^3/3 sin(theta) dtheta dpsi over a midpoint sphere grid.
inline ChartMetrics ccv_spherical_integral(const CapabilityChart& chart, int n_theta = 180,
                                           int n_psi = 360) {
  if (n_theta < 90 || n_psi < 90)
    throw Error(ErrorKind::invalid_grid, "at least 90 samples per sphere angle are required");
  const double dtheta = kPi / n_theta;
  const double dpsi = 2.0 * kPi / n_psi;
  std::vector<double> cos_psi(n_psi), sin_psi(n_psi);
  for (int j = 0; j < n_psi; ++j) {
    cos_psi[j] = std::cos((j + 0.5) * dpsi);
    sin_psi[j] = std::sin((j + 0.5) * dpsi);
  }
  std::vector<double> rows(n_theta, 0.0);
  parallel_for(n_theta, [&](std::size_t i) {
    const double theta = (static_cast<double>(i) + 0.5) * dtheta;
    const double s = std::sin(theta), c = std::cos(theta);
    double acc = 0.0;
    for (int j = 0; j < n_psi; ++j) {
      const double r = ray_radius(chart, s * cos_psi[j], s * sin_psi[j], c);
      acc += r * r * r;
    }
    rows[i] = acc * s;
  });
  double sum = 0.0;
  for (double v : rows) sum += v;
  return {MetricKind::volume, sum / 3.0 * dtheta * dpsi, MetricMethod::boundary_integral,
          {n_theta, n_psi}};
}

inline ChartMetrics ccv_spherical_integral(const ConverterDesign& design, int n_theta = 180,
                                           int n_psi = 360) {
  return ccv_spherical_integral(CapabilityChart(design), n_theta, n_psi);
}

// ---------------------------------------------------------------------------
// Boundary traces

struct BoundarySample {
  double theta = 0.0;  // planar/cylindrical: azimuth; spherical: polar angle
  double psi = 0.0;    // spherical only
  double r = 0.0;
};

struct BoundaryTrace {
  DirectionMode mode = DirectionMode::planar;
  std::string design;
  std::optional<double> total_power;
  std::vector<BoundarySample> samples;
};

/// Closed planar boundary sampled at psi_k = 2 pi k / n.
inline BoundaryTrace planar_trace(const CapabilityChart& chart, int n_angles = 720) {
  if (n_angles < 90) throw Error(ErrorKind::invalid_grid, "at least 90 angles are required");
  BoundaryTrace t{DirectionMode::planar, chart.design().name(), std::nullopt,
                  std::vector<BoundarySample>(n_angles)};
  parallel_for(n_angles, [&](std::size_t k) {
    const double psi = 2.0 * kPi * static_cast<double>(k) / n_angles;
    t.samples[k] = {psi, 0.0, ray_radius(chart, std::cos(psi), std::sin(psi), 0.0)};
  });
  return t;
}

/// Polar sweep theta in [0, pi] at a fixed azimuth (a meridian of the chart).
inline BoundaryTrace spherical_trace(const CapabilityChart& chart, double psi, int n_theta = 361) {
  if (n_theta < 90) throw Error(ErrorKind::invalid_grid, "at least 90 angles are required");
  DirectionSpec probe = DirectionSpec::spherical(psi, 0.0);
  probe.validate();
  BoundaryTrace t{DirectionMode::spherical, chart.design().name(), std::nullopt,
                  std::vector<BoundarySample>(n_theta)};
  parallel_for(n_theta, [&](std::size_t k) {
    const double theta = kPi * static_cast<double>(k) / (n_theta - 1);
    const double s = std::sin(theta);
    t.samples[k] = {theta, psi,
                    ray_radius(chart, s * std::cos(psi), s * std::sin(psi), std::cos(theta))};
  });
  return t;
}

/// Full sphere of boundary radii at midpoint angles, ordered theta-major.
inline BoundaryTrace sphere_trace(const CapabilityChart& chart, int n_theta = 180, int n_psi = 360) {
  if (n_theta < 90 || n_psi < 90)
    throw Error(ErrorKind::invalid_grid, "at least 90 samples per sphere angle are required");
  BoundaryTrace t{DirectionMode::spherical, chart.design().name(), std::nullopt,
                  std::vector<BoundarySample>(static_cast<std::size_t>(n_theta) * n_psi)};
  parallel_for(n_theta, [&](std::size_t i) {
    const double theta = (static_cast<double>(i) + 0.5) * kPi / n_theta;
    const double s = std::sin(theta);
    for (int j = 0; j < n_psi; ++j) {
      const double psi = (j + 0.5) * 2.0 * kPi / n_psi;
      t.samples[i * n_psi + j] = {
          theta, psi, ray_radius(chart, s * std::cos(psi), s * std::sin(psi), std::cos(theta))};
    }
  });
  return t;
}

/// Outer boundary of a fixed-P_Ttl slice; rays with no feasible point are
/// left out.
inline BoundaryTrace cylindrical_trace(const CapabilityChart& chart, double total,
                                       int n_angles = 720) {
  if (n_angles < 90) throw Error(ErrorKind::invalid_grid, "at least 90 angles are required");
  std::vector<std::optional<double>> r(n_angles);
  parallel_for(n_angles, [&](std::size_t k) {
    r[k] = cylindrical_radius(chart, 2.0 * kPi * static_cast<double>(k) / n_angles, total);
  });
  BoundaryTrace t{DirectionMode::cylindrical, chart.design().name(), total, {}};
  for (int k = 0; k < n_angles; ++k)
    if (r[k]) t.samples.push_back({2.0 * kPi * k / n_angles, 0.0, *r[k]});
  return t;
}

// ---------------------------------------------------------------------------

/// Polar angles in [0, pi] at which the (psi, theta) ray carries zero current
/// on `wire` (1..3 phases, 4 neutral). The neutral vanishes only on the
/// balanced axis.
inline std::vector<double> zero_power_loci(double psi, int wire) {
  if (wire == 4) return {0.0, kPi};
  if (wire < 1 || wire > 4) throw Error(ErrorKind::invalid_input, "wire index must be 1..4");
  const int i = wire - 1;
  // P_i = r (A sin(theta) + C cos(theta)) with C = 1/sqrt(3) > 0.
  const double A = kClarke[0][i] * std::cos(psi) + kClarke[1][i] * std::sin(psi);
  const double C = kClarke[2][i];
  return {std::atan2(C, -A)};
}

/// Scale factor the first chart's converter needs to match the second:
/// sqrt of the area ratio or cube root of the volume ratio.
inline double size_ratio(const ChartMetrics& a, const ChartMetrics& b) {
  if (a.kind != b.kind) throw Error(ErrorKind::invalid_input, "metrics must be of the same kind");
  if (!(a.value > 0.0)) throw Error(ErrorKind::degenerate_chart, "reference chart has no size");
  if (b.value < 0.0) throw Error(ErrorKind::degenerate_chart, "negative chart size");
  const double q = b.value / a.value;
  return a.kind == MetricKind::area ? std::sqrt(q) : std::cbrt(q);
}

inline double size_ratio(double a, double b, MetricKind kind) {
  return size_ratio(ChartMetrics{kind, a, MetricMethod::grid, {}},
                    ChartMetrics{kind, b, MetricMethod::grid, {}});
}

}  // namespace ccchart
