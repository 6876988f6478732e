#pragma once

// Converter designs, leg-to-wire allocations and the linear maps between
// per-phase active powers, Clarke (alpha-beta-gamma) coordinates and the four
// wire currents of a four-wire converter.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccchart/error.hpp"

namespace ccchart {

inline constexpr int kWires = 4;
inline constexpr int kPhases = 3;

using WireVector = std::array<double, kWires>;

namespace detail {

inline bool all_finite(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace detail

/// Per-phase active powers in pu.
struct PhasePowers {
  std::array<double, kPhases> p{};

  double& operator[](std::size_t i) { return p[i]; }
  double operator[](std::size_t i) const { return p[i]; }
  double total() const { return p[0] + p[1] + p[2]; }
  bool operator==(const PhasePowers&) const = default;
};

/// Powers in orthonormal Clarke coordinates; the third entry carries the
/// zero-sequence (total) power.
struct ClarkePowers {
  std::array<double, kPhases> p{};

  double& operator[](std::size_t i) { return p[i]; }
  double operator[](std::size_t i) const { return p[i]; }
  /// Radius in the unbalance (alpha-beta) plane.
  double planar_radius() const { return std::hypot(p[0], p[1]); }
};

// Rows of the power-invariant Clarke matrix.
inline constexpr double kSqrt2_3 = 0.816496580927726032732;  // sqrt(2/3)
inline constexpr double kSqrt3_2 = 1.224744871391589049099;  // sqrt(3/2)
inline constexpr double kInvSqrt2 = 0.707106781186547524401;
inline constexpr double kInvSqrt3 = 0.577350269189625764509;
inline constexpr double kInvSqrt6 = 0.408248290463863016366;

inline constexpr std::array<std::array<double, 3>, 3> kClarke{{
    {kSqrt2_3, -kInvSqrt6, -kInvSqrt6},
    {0.0, kInvSqrt2, -kInvSqrt2},
    {kInvSqrt3, kInvSqrt3, kInvSqrt3},
}};

inline ClarkePowers clarke(const PhasePowers& P) {
  if (!detail::all_finite({P[0], P[1], P[2]}))
    throw Error(ErrorKind::invalid_input, "clarke: non-finite power");
  ClarkePowers out;
  for (int r = 0; r < 3; ++r)
    out[r] = kClarke[r][0] * P[0] + kClarke[r][1] * P[1] + kClarke[r][2] * P[2];
  return out;
}

inline PhasePowers clarke_inverse(const ClarkePowers& Ph) {
  if (!detail::all_finite({Ph[0], Ph[1], Ph[2]}))
    throw Error(ErrorKind::invalid_input, "clarke_inverse: non-finite power");
  PhasePowers out;
  for (int c = 0; c < 3; ++c)
    out[c] = kClarke[0][c] * Ph[0] + kClarke[1][c] * Ph[1] + kClarke[2][c] * Ph[2];
  return out;
}

/// Phase powers at a point (x, y) of the unbalance plane offset by a
/// balanced injection of `total` pu. The balanced part is added as total/3
/// per phase so that balanced points are exact.
inline PhasePowers plane_point(double x, double y, double total) {
  const double base = total / 3.0;
  PhasePowers out;
  for (int c = 0; c < 3; ++c) out[c] = base + kClarke[0][c] * x + kClarke[1][c] * y;
  return out;
}

// ---------------------------------------------------------------------------
// Wire currents

inline const std::complex<double> kRotation{-0.5, 0.866025403784438646764};  // e^{j 2pi/3}

struct CurrentSet {
  std::array<std::complex<double>, kWires> phasors{};

  double magnitude(int wire) const { return std::abs(phasors[wire]); }
  double neutral_mag() const { return std::abs(phasors[3]); }
};

inline void require_voltage(double v0) {
  if (!(std::isfinite(v0) && v0 > 0.0))
    throw Error(ErrorKind::invalid_input, "voltage magnitude must be positive and finite");
}

inline CurrentSet powers_to_currents(const PhasePowers& P, double v0 = 1.0) {
  if (!detail::all_finite({P[0], P[1], P[2]}))
    throw Error(ErrorKind::invalid_input, "powers_to_currents: non-finite power");
  require_voltage(v0);
  const std::array<std::complex<double>, 3> rot{
      std::complex<double>{1.0, 0.0}, kRotation, std::complex<double>{-0.5, -kRotation.imag()}};
  CurrentSet out;
  std::complex<double> sum{};
  for (int i = 0; i < 3; ++i) {
    out.phasors[i] = rot[i] * (P[i] / v0);
    sum += out.phasors[i];
  }
  out.phasors[3] = -sum;
  return out;
}

/// Magnitudes |I| of the four wire currents. The neutral magnitude uses
/// |P1 + a P2 + a^2 P3|^2 = ((P1-P2)^2 + (P2-P3)^2 + (P3-P1)^2) / 2, which has
/// no cancellation near balanced points.
inline WireVector current_magnitudes(const PhasePowers& P, double v0 = 1.0) {
  const double d12 = P[0] - P[1], d23 = P[1] - P[2], d31 = P[2] - P[0];
  const double q = 0.5 * (d12 * d12 + d23 * d23 + d31 * d31);
  return {std::abs(P[0]) / v0, std::abs(P[1]) / v0, std::abs(P[2]) / v0, std::sqrt(q) / v0};
}

// ---------------------------------------------------------------------------
// Directions in Clarke space

enum class DirectionMode { planar, spherical, cylindrical };

inline const char* to_string(DirectionMode m) {
  switch (m) {
    case DirectionMode::planar: return "planar";
    case DirectionMode::spherical: return "spherical";
    case DirectionMode::cylindrical: return "cylindrical";
  }
  return "?";
}

struct DirectionSpec {
  DirectionMode mode = DirectionMode::planar;
  double psi = 0.0;                    // azimuth, rad
  std::optional<double> theta;         // polar angle, spherical only
  std::optional<double> total_power;   // fixed P_Ttl, cylindrical only

  static DirectionSpec planar(double psi) { return {DirectionMode::planar, psi, {}, {}}; }
  static DirectionSpec spherical(double psi, double theta) {
    return {DirectionMode::spherical, psi, theta, {}};
  }
  static DirectionSpec cylindrical(double psi, double total) {
    return {DirectionMode::cylindrical, psi, {}, total};
  }

  void validate() const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (!(std::isfinite(psi) && psi >= 0.0 && psi < two_pi))
      throw Error(ErrorKind::invalid_input, "azimuth must lie in [0, 2pi)");
    switch (mode) {
      case DirectionMode::planar:
        if (theta || total_power)
          throw Error(ErrorKind::invalid_input, "planar direction takes only an azimuth");
        break;
      case DirectionMode::spherical:
        if (!theta || total_power)
          throw Error(ErrorKind::invalid_input, "spherical direction needs a polar angle only");
        if (!(*theta >= 0.0 && *theta <= std::numbers::pi))
          throw Error(ErrorKind::invalid_input, "polar angle must lie in [0, pi]");
        break;
      case DirectionMode::cylindrical:
        if (theta || !total_power)
          throw Error(ErrorKind::invalid_input, "cylindrical direction needs a total power only");
        if (!std::isfinite(*total_power))
          throw Error(ErrorKind::invalid_input, "total power must be finite");
        break;
    }
  }

  /// Unit vector of the ray in Clarke coordinates (planar/spherical modes).
  ClarkePowers unit() const {
    const double polar = mode == DirectionMode::spherical ? *theta : std::numbers::pi / 2;
    const double s = mode == DirectionMode::spherical ? std::sin(polar) : 1.0;
    const double c = mode == DirectionMode::spherical ? std::cos(polar) : 0.0;
    return ClarkePowers{{s * std::cos(psi), s * std::sin(psi), c}};
  }
};

inline PhasePowers direction_to_powers(const DirectionSpec& d, double r) {
  d.validate();
  if (!(r >= 0.0) || !std::isfinite(r))
    throw Error(ErrorKind::invalid_input, "radius must be non-negative and finite");
  if (d.mode == DirectionMode::cylindrical)
    return plane_point(r * std::cos(d.psi), r * std::sin(d.psi), *d.total_power);
  const ClarkePowers u = d.unit();
  return clarke_inverse(ClarkePowers{{r * u[0], r * u[1], r * u[2]}});
}

// ---------------------------------------------------------------------------
// Designs and allocations

enum class DesignKind { reconfigurable, fixed, idealised };

/// Assignment of every leg to exactly one wire (0-based internally); this is
/// the 4 x m binary matrix with unit column sums stored column-wise.
class Allocation {
 public:
  Allocation() = default;

  explicit Allocation(std::vector<int> wire_of_leg) : wire_of_leg_(std::move(wire_of_leg)) {
    for (int w : wire_of_leg_)
      if (w < 0 || w >= kWires)
        throw Error(ErrorKind::invalid_input, "allocation wire index out of range");
  }

  static Allocation from_matrix(const std::vector<std::vector<int>>& B) {
    if (B.size() != kWires) throw Error(ErrorKind::invalid_input, "allocation matrix needs 4 rows");
    const std::size_t m = B[0].size();
    std::vector<int> wires(m, -1);
    for (int w = 0; w < kWires; ++w) {
      if (B[w].size() != m) throw Error(ErrorKind::invalid_input, "ragged allocation matrix");
      for (std::size_t j = 0; j < m; ++j) {
        if (B[w][j] != 0 && B[w][j] != 1)
          throw Error(ErrorKind::invalid_input, "allocation matrix must be binary");
        if (B[w][j] == 1) {
          if (wires[j] != -1)
            throw Error(ErrorKind::invalid_input, "allocation column sums must equal 1");
          wires[j] = w;
        }
      }
    }
    for (int w : wires)
      if (w == -1) throw Error(ErrorKind::invalid_input, "allocation column sums must equal 1");
    return Allocation(std::move(wires));
  }

  std::size_t legs() const { return wire_of_leg_.size(); }
  int wire_of(std::size_t leg) const { return wire_of_leg_[leg]; }
  const std::vector<int>& wires() const { return wire_of_leg_; }
  bool at(int wire, std::size_t leg) const { return wire_of_leg_[leg] == wire; }

  std::vector<std::vector<int>> matrix() const {
    std::vector<std::vector<int>> B(kWires, std::vector<int>(legs(), 0));
    for (std::size_t j = 0; j < legs(); ++j) B[wire_of_leg_[j]][j] = 1;
    return B;
  }

  bool operator==(const Allocation&) const = default;

 private:
  std::vector<int> wire_of_leg_;
};

class ConverterDesign {
 public:
  static ConverterDesign reconfigurable(std::string name, std::vector<double> legs,
                                        double base_current = 1.0) {
    ConverterDesign d(std::move(name), DesignKind::reconfigurable, std::move(legs), {},
                      base_current);
    d.validate();
    return d;
  }

  /// `wiring` holds the 0-based wire index of every leg.
  static ConverterDesign fixed(std::string name, std::vector<double> legs, std::vector<int> wiring,
                               double base_current = 1.0) {
    if (wiring.size() != legs.size())
      throw Error(ErrorKind::invalid_input, "wiring must name a wire for every leg");
    ConverterDesign d(std::move(name), DesignKind::fixed, std::move(legs),
                      Allocation(std::move(wiring)), base_current);
    d.validate();
    return d;
  }

  static ConverterDesign idealised(std::string name = "omega", double base_current = 1.0) {
    ConverterDesign d(std::move(name), DesignKind::idealised, {}, {}, base_current);
    d.validate();
    return d;
  }

  const std::string& name() const { return name_; }
  DesignKind kind() const { return kind_; }
  bool is_reconfigurable() const { return kind_ != DesignKind::fixed; }
  bool is_idealised() const { return kind_ == DesignKind::idealised; }
  const std::vector<double>& legs() const { return legs_; }
  std::size_t leg_count() const { return legs_.size(); }
  const std::optional<Allocation>& wiring() const { return wiring_; }
  double base_current() const { return base_current_; }

  /// True for reconfigurable designs whose legs all share one capacity.
  bool is_uniform() const {
    if (kind_ != DesignKind::reconfigurable) return false;
    return std::all_of(legs_.begin(), legs_.end(), [&](double a) { return a == legs_[0]; });
  }

  ConverterDesign with_base_current(double base) const {
    ConverterDesign d = *this;
    d.base_current_ = base;
    d.validate();
    return d;
  }

  ConverterDesign with_name(std::string name) const {
    ConverterDesign d = *this;
    d.name_ = std::move(name);
    return d;
  }

  bool operator==(const ConverterDesign&) const = default;

 private:
  ConverterDesign(std::string name, DesignKind kind, std::vector<double> legs,
                  std::optional<Allocation> wiring, double base)
      : name_(std::move(name)),
        kind_(kind),
        legs_(std::move(legs)),
        wiring_(std::move(wiring)),
        base_current_(base) {}

  void validate() const {
    if (!(std::isfinite(base_current_) && base_current_ > 0.0))
      throw Error(ErrorKind::invalid_input, "base current must be positive");
    if (kind_ == DesignKind::idealised) {
      if (!legs_.empty()) throw Error(ErrorKind::invalid_input, "idealised design has no legs");
      return;
    }
    if (legs_.empty()) throw Error(ErrorKind::invalid_input, "design needs at least one leg");
    double sum = 0.0;
    for (double a : legs_) {
      if (!(std::isfinite(a) && a > 0.0))
        throw Error(ErrorKind::invalid_input, "leg capacities must be positive");
      sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw Error(ErrorKind::invalid_input, "leg capacities must sum to 1");
    if ((kind_ == DesignKind::fixed) != wiring_.has_value())
      throw Error(ErrorKind::invalid_input, "wiring is required exactly for fixed designs");
  }

  std::string name_;
  DesignKind kind_ = DesignKind::reconfigurable;
  std::vector<double> legs_;
  std::optional<Allocation> wiring_;
  double base_current_ = 1.0;
};

inline WireVector wire_capacities(const ConverterDesign& design, const Allocation& allocation) {
  if (design.is_idealised())
    throw Error(ErrorKind::invalid_input, "idealised design has no discrete allocation");
  if (allocation.legs() != design.leg_count())
    throw Error(ErrorKind::invalid_input, "allocation does not match the leg count");
  // Equal legs on one wire are summed as count * capacity so that a wire
  // holding k legs of a uniform design carries exactly k * (1/m).
  std::array<std::vector<double>, kWires> per_wire;
  for (std::size_t j = 0; j < design.leg_count(); ++j)
    per_wire[allocation.wire_of(j)].push_back(design.legs()[j]);
  WireVector cap{};
  for (int w = 0; w < kWires; ++w) {
    auto& v = per_wire[w];
    std::sort(v.begin(), v.end());
    for (std::size_t i = 0; i < v.size();) {
      std::size_t j = i;
      while (j < v.size() && v[j] == v[i]) ++j;
      cap[w] += static_cast<double>(j - i) * v[i];
      i = j;
    }
    cap[w] *= design.base_current();
  }
  return cap;
}

/// Capacities of a fixed design under its own wiring.
inline WireVector wire_capacities(const ConverterDesign& design) {
  if (!design.wiring())
    throw Error(ErrorKind::invalid_input, "design has no fixed wiring");
  return wire_capacities(design, *design.wiring());
}

}  // namespace ccchart
