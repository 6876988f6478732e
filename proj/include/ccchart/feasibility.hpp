#pragma once

// Indicator functions for membership of a power injection in a design's
// capability chart.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ccchart/converter_model.hpp"
#include "ccchart/error.hpp"

namespace ccchart {

struct FeasibilityResult {
  bool feasible = false;
  std::optional<Allocation> witness;
  std::optional<int> binding_wire;
};

inline constexpr std::size_t kMaxEnumeratedLegs = 12;

namespace detail {

// Wire with the largest utilisation |I|/cap among wires carrying current.
inline std::optional<int> tightest_wire(const WireVector& currents, const WireVector& cap) {
  std::optional<int> best;
  double best_util = -1.0;
  for (int w = 0; w < kWires; ++w) {
    if (currents[w] == 0.0) continue;
    const double util = cap[w] > 0.0 ? currents[w] / cap[w] : INFINITY;
    if (util > best_util) {
      best_util = util;
      best = w;
    }
  }
  return best;
}

inline bool fits(const WireVector& currents, const WireVector& cap) {
  for (int w = 0; w < kWires; ++w)
    if (!(currents[w] <= cap[w])) return false;
  return true;
}

// Least k >= 0 with x <= k * unit, evaluated in the same floating-point
// form used for wire capacities.
inline long least_legs(double x, double unit) {
  if (x <= 0.0) return 0;
  long k = static_cast<long>(std::ceil(x / unit));
  while (k > 0 && x <= static_cast<double>(k - 1) * unit) --k;
  while (!(x <= static_cast<double>(k) * unit)) ++k;
  return k;
}

// Least k >= 1 with x < k * unit.
inline long least_legs_strict(double x, double unit) {
  long k = std::max(1L, static_cast<long>(std::floor(x / unit)) + 1);
  while (k > 1 && x < static_cast<double>(k - 1) * unit) --k;
  while (!(x < static_cast<double>(k) * unit)) ++k;
  return k;
}

inline bool fits_strictly(const WireVector& currents, const WireVector& cap) {
  for (int w = 0; w < kWires; ++w)
    if (!(currents[w] < cap[w])) return false;
  return true;
}

}  // namespace detail

/// Every distinct wire-capacity vector reachable by a reconfigurable design,
/// with one allocation realising each. Legs of equal capacity are
/// interchangeable, so each group is distributed over the wires as a
/// multiset instead of trying all 4^m switch states.
class AllocationTable {
 public:
  struct Entry {
    WireVector cap;
    Allocation allocation;
  };

  explicit AllocationTable(const ConverterDesign& design) {
    if (design.is_idealised())
      throw Error(ErrorKind::wrong_indicator, "idealised design has no allocation table");
    if (design.leg_count() > kMaxEnumeratedLegs)
      throw Error(ErrorKind::capacity_guard,
                  "enumeration is limited to " + std::to_string(kMaxEnumeratedLegs) +
                      " legs; use the uniform indicator for U(m) designs");

    // Group leg indices by capacity.
    std::map<double, std::vector<std::size_t>> groups;
    for (std::size_t j = 0; j < design.leg_count(); ++j) groups[design.legs()[j]].push_back(j);
    std::vector<std::vector<std::size_t>> group_legs;
    for (auto& [_, idx] : groups) group_legs.push_back(idx);

    std::set<WireVector> seen;
    std::vector<int> wires(design.leg_count(), 0);
    enumerate(design, group_legs, 0, wires, seen);
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  void enumerate(const ConverterDesign& design, const std::vector<std::vector<std::size_t>>& groups,
                 std::size_t g, std::vector<int>& wires, std::set<WireVector>& seen) {
    if (g == groups.size()) {
      Allocation alloc(wires);
      WireVector cap = wire_capacities(design, alloc);
      if (seen.insert(cap).second) entries_.push_back({cap, std::move(alloc)});
      return;
    }
    const auto& legs = groups[g];
    const int n = static_cast<int>(legs.size());
    // counts on wires 0..2; wire 3 takes the rest
    for (int c0 = 0; c0 <= n; ++c0)
      for (int c1 = 0; c0 + c1 <= n; ++c1)
        for (int c2 = 0; c0 + c1 + c2 <= n; ++c2) {
          const int counts[4] = {c0, c1, c2, n - c0 - c1 - c2};
          std::size_t k = 0;
          for (int w = 0; w < kWires; ++w)
            for (int c = 0; c < counts[w]; ++c) wires[legs[k++]] = w;
          enumerate(design, groups, g + 1, wires, seen);
        }
  }

  std::vector<Entry> entries_;
};

inline void require_finite(const PhasePowers& P) {
  if (!detail::all_finite({P[0], P[1], P[2]}))
    throw Error(ErrorKind::invalid_input, "non-finite power");
}

inline FeasibilityResult indicator_fixed(const ConverterDesign& design, const PhasePowers& P,
                                         double v0 = 1.0) {
  if (design.kind() != DesignKind::fixed)
    throw Error(ErrorKind::wrong_indicator, "indicator_fixed needs a fixed-wiring design");
  require_finite(P);
  require_voltage(v0);
  const WireVector cap = wire_capacities(design);
  const WireVector cur = current_magnitudes(P, v0);
  return {detail::fits(cur, cap), std::nullopt, detail::tightest_wire(cur, cap)};
}

inline FeasibilityResult indicator_enumerated(const AllocationTable& table, const PhasePowers& P,
                                              double v0 = 1.0) {
  require_finite(P);
  require_voltage(v0);
  const WireVector cur = current_magnitudes(P, v0);
  for (const auto& e : table.entries())
    if (detail::fits(cur, e.cap))
      return {true, e.allocation, detail::tightest_wire(cur, e.cap)};
  return {};
}

inline FeasibilityResult indicator_enumerated(const ConverterDesign& design, const PhasePowers& P,
                                              double v0 = 1.0) {
  if (design.kind() != DesignKind::reconfigurable)
    throw Error(ErrorKind::wrong_indicator, "indicator_enumerated needs a reconfigurable design");
  return indicator_enumerated(AllocationTable(design), P, v0);
}

/// Sorted-matching test for four-leg designs: with every wire carrying
/// current each wire needs exactly one leg, and the best matching pairs the
/// k-th smallest current with the k-th smallest leg.
inline bool indicator_four_leg(const ConverterDesign& design, const PhasePowers& P,
                               double v0 = 1.0) {
  if (design.kind() != DesignKind::reconfigurable || design.leg_count() != 4)
    throw Error(ErrorKind::wrong_indicator, "indicator_four_leg needs a reconfigurable 4-leg design");
  require_finite(P);
  require_voltage(v0);
  WireVector cur = current_magnitudes(P, v0);
  WireVector legs{};
  for (int i = 0; i < 4; ++i) legs[i] = design.legs()[i] * design.base_current();
  std::sort(cur.begin(), cur.end());
  std::sort(legs.begin(), legs.end());
  return detail::fits(cur, legs);
}

/// Feasibility for U(m): wire i needs ceil(m |I_i|) legs of size 1/m.
inline bool indicator_uniform(std::size_t m, const PhasePowers& P, double v0 = 1.0) {
  if (m == 0) throw Error(ErrorKind::invalid_input, "leg count must be positive");
  require_finite(P);
  require_voltage(v0);
  const WireVector cur = current_magnitudes(P, v0);
  const double unit = 1.0 / static_cast<double>(m);
  long needed = 0;
  for (double x : cur) needed += detail::least_legs(x, unit);
  return needed <= static_cast<long>(m);
}

/// Idealised converter: total current over the four wires within rating.
inline bool indicator_idealised(const PhasePowers& P, double v0 = 1.0) {
  require_finite(P);
  require_voltage(v0);
  const WireVector cur = current_magnitudes(P, v0);
  return cur[0] + cur[1] + cur[2] + cur[3] <= 1.0;
}

// ---------------------------------------------------------------------------

/// A design prepared for repeated membership and ray queries. Reconfigurable
/// designs are evaluated through the cheapest exact path: the ceiling rule for
/// uniform designs, sorted matching for four legs when no wire current
/// vanishes, and the allocation table otherwise.
class CapabilityChart {
 public:
  explicit CapabilityChart(ConverterDesign design, double v0 = 1.0)
      : design_(std::move(design)), v0_(v0) {
    require_voltage(v0_);
    switch (design_.kind()) {
      case DesignKind::idealised: break;
      case DesignKind::fixed: fixed_cap_ = wire_capacities(design_); break;
      case DesignKind::reconfigurable:
        if (design_.leg_count() == 4) {
          for (int i = 0; i < 4; ++i) sorted_legs_[i] = design_.legs()[i] * design_.base_current();
          std::sort(sorted_legs_.begin(), sorted_legs_.end());
        }
        if (!design_.is_uniform() || design_.leg_count() <= kMaxEnumeratedLegs) {
          table_.emplace(design_);
          for (const auto& e : table_->entries())
            if (e.cap[0] > 0 && e.cap[1] > 0 && e.cap[2] > 0 && e.cap[3] > 0)
              full_caps_.push_back(e.cap);
        }
        break;
    }
  }

  const ConverterDesign& design() const { return design_; }
  double voltage() const { return v0_; }
  const std::optional<AllocationTable>& table() const { return table_; }

  bool contains(const PhasePowers& P) const { return contains_currents(current_magnitudes(P, v0_)); }

  /// Membership using only the exhaustive allocation table (or the defining
  /// rule for fixed and idealised designs).
  bool contains_exact(const PhasePowers& P) const {
    const WireVector cur = current_magnitudes(P, v0_);
    switch (design_.kind()) {
      case DesignKind::idealised: return sum(cur) <= design_.base_current();
      case DesignKind::fixed: return detail::fits(cur, fixed_cap_);
      case DesignKind::reconfigurable:
        if (!table_) return contains_currents(cur);
        for (const auto& e : table_->entries())
          if (detail::fits(cur, e.cap)) return true;
        return false;
    }
    return false;
  }

  bool contains_currents(const WireVector& cur) const {
    const double base = design_.base_current();
    switch (design_.kind()) {
      case DesignKind::idealised: return sum(cur) <= base;
      case DesignKind::fixed: return detail::fits(cur, fixed_cap_);
      case DesignKind::reconfigurable: break;
    }
    if (design_.is_uniform()) {
      const double unit = design_.legs()[0] * base;
      long needed = 0;
      for (double x : cur) needed += detail::least_legs(x, unit);
      return needed <= static_cast<long>(design_.leg_count());
    }
    if (design_.leg_count() == 4 && cur[0] > 0 && cur[1] > 0 && cur[2] > 0 && cur[3] > 0) {
      WireVector s = cur;
      std::sort(s.begin(), s.end());
      return detail::fits(s, sorted_legs_);
    }
    if (sum(cur) > base * (1.0 + 1e-12)) return false;  // outside the idealised chart
    for (const auto& e : table_->entries())
      if (detail::fits(cur, e.cap)) return true;
    return false;
  }

  /// Membership in the closure of the chart's interior: only allocations
  /// giving every wire positive capacity count, which drops the
  /// lower-dimensional pieces reachable when some wire current is exactly
  /// zero. Grid measures use this so that CCA/CCV ignore measure-zero sets.
  bool contains_regular(const PhasePowers& P) const {
    const WireVector cur = current_magnitudes(P, v0_);
    const double base = design_.base_current();
    switch (design_.kind()) {
      case DesignKind::idealised: return sum(cur) <= base;
      case DesignKind::fixed:
        return fixed_cap_[0] > 0 && fixed_cap_[1] > 0 && fixed_cap_[2] > 0 && fixed_cap_[3] > 0 &&
               detail::fits(cur, fixed_cap_);
      case DesignKind::reconfigurable: break;
    }
    if (design_.is_uniform()) {
      const double unit = design_.legs()[0] * base;
      long needed = 0;
      for (double x : cur) needed += std::max(1L, detail::least_legs(x, unit));
      return needed <= static_cast<long>(design_.leg_count());
    }
    if (design_.leg_count() == 4) {
      WireVector s = cur;
      std::sort(s.begin(), s.end());
      return detail::fits(s, sorted_legs_);
    }
    if (sum(cur) > base * (1.0 + 1e-12)) return false;  // outside the idealised chart
    for (const auto& cap : full_caps_)
      if (detail::fits(cur, cap)) return true;
    return false;
  }

  /// Membership in the open interior: every wire strictly below its
  /// capacity under some allocation.
  bool contains_interior(const PhasePowers& P) const {
    const WireVector cur = current_magnitudes(P, v0_);
    const double base = design_.base_current();
    switch (design_.kind()) {
      case DesignKind::idealised: return sum(cur) < base;
      case DesignKind::fixed: return detail::fits_strictly(cur, fixed_cap_);
      case DesignKind::reconfigurable: break;
    }
    if (design_.is_uniform()) {
      const double unit = design_.legs()[0] * base;
      long needed = 0;
      for (double x : cur) needed += detail::least_legs_strict(x, unit);
      return needed <= static_cast<long>(design_.leg_count());
    }
    if (design_.leg_count() == 4) {
      WireVector s = cur;
      std::sort(s.begin(), s.end());
      return detail::fits_strictly(s, sorted_legs_);
    }
    if (sum(cur) >= base) return false;
    for (const auto& cap : full_caps_)
      if (detail::fits_strictly(cur, cap)) return true;
    return false;
  }

  /// Grid weight of a node in half units: 2 inside, 1 on the boundary, 0
  /// outside.
  int grid_weight(const PhasePowers& P) const {
    if (!contains_regular(P)) return 0;
    return contains_interior(P) ? 2 : 1;
  }

  /// Capacity vectors to test on a ray or slice; uniform designs beyond the
  /// enumeration guard are generated from leg counts.
  std::vector<WireVector> capacity_vectors() const {
    std::vector<WireVector> out;
    if (design_.kind() == DesignKind::fixed) return {fixed_cap_};
    if (table_) {
      for (const auto& e : table_->entries()) out.push_back(e.cap);
      return out;
    }
    const int m = static_cast<int>(design_.leg_count());
    const double unit = design_.legs()[0] * design_.base_current();
    for (int a = 0; a <= m; ++a)
      for (int b = 0; a + b <= m; ++b)
        for (int c = 0; a + b + c <= m; ++c)
          out.push_back({a * unit, b * unit, c * unit, (m - a - b - c) * unit});
    return out;
  }

  /// Largest t with t * unit_currents feasible, for currents that scale
  /// linearly along a ray through the origin.
  double ray_limit(const WireVector& c) const {
    const double base = design_.base_current();
    switch (design_.kind()) {
      case DesignKind::idealised: {
        const double s = sum(c);
        if (s <= 0.0) throw Error(ErrorKind::unbounded_direction, "ray carries no current");
        return base / s;
      }
      case DesignKind::fixed: return limit_for(c, fixed_cap_);
      case DesignKind::reconfigurable: break;
    }
    if (c[0] <= 0 && c[1] <= 0 && c[2] <= 0 && c[3] <= 0)
      throw Error(ErrorKind::unbounded_direction, "ray carries no current");
    if (design_.is_uniform()) return uniform_limit(c);
    if (design_.leg_count() == 4 && c[0] > 0 && c[1] > 0 && c[2] > 0 && c[3] > 0) {
      WireVector s = c;
      std::sort(s.begin(), s.end());
      double r = INFINITY;
      for (int i = 0; i < 4; ++i) r = std::min(r, sorted_legs_[i] / s[i]);
      return r;
    }
    double best = 0.0;
    for (const auto& e : table_->entries()) best = std::max(best, limit_for(c, e.cap));
    return best;
  }

 private:
  static double sum(const WireVector& v) { return v[0] + v[1] + v[2] + v[3]; }

  static double limit_for(const WireVector& c, const WireVector& cap) {
    double r = INFINITY;
    for (int w = 0; w < kWires; ++w)
      if (c[w] > 0.0) r = std::min(r, cap[w] / c[w]);
    if (std::isinf(r)) throw Error(ErrorKind::unbounded_direction, "ray carries no current");
    return r;
  }

  // Greedy water filling: every loaded wire gets one leg, then each further
  // leg goes to the wire with the smallest k_i / c_i.
  double uniform_limit(const WireVector& c) const {
    const long m = static_cast<long>(design_.leg_count());
    const double unit = design_.legs()[0] * design_.base_current();
    std::array<long, kWires> k{};
    long used = 0;
    for (int w = 0; w < kWires; ++w)
      if (c[w] > 0.0) {
        k[w] = 1;
        ++used;
      }
    if (used > m) return 0.0;
    auto ratio = [&](int w) { return static_cast<double>(k[w]) * unit / c[w]; };
    for (; used < m; ++used) {
      int worst = -1;
      for (int w = 0; w < kWires; ++w)
        if (c[w] > 0.0 && (worst < 0 || ratio(w) < ratio(worst))) worst = w;
      ++k[worst];
    }
    double r = INFINITY;
    for (int w = 0; w < kWires; ++w)
      if (c[w] > 0.0) r = std::min(r, ratio(w));
    return r;
  }

  ConverterDesign design_;
  double v0_ = 1.0;
  WireVector fixed_cap_{};
  WireVector sorted_legs_{};
  std::optional<AllocationTable> table_;
  std::vector<WireVector> full_caps_;
};

}  // namespace ccchart
