#pragma once

// Benchmark designs and the leg-capacity simplex search.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ccchart/chart_geometry.hpp"
#include "ccchart/converter_model.hpp"
#include "ccchart/error.hpp"
#include "ccchart/parallel.hpp"

namespace ccchart {

// ---------------------------------------------------------------------------
// Catalog

namespace catalog {

inline ConverterDesign s4_opt() {
  return ConverterDesign::reconfigurable("s4opt", {0.12, 0.22, 0.26, 0.4});
}

inline ConverterDesign i4_opt() {
  return ConverterDesign::reconfigurable("i4opt", {0.13, 0.21, 0.3, 0.36});
}

inline ConverterDesign uniform(std::size_t m) {
  if (m == 0) throw Error(ErrorKind::invalid_input, "uniform design needs at least one leg");
  return ConverterDesign::reconfigurable("u" + std::to_string(m),
                                         std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

/// m equal legs hard-wired to the first m wires.
inline ConverterDesign uniform_fixed(std::size_t m) {
  if (m != 3 && m != 4) throw Error(ErrorKind::invalid_input, "fixed presets exist for 3 or 4 legs");
  std::vector<int> wiring(m);
  for (std::size_t j = 0; j < m; ++j) wiring[j] = static_cast<int>(j);
  return ConverterDesign::fixed("ufix" + std::to_string(m),
                                std::vector<double>(m, 1.0 / static_cast<double>(m)), wiring);
}

inline ConverterDesign omega() { return ConverterDesign::idealised("omega"); }

/// Looks up a preset: s4opt, i4opt, ufix3, ufix4, omega, or u<m>.
inline std::optional<ConverterDesign> find(const std::string& name) {
  if (name == "s4opt") return s4_opt();
  if (name == "i4opt") return i4_opt();
  if (name == "ufix3") return uniform_fixed(3);
  if (name == "ufix4") return uniform_fixed(4);
  if (name == "omega") return omega();
  if (name.size() > 1 && name.size() <= 5 && name[0] == 'u' &&
      std::all_of(name.begin() + 1, name.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    const int m = std::stoi(name.substr(1));
    if (m >= 1 && m <= 1000) return uniform(static_cast<std::size_t>(m));
  }
  return std::nullopt;
}

/// Fixed preset names; uniform designs are looked up as u<m>.
inline std::vector<std::string> names() {
  return {"s4opt", "i4opt", "ufix3", "ufix4", "omega"};
}

}  // namespace catalog

// ---------------------------------------------------------------------------
// Simplex enumeration

/// Number of grid divisions k with step = 1/k.
inline int simplex_divisions(double step) {
  if (!(std::isfinite(step) && step > 0.0 && step <= 1.0))
    throw Error(ErrorKind::invalid_step, "step must lie in (0, 1]");
  const double k = std::round(1.0 / step);
  if (std::abs(k * step - 1.0) > 1e-9)
    throw Error(ErrorKind::invalid_step, "step must divide 1 exactly");
  return static_cast<int>(k);
}

/// Calls fn on every non-decreasing alpha of m positive multiples of step
/// summing to 1, in lexicographic order.
inline void for_each_simplex_point(std::size_t m, double step,
                                   const std::function<void(const std::vector<double>&)>& fn) {
  const int k = simplex_divisions(step);
  if (m == 0) throw Error(ErrorKind::invalid_input, "leg count must be positive");
  std::vector<int> parts(m);
  std::vector<double> alpha(m);
  std::function<void(std::size_t, int, int)> rec = [&](std::size_t i, int min_part, int left) {
    const int slots = static_cast<int>(m - i);
    if (slots == 1) {
      if (left < min_part) return;
      parts[i] = left;
      for (std::size_t j = 0; j < m; ++j) alpha[j] = static_cast<double>(parts[j]) / k;
      fn(alpha);
      return;
    }
    for (int p = min_part; p * slots <= left; ++p) {
      parts[i] = p;
      rec(i + 1, p, left - p);
    }
  };
  rec(0, 1, k);
}

inline std::vector<std::vector<double>> enumerate_simplex(std::size_t m, double step) {
  std::vector<std::vector<double>> out;
  for_each_simplex_point(m, step, [&](const std::vector<double>& a) { out.push_back(a); });
  return out;
}

// ---------------------------------------------------------------------------
// Search

enum class Objective { cca, ccv };

inline const char* to_string(Objective o) { return o == Objective::cca ? "cca" : "ccv"; }

struct SizingProblem {
  std::size_t legs = 4;
  Objective objective = Objective::cca;
  double step = 0.02;
  int angles = 720;  // CCA quadrature
  int sphere_theta = 180;  // CCV quadrature
  int sphere_psi = 360;
  int validation_grid = 801;  // planar; volumes use validation_grid_3d
  int validation_grid_3d = 201;
  std::size_t top_k = 10;

  void validate() const {
    if (legs == 0) throw Error(ErrorKind::invalid_input, "leg count must be positive");
    simplex_divisions(step);
  }
};

struct SizingCandidate {
  std::vector<double> alpha;
  double metric = 0.0;
};

struct SizingResult {
  std::vector<double> alpha;
  double metric = 0.0;
  double validation_metric = 0.0;  // grid re-evaluation of the winner
  std::size_t evaluated = 0;
  std::vector<SizingCandidate> top;        // best first
  std::vector<SizingCandidate> near_ties;  // within 0.5% of the optimum
};

inline double sizing_objective(const SizingProblem& problem, const ConverterDesign& design) {
  const CapabilityChart chart(design);
  return problem.objective == Objective::cca
             ? cca_boundary_integral(chart, problem.angles).value
             : ccv_spherical_integral(chart, problem.sphere_theta, problem.sphere_psi).value;
}

/// Exhaustive search of the simplex grid. Ties keep the lexicographically
/// smallest sorted alpha.
inline SizingResult optimize_sizing(const SizingProblem& problem) {
  problem.validate();
  const auto candidates = enumerate_simplex(problem.legs, problem.step);
  std::vector<double> metric(candidates.size(), 0.0);
  parallel_for(candidates.size(), [&](std::size_t i) {
    try {
      metric[i] = sizing_objective(problem, ConverterDesign::reconfigurable("candidate", candidates[i]));
    } catch (const Error& e) {
      std::string a;
      for (double x : candidates[i]) a += (a.empty() ? "" : ",") + std::to_string(x);
      throw Error(e.kind(), std::string(e.what()) + " (alpha = " + a + ")");
    }
  });

  SizingResult out;
  out.evaluated = candidates.size();
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (metric[i] > metric[best]) best = i;
  out.alpha = candidates[best];
  out.metric = metric[best];

  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return metric[a] > metric[b]; });
  for (std::size_t i = 0; i < order.size() && i < problem.top_k; ++i)
    out.top.push_back({candidates[order[i]], metric[order[i]]});
  for (std::size_t i : order) {
    if (i == best) continue;
    if (metric[i] < out.metric * (1.0 - 0.005)) break;
    out.near_ties.push_back({candidates[i], metric[i]});
  }

  const CapabilityChart winner(ConverterDesign::reconfigurable("optimum", out.alpha));
  out.validation_metric =
      problem.objective == Objective::cca
          ? cca_grid(winner, GridSpec{problem.validation_grid, 1.0}).value
          : ccv_grid(winner, GridSpec{problem.validation_grid_3d, 1.0}).value;
  return out;
}

}  // namespace ccchart
