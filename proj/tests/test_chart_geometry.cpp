#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ccchart/chart_geometry.hpp"
#include "ccchart/sizing.hpp"

using namespace ccchart;

namespace {

constexpr double kEllipse = kPi / 24.0;  // pi * (2/3) * 0.25^2

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

PhasePowers along(const ClarkePowers& u, double r) {
  return clarke_inverse({{r * u[0], r * u[1], r * u[2]}});
}

ClarkePowers random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ClarkePowers u{{g(rng), g(rng), g(rng)}};
  const double n = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  for (double& x : u.p) x /= n;
  return u;
}

// Bisection on the membership test along an origin ray.
double bisect_radius(const CapabilityChart& chart, const ClarkePowers& u) {
  double lo = 0.0, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chart.contains_exact(along(u, mid)) ? lo : hi) = mid;
  }
  return lo;
}

std::vector<ConverterDesign> presets() {
  std::vector<ConverterDesign> out;
  for (const auto& n : catalog::names()) out.push_back(*catalog::find(n));
  for (std::size_t m : {5u, 8u, 9u, 14u, 15u}) out.push_back(catalog::uniform(m));
  return out;
}

}  // namespace

TEST(CcaGrid, UniformFixedFourIsEllipse) {
  EXPECT_LT(rel(cca_grid(catalog::uniform_fixed(4)).value, kEllipse), 0.01);
}

TEST(CcaGrid, UniformFixedThreeIsZero) {
  EXPECT_EQ(cca_grid(catalog::uniform_fixed(3)).value, 0.0);
  EXPECT_EQ(cca_grid(catalog::uniform_fixed(3), GridSpec{201, 1.0}).value, 0.0);
}

TEST(CcaGrid, IdealisedMatchesSizeIncrease) {
  const double v = cca_grid(catalog::omega()).value;
  EXPECT_LT(rel(v, 1.753 * 1.753 * kEllipse), 0.02);
}

TEST(CcaGrid, MetadataAndErrors) {
  const ChartMetrics m = cca_grid(catalog::s4_opt(), GridSpec{101, 1.0});
  EXPECT_EQ(m.kind, MetricKind::area);
  EXPECT_EQ(m.method, MetricMethod::grid);
  EXPECT_EQ(m.resolution, (std::vector<int>{101, 101}));
  for (int bad : {19, 20, 100, -3}) {
    try {
      cca_grid(catalog::s4_opt(), GridSpec{bad, 1.0});
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::invalid_grid);
    }
  }
}

TEST(CcaGrid, NominalCoordinatesAgree) {
  for (const auto& d : {catalog::s4_opt(), catalog::omega(), catalog::uniform_fixed(4)}) {
    const CapabilityChart chart(d);
    const double ab = cca_grid(chart, GridSpec{801, 1.0}).value;
    const double nom = cca_grid_nominal(chart, GridSpec{801, 1.0}).value;
    EXPECT_LT(rel(nom, ab), 0.01) << d.name();
  }
}

TEST(CcvGrid, UniformFixedThreeIsZero) {
  EXPECT_EQ(ccv_grid(catalog::uniform_fixed(3), GridSpec{101, 1.0}).value, 0.0);
}

TEST(CcvGrid, ScalesWithCubeOfBaseCurrent) {
  for (const auto& d : {catalog::i4_opt(), catalog::omega()}) {
    const double a = ccv_grid(d, GridSpec{81, 1.0}).value;
    const double b = ccv_grid(d.with_base_current(2.0), GridSpec{81, 2.0}).value;
    EXPECT_NEAR(b, 8.0 * a, 1e-12 * b) << d.name();
  }
}

TEST(CcvSpherical, ScalesWithCubeOfBaseCurrent) {
  const double a = ccv_spherical_integral(catalog::s4_opt(), 90, 180).value;
  const double b = ccv_spherical_integral(catalog::s4_opt().with_base_current(2.0), 90, 180).value;
  EXPECT_NEAR(b, 8.0 * a, 1e-12 * b);
}

TEST(CcvSpherical, AgreesWithGridForUniformFixedFour) {
  const double s = ccv_spherical_integral(catalog::uniform_fixed(4)).value;
  const double g = ccv_grid(catalog::uniform_fixed(4), GridSpec{201, 1.0}).value;
  EXPECT_LT(rel(g, s), 0.02);
}

TEST(CcvSpherical, IdealisedSizeRatio) {
  const double o = ccv_spherical_integral(catalog::omega()).value;
  const double u = ccv_spherical_integral(catalog::uniform_fixed(4)).value;
  EXPECT_LT(rel(size_ratio(u, o, MetricKind::volume), 1.627), 0.03);
}

TEST(CcvSpherical, RejectsCoarseSphere) {
  EXPECT_THROW(ccv_spherical_integral(catalog::omega(), 80, 360), Error);
  EXPECT_THROW(ccv_spherical_integral(catalog::omega(), 180, 60), Error);
}

TEST(BoundaryRadius, IdealisedPlanarClosedForm) {
  const double r = *boundary_radius(catalog::omega(), DirectionSpec::planar(0.0));
  EXPECT_NEAR(r, 1.0 / (2.0 * std::sqrt(2.0 / 3.0) + std::sqrt(1.5)), 1e-12);
  EXPECT_NEAR(r, 0.34993, 1e-5);
  const CapabilityChart chart(catalog::omega());
  EXPECT_NEAR(bisect_radius(chart, {{1, 0, 0}}), r, 1e-12);
}

TEST(BoundaryRadius, UniformFixedFourCircle) {
  const CapabilityChart chart(catalog::uniform_fixed(4));
  for (double psi : {0.0, 0.4, 1.3, 3.0, 5.9})
    EXPECT_NEAR(*boundary_radius(chart, DirectionSpec::planar(psi)), std::sqrt(2.0 / 3.0) * 0.25, 1e-12);
  const BoundaryTrace t = planar_trace(chart);
  ASSERT_EQ(t.samples.size(), 720u);
  double lo = 1e9, hi = -1e9;
  for (const auto& s : t.samples) {
    lo = std::min(lo, s.r);
    hi = std::max(hi, s.r);
  }
  EXPECT_LT(hi - lo, 1e-9);
}

TEST(BoundaryRadius, IdealisedPole) {
  const double r = *boundary_radius(catalog::omega(), DirectionSpec::spherical(0.0, 0.0));
  EXPECT_NEAR(r, 1.0 / std::sqrt(3.0), 1e-12);
}

TEST(BoundaryRadius, MatchesBisectionOracle) {
  std::mt19937_64 rng(21);
  for (const auto& d : presets()) {
    if (d.leg_count() > 12) continue;
    const CapabilityChart chart(d);
    for (int t = 0; t < 100; ++t) {
      const ClarkePowers u = random_unit(rng);
      const double r = chart.ray_limit(current_magnitudes(clarke_inverse(u)));
      EXPECT_NEAR(r, bisect_radius(chart, u), 1e-9) << d.name();
    }
  }
}

TEST(BoundaryRadius, RadialFeasibility) {
  std::mt19937_64 rng(22);
  for (const auto& d : {catalog::s4_opt(), catalog::i4_opt(), catalog::uniform(5), catalog::uniform(8),
                        ConverterDesign::reconfigurable("mixed", {0.1, 0.15, 0.2, 0.25, 0.3})}) {
    const AllocationTable table(d);
    const CapabilityChart chart(d);
    for (int t = 0; t < 1000; ++t) {
      const double theta = std::acos(std::uniform_real_distribution<double>(-1, 1)(rng));
      const double psi = std::uniform_real_distribution<double>(0, 2 * kPi)(rng);
      const auto spec = DirectionSpec::spherical(psi, theta);
      const double r = *boundary_radius(chart, spec);
      ASSERT_TRUE(indicator_enumerated(table, direction_to_powers(spec, 0.999 * r)).feasible) << d.name();
      ASSERT_FALSE(indicator_enumerated(table, direction_to_powers(spec, 1.001 * r)).feasible) << d.name();
    }
  }
}

TEST(BoundaryRadius, RadialFeasibilityIdealisedAndFixed) {
  std::mt19937_64 rng(23);
  for (const auto& d : {catalog::omega(), catalog::uniform_fixed(4)}) {
    const CapabilityChart chart(d);
    for (int t = 0; t < 1000; ++t) {
      const double theta = std::acos(std::uniform_real_distribution<double>(-1, 1)(rng));
      const double psi = std::uniform_real_distribution<double>(0, 2 * kPi)(rng);
      const auto spec = DirectionSpec::spherical(psi, theta);
      const double r = *boundary_radius(chart, spec);
      ASSERT_TRUE(chart.contains_exact(direction_to_powers(spec, 0.999 * r)));
      ASSERT_FALSE(chart.contains_exact(direction_to_powers(spec, 1.001 * r)));
    }
  }
}

TEST(BoundaryRadius, CylindricalOuterBoundary) {
  std::mt19937_64 rng(24);
  for (const auto& d : {catalog::i4_opt(), catalog::s4_opt(), catalog::uniform(6), catalog::omega(),
                        catalog::uniform_fixed(4)}) {
    const CapabilityChart chart(d);
    for (int t = 0; t < 200; ++t) {
      const double psi = std::uniform_real_distribution<double>(0, 2 * kPi)(rng);
      const double total = std::uniform_real_distribution<double>(-0.9, 0.9)(rng);
      const auto spec = DirectionSpec::cylindrical(psi, total);
      const auto r = boundary_radius(chart, spec);
      bool any = false;
      for (int k = 0; k <= 400; ++k) {
        const double s = 0.8 * k / 400.0;
        const bool in = chart.contains_exact(direction_to_powers(spec, s));
        any = any || in;
        if (r && s > *r * (1 + 1e-9) + 1e-12) ASSERT_FALSE(in) << d.name();
      }
      if (!r) {
        EXPECT_FALSE(any) << d.name();
        continue;
      }
      // the top of the interval must be feasible up to rounding
      const WireVector c = current_magnitudes(direction_to_powers(spec, *r));
      const double s = c[0] + c[1] + c[2] + c[3];
      if (d.is_idealised()) {
        EXPECT_LE(s, 1.0 + 1e-9);
        continue;
      }
      bool fits = false;
      for (const WireVector& cap : chart.capacity_vectors()) {
        bool ok = true;
        for (int w = 0; w < 4; ++w) ok = ok && c[w] <= cap[w] + 1e-9;
        fits = fits || ok;
      }
      EXPECT_TRUE(fits) << d.name();
    }
  }
}

TEST(BoundaryRadius, CylindricalCentreOfFullSlices) {
  // only the balanced point survives at these totals
  const auto r1 = boundary_radius(catalog::omega(), DirectionSpec::cylindrical(0.3, 1.0));
  ASSERT_TRUE(r1.has_value());
  EXPECT_NEAR(*r1, 0.0, 1e-12);
  const auto r2 = boundary_radius(catalog::uniform_fixed(4), DirectionSpec::cylindrical(1.0, 0.75));
  ASSERT_TRUE(r2.has_value());
  EXPECT_NEAR(*r2, 0.0, 1e-12);
  EXPECT_FALSE(boundary_radius(catalog::omega(), DirectionSpec::cylindrical(0.3, 1.05)).has_value());
  EXPECT_FALSE(boundary_radius(catalog::uniform_fixed(4), DirectionSpec::cylindrical(0.3, -0.8)).has_value());
}

TEST(CcaBoundaryIntegral, UniformFixedFour) {
  EXPECT_LT(rel(cca_boundary_integral(catalog::uniform_fixed(4), 360).value, kEllipse), 0.001);
}

TEST(CcaBoundaryIntegral, UniformFixedThreeIsZero) {
  EXPECT_EQ(cca_boundary_integral(catalog::uniform_fixed(3)).value, 0.0);
}

TEST(CcaBoundaryIntegral, RejectsFewAngles) {
  try {
    cca_boundary_integral(catalog::omega(), 60);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_grid);
  }
}

TEST(CrossMethod, CcaAgreesForEveryPreset) {
  for (const auto& d : presets()) {
    const CapabilityChart chart(d);
    const double g = cca_grid(chart, GridSpec{801, 1.0}).value;
    const double b = cca_boundary_integral(chart, 720).value;
    if (b == 0.0) {
      EXPECT_EQ(g, 0.0) << d.name();
      continue;
    }
    EXPECT_LT(rel(g, b), d.name() == "s4opt" ? 0.01 : 0.02) << d.name() << " grid " << g << " bi " << b;
  }
}

TEST(CrossMethod, CcvAgreesForFourLegDesigns) {
  for (const auto& d : {catalog::s4_opt(), catalog::i4_opt()}) {
    const double g = ccv_grid(d, GridSpec{121, 1.0}).value;
    const double s = ccv_spherical_integral(d, 90, 180).value;
    EXPECT_LT(rel(g, s), 0.03) << d.name();
  }
}

TEST(Monotonicity, UniformDoublingAndIdeal) {
  const double omega_a = cca_boundary_integral(catalog::omega()).value;
  const double omega_v = ccv_spherical_integral(catalog::omega(), 90, 180).value;
  for (std::size_t m : {2u, 3u, 4u, 5u, 6u, 8u}) {
    const double a1 = cca_boundary_integral(catalog::uniform(m)).value;
    const double a2 = cca_boundary_integral(catalog::uniform(2 * m)).value;
    EXPECT_LE(a1, a2) << m;
    EXPECT_LE(a2, omega_a) << m;
    const double v1 = ccv_spherical_integral(catalog::uniform(m), 90, 180).value;
    const double v2 = ccv_spherical_integral(catalog::uniform(2 * m), 90, 180).value;
    EXPECT_LE(v1, v2) << m;
    EXPECT_LE(v2, omega_v) << m;
  }
}

TEST(Traces, ShapesAndOrdering) {
  const CapabilityChart chart(catalog::i4_opt());
  const BoundaryTrace p = planar_trace(chart, 360);
  ASSERT_EQ(p.samples.size(), 360u);
  for (std::size_t k = 1; k < p.samples.size(); ++k) EXPECT_GT(p.samples[k].theta, p.samples[k - 1].theta);
  const BoundaryTrace s = spherical_trace(chart, kPi / 4, 361);
  ASSERT_EQ(s.samples.size(), 361u);
  EXPECT_EQ(s.samples.front().theta, 0.0);
  EXPECT_NEAR(s.samples.back().theta, kPi, 1e-15);
  for (const auto& x : s.samples) {
    EXPECT_GE(x.r, 0.0);
    EXPECT_EQ(x.psi, kPi / 4);
  }
  const BoundaryTrace c = cylindrical_trace(chart, 0.45, 360);
  EXPECT_FALSE(c.samples.empty());
  EXPECT_EQ(c.total_power, 0.45);
  const BoundaryTrace sph = sphere_trace(chart, 90, 180);
  EXPECT_EQ(sph.samples.size(), 90u * 180u);
}

TEST(ZeroPowerLoci, Examples) {
  const auto w2 = zero_power_loci(0.0, 2);
  ASSERT_EQ(w2.size(), 1u);
  EXPECT_NEAR(w2[0], std::atan(std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(w2[0], 0.95532, 1e-5);
  const auto w3 = zero_power_loci(0.0, 3);
  EXPECT_NEAR(w3[0], w2[0], 1e-12);
  const auto n = zero_power_loci(1.0, 4);
  EXPECT_EQ(n.front(), 0.0);
  // the balanced ray carries no neutral current at any radius
  for (double r : {0.1, 0.4, 0.9})
    EXPECT_NEAR(current_magnitudes(direction_to_powers(DirectionSpec::spherical(1.0, 0.0), r))[3], 0.0, 1e-12);
  EXPECT_THROW(zero_power_loci(0.0, 0), Error);
}

TEST(ZeroPowerLoci, SubstitutionVanishes) {
  std::mt19937_64 rng(25);
  for (int t = 0; t < 200; ++t) {
    const double psi = std::uniform_real_distribution<double>(0, 2 * kPi)(rng);
    for (int w = 1; w <= 3; ++w)
      for (double theta : zero_power_loci(psi, w)) {
        EXPECT_GE(theta, 0.0);
        EXPECT_LE(theta, kPi);
        EXPECT_NEAR(direction_to_powers(DirectionSpec::spherical(psi, theta), 1.0)[w - 1], 0.0, 1e-12);
      }
  }
}

TEST(SizeRatio, Examples) {
  EXPECT_NEAR(size_ratio(1.0, 2.0, MetricKind::area), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(size_ratio(1.0, 8.0, MetricKind::volume), 2.0, 1e-15);
  const double eta = size_ratio(cca_boundary_integral(catalog::uniform_fixed(4)),
                                cca_boundary_integral(catalog::omega()));
  EXPECT_NEAR(eta, 1.753, 0.02 * 1.753);
}

TEST(SizeRatio, Errors) {
  try {
    size_ratio(0.0, 1.0, MetricKind::area);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_chart);
  }
  EXPECT_THROW(size_ratio(-1.0, 1.0, MetricKind::volume), Error);
  EXPECT_THROW(size_ratio(ChartMetrics{MetricKind::area, 1.0, MetricMethod::grid, {}},
                          ChartMetrics{MetricKind::volume, 1.0, MetricMethod::grid, {}}),
               Error);
}
