#include "rwalk/oracles.hpp"

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "rwalk/flow.hpp"
#include "test_support.hpp"

namespace rwalk {
namespace {

using testing::Gen;

TEST(LatticeTest, InteriorLattice) {
  const auto l = interior_lattice(3, GridSpec{});
  EXPECT_EQ(l.size(), 276u);
  EXPECT_NEAR(l.front()[0], 1.0 / 25, 1e-15);
  EXPECT_NEAR(l.front()[2], 23.0 / 25, 1e-15);
  for (std::size_t i = 1; i < l.size(); ++i) EXPECT_TRUE(l[i - 1] < l[i]);
  GridSpec coarse{25, 0.1};
  for (const auto& u : interior_lattice(3, coarse))
    for (double x : u) EXPECT_GE(x, 0.1);
  EXPECT_THROW(GridSpec({5, 0.01}).validate(3), std::invalid_argument);
  EXPECT_THROW(GridSpec({25, 0.0}).validate(3), std::invalid_argument);
  EXPECT_THROW(GridSpec({25, 0.34}).validate(3), std::invalid_argument);
}

TEST(RatioTest, Examples) {
  EXPECT_NEAR(ratio(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}, 4.0), 1.0 / 3, 1e-15);
  EXPECT_NEAR(ratio(std::vector<double>{0.5, 0.3, 0.2}, 2.0), 0.2359, 1e-4);
  EXPECT_THROW(ratio(std::vector<double>{0.0, 0.5, 0.5}, 2.0), std::domain_error);
  EXPECT_THROW(ratio(std::vector<double>{-0.1, 0.6, 0.5}, 2.0), std::domain_error);
}

TEST(RatioTest, MatchesPlainPowersAndStaysFinite) {
  Gen gen(1);
  for (int s = 0; s < 10000; ++s) {
    const int d = gen.integer(2, 6);
    const auto u = gen.interior(d, 0.01);
    const double a = gen.uniform(0.1, 10.0);
    ASSERT_NEAR(ratio(u, a), testing::naive_ratio(u, a), 1e-12);
  }
  const double r = ratio(std::vector<double>{1e-12, 0.5, 0.5 - 1e-12}, 50.0);
  EXPECT_TRUE(std::isfinite(r));
  EXPECT_NEAR(r, 1e-12, 1e-20);
}

TEST(RatioTest, BetweenMinAndMean) {
  Gen gen(2);
  for (int s = 0; s < 10000; ++s) {
    const int d = gen.integer(2, 6);
    const auto u = gen.interior(d, 1e-4);
    const double r = ratio(u, gen.uniform(0.1, 10.0));
    ASSERT_GE(r, *std::min_element(u.begin(), u.end()) * (1 - 1e-12));
    ASSERT_LE(r, 1.0 / d + 1e-12);
  }
}

TEST(RatioTest, MonotoneInAlpha) {
  const double alphas[] = {0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
  for (int d = 2; d <= 6; ++d) {
    const auto r = ratio_monotone_sweep(d, alphas, 10000, 7);
    EXPECT_TRUE(r.ok()) << "d=" << d << " increase " << r.extreme;
  }
}

TEST(MarginTest, ZeroAtUniformAndSymmetric) {
  const std::vector<double> u3{1.0 / 3, 1.0 / 3, 1.0 / 3};
  EXPECT_NEAR(master_margin(u3, u3, 10.0), 0.0, 1e-15);
  Gen gen(3);
  for (int s = 0; s < 1000; ++s) {
    const auto u = gen.interior(4, 0.01), v = gen.interior(4, 0.01);
    ASSERT_NEAR(master_margin(u, v, 3.0), master_margin(v, u, 3.0), 1e-15);
  }
}

TEST(MarginGridTest, HoldsForLargeAlpha) {
  std::size_t rows = 0;
  const auto r = verify_master_grid(3, 10.0, GridSpec{}, {}, [&](const InequalityRow&) { ++rows; });
  EXPECT_EQ(r.lattice_points, 276u);
  EXPECT_EQ(r.points_checked, 276u * 276u);
  EXPECT_EQ(rows, r.points_checked);
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(r.argmin_adjacent_uniform);
  EXPECT_NEAR(r.min_margin, 0.015969, 1e-6);
}

TEST(MarginGridTest, AlphaOneHoldsOnThreeVertices) {
  const auto r = verify_master_grid(3, 1.0, GridSpec{});
  EXPECT_TRUE(r.ok());
  EXPECT_NEAR(r.min_margin, 0.00294513, 1e-8);
}

TEST(MarginGridTest, FailsForSmallAlpha) {
  const auto r = verify_master_grid(3, 0.05, GridSpec{});
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.violation_count, 240u);
  for (const auto& v : r.violations) EXPECT_LT(v.margin, -1e-12);
  EXPECT_LT(r.min_margin, 0.0);
}

TEST(MarginGridTest, DeterministicAcrossWorkers) {
  MasterGridOptions one{1, 10}, many{3, 10};
  const auto a = verify_master_grid(4, 0.3, GridSpec{20, 0.01}, one);
  const auto b = verify_master_grid(4, 0.3, GridSpec{20, 0.01}, many);
  EXPECT_EQ(a.min_margin, b.min_margin);
  EXPECT_EQ(a.argmin.u, b.argmin.u);
  EXPECT_EQ(a.violation_count, b.violation_count);
  ASSERT_EQ(a.violations.size(), b.violations.size());
  for (std::size_t i = 0; i < a.violations.size(); ++i) EXPECT_EQ(a.violations[i].v, b.violations[i].v);
}

TEST(MarginGridTest, MatchesNegatedDhDtOneExponentUp) {
  // On unfloored points dH/dt at alpha equals minus the margin at alpha - 1.
  const auto p = Params::make(3, 10.0, 0.01);
  const auto lattice = interior_lattice(3, GridSpec{25, 0.02});
  for (const auto& u : lattice) {
    for (const auto& v : lattice) {
      const double dh = dH_dt(u, v, p);
      const double m = master_margin(u, v, 9.0);
      ASSERT_NEAR(dh, -m, 1e-12 * std::max(1.0, std::abs(dh)));
    }
  }
}

TEST(CheckAlphaTest, FeedsConditionOne) {
  const auto r = check_alpha(Params::make(3, 10.0, 0.01), GridSpec{});
  EXPECT_EQ(r.condition1, ConditionStatus::Holds);
  EXPECT_TRUE(r.condition2);
  EXPECT_TRUE(r.large_enough);
  const auto small = check_alpha(Params::make(3, 0.05, 0.01), GridSpec{});
  EXPECT_EQ(small.condition1, ConditionStatus::Fails);
  EXPECT_FALSE(small.large_enough);
}

TEST(MeanBoundTest, Examples) {
  const auto ones = mean_bound_check(std::vector<double>{1.0, 1.0}, 2.0);
  EXPECT_NEAR(ones.value, 1.0, 1e-15);
  EXPECT_NEAR(ones.bound, std::cbrt(3.0), 1e-15);
  EXPECT_TRUE(ones.holds);
  const auto tiny = mean_bound_check(std::vector<double>{1e-9, 1e-9}, 2.0);
  EXPECT_NEAR(tiny.value, 1.0, 1e-15);
  EXPECT_THROW(mean_bound_check(std::vector<double>{0.0}, 2.0), std::domain_error);
  EXPECT_THROW(mean_bound_check(std::vector<double>{1.5}, 2.0), std::domain_error);
}

TEST(MeanBoundTest, Sweep) {
  for (int d = 2; d <= 6; ++d) {
    for (double a : {0.5, 2.0, 10.0}) {
      const auto r = mean_bound_sweep(d, a, 200000, 11);
      EXPECT_EQ(r.samples, 200000u);
      EXPECT_TRUE(r.ok()) << "d=" << d << " a=" << a;
      EXPECT_LT(r.extreme, 1.0);
    }
  }
  const auto one = mean_bound_sweep(4, 2.0, 50000, 3, 1);
  const auto three = mean_bound_sweep(4, 2.0, 50000, 3, 3);
  EXPECT_EQ(one.extreme, three.extreme);
}

TEST(GFunctionTest, ZeroAtUniformAndLocalMinimum) {
  for (int d = 2; d <= 6; ++d) {
    const std::vector<double> u(static_cast<std::size_t>(d), 1.0 / d);
    EXPECT_NEAR(g_function(u, 3.0), 0.0, 1e-15);
  }
  const auto probe = local_min_probe(3, 5.0, 0.05, 10000, 4);
  EXPECT_EQ(probe.samples, 10000u);
  EXPECT_TRUE(probe.hypothesis);
  EXPECT_TRUE(probe.ok()) << probe.min_g;
  const auto again = local_min_probe(3, 5.0, 0.05, 10000, 4, 3);
  EXPECT_EQ(again.min_g, probe.min_g);
}

TEST(GFunctionTest, SmallAlphaReportsHypothesisOff) {
  const auto probe = local_min_probe(4, 0.5, 0.05, 5000, 4);
  EXPECT_FALSE(probe.hypothesis);
  EXPECT_GT(probe.negative, 0u);
}

TEST(FarFromUniformTest, Threshold) {
  EXPECT_NEAR(far_from_uniform_threshold(3, 0.9), 10.526704607247604, 1e-12);
  EXPECT_THROW(far_from_uniform_threshold(3, 0.0), std::invalid_argument);
  EXPECT_THROW(far_from_uniform_threshold(3, 1.0), std::invalid_argument);
}

TEST(FarFromUniformTest, Examples) {
  const auto r = far_from_uniform_check(std::vector<double>{0.05, 0.45, 0.5}, 12.0, 0.9);
  EXPECT_TRUE(r.applicable);
  EXPECT_NEAR(r.lhs, 0.0925, 1e-15);
  EXPECT_TRUE(r.inequality);
  EXPECT_TRUE(r.intermediate);
  EXPECT_TRUE(r.ok());
  const auto u = far_from_uniform_check(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}, 12.0, 0.9);
  EXPECT_FALSE(u.applicable);
  EXPECT_FALSE(u.reason.empty());
  EXPECT_FALSE(far_from_uniform_check(std::vector<double>{0.05, 0.45, 0.5}, 5.0, 0.9).applicable);
}

TEST(FarFromUniformTest, GridAndSweep) {
  const auto g = far_from_uniform_grid(3, 12.0, 0.9, GridSpec{});
  EXPECT_GT(g.applicable, 0u);
  EXPECT_EQ(g.failures, 0u);
  EXPECT_TRUE(intermediate_bound_sweep(3, 12.0, 100000, 5).ok());
}

TEST(RearrangementTest, ExampleAndSweep) {
  const auto r = rearrangement_bound(std::vector<double>{0.5, 0.3, 0.2}, std::vector<double>{0.2, 0.3, 0.5});
  EXPECT_NEAR(r.lhs, 0.29, 1e-15);
  EXPECT_NEAR(r.rhs, 0.28, 1e-15);
  EXPECT_TRUE(r.holds);
  const std::vector<double> u(4, 0.25);
  const auto eq = rearrangement_bound(u, u);
  EXPECT_NEAR(eq.lhs, eq.rhs, 1e-15);
  for (int d = 2; d <= 6; ++d) {
    const auto s = rearrangement_sweep(d, 200000, 13);
    EXPECT_TRUE(s.ok()) << "d=" << d;
    EXPECT_GE(s.extreme, -1e-12);
  }
}

}  // namespace
}  // namespace rwalk
