#include "rwalk/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace rwalk {
namespace {

using testing::Gen;

TEST(ParamsTest, RejectsInvalidValues) {
  EXPECT_THROW(Params::make(1, 1.0, 0.01), std::invalid_argument);
  EXPECT_THROW(Params::make(3, 0.0, 0.01), std::invalid_argument);
  EXPECT_THROW(Params::make(3, -1.0, 0.01), std::invalid_argument);
  EXPECT_THROW(Params::make(3, std::numeric_limits<double>::infinity(), 0.01),
               std::invalid_argument);
  EXPECT_THROW(Params::make(3, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(Params::make(3, 1.0, 1.0 / 3.0), std::invalid_argument);
  EXPECT_THROW(Params::make(3, 1.0, 0.01, 0), std::invalid_argument);
}

TEST(ParamsTest, N0DefaultsToD) {
  EXPECT_EQ(Params::make(5, 2.0, 0.01).n0, 5);
  EXPECT_EQ(Params::make(5, 2.0, 0.01, 7).n0, 7);
}

TEST(ParamsTest, Thresholds) {
  EXPECT_NEAR(Params::make(3, 2.0, 0.05).s_delta_bound(), 0.14422495703074084, 1e-15);
  EXPECT_NEAR(Params::make(3, 10.0, 0.05).s_delta_bound(), 0.11050315033964667, 1e-15);
  EXPECT_NEAR(Params::make(3, 10.0, 0.01).lyapunov_threshold(), 0.016575472550947, 1e-15);
  for (int d = 2; d <= 8; ++d) {
    for (double a : {0.5, 1.0, 10.0}) {
      const auto p = Params::make(d, a, 0.5 / d);
      EXPECT_GT(p.lyapunov_threshold(), 0.0);
      EXPECT_GT(p.s_delta_bound(), p.lyapunov_threshold());
    }
  }
}

TEST(SimplexPointTest, Construction) {
  EXPECT_NO_THROW(SimplexPoint({0.5, 0.5}));
  EXPECT_THROW(SimplexPoint({0.5, 0.6}), std::domain_error);
  EXPECT_THROW(SimplexPoint({1.1, -0.1}), std::domain_error);
  EXPECT_THROW(SimplexPoint({1.0}), std::domain_error);

  const SimplexPoint clamped({1.0, -1e-14});
  EXPECT_EQ(clamped[1], 0.0);

  const SimplexPoint drift({0.5 + 5e-11, 0.5});
  EXPECT_NEAR(drift[0] + drift[1], 1.0, 1e-15);

  // Exactly representable points are kept untouched.
  const SimplexPoint exact({0.25, 0.75});
  EXPECT_EQ(exact[0], 0.25);
  EXPECT_EQ(SimplexPoint::vertex(3, 1)[1], 1.0);
  EXPECT_THROW(SimplexPoint::vertex(3, 3), std::out_of_range);
}

TEST(FloorWeightTest, Examples) {
  const auto p = Params::make(3, 1.0, 0.05);
  EXPECT_EQ(floor_weight(0.0, p), 0.05);
  EXPECT_EQ(floor_weight(0.05, p), 0.05);
  EXPECT_EQ(floor_weight(0.3, p), 0.3);
  EXPECT_THROW(floor_weight(-0.1, p), std::domain_error);
  EXPECT_THROW(floor_weight(1.5, p), std::domain_error);
}

TEST(FloorWeightTest, BoundedWeight) {
  const auto p = Params::make(4, 3.0, 0.02);
  for (int k = 0; k <= 1000; ++k) {
    const double v = k / 1000.0;
    EXPECT_GE(floor_weight(v, p), p.delta);
    EXPECT_LE(repelling_weight(v, p), std::pow(p.delta, -p.alpha) * (1 + 1e-15));
  }
}

TEST(KernelTest, Examples) {
  {
    const auto p = Params::make(3, 7.0, 0.1);
    const auto k = kernel(SimplexPoint::uniform(3), p);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(k[i], 1.0 / 3, 1e-15);
  }
  {
    const auto p = Params::make(3, 2.0, 0.01);
    const auto k = kernel(SimplexPoint({0.5, 0.3, 0.2}), p);
    EXPECT_NEAR(k[0], 0.0997, 1e-4);
    EXPECT_NEAR(k[1], 0.2770, 1e-4);
    EXPECT_NEAR(k[2], 0.6233, 1e-4);
  }
  {
    const auto p = Params::make(3, 1.0, 0.05);
    const auto k = kernel(SimplexPoint({0.9, 0.05, 0.05}), p);
    EXPECT_NEAR(k[0], 0.0270, 1e-4);
    EXPECT_NEAR(k[1], 0.4865, 1e-4);
    EXPECT_NEAR(k[2], 0.4865, 1e-4);
  }
}

TEST(KernelTest, MatchesPlainPowers) {
  Gen gen(11);
  for (double a : {0.5, 2.0, 10.0}) {
    for (int d = 2; d <= 6; ++d) {
      const auto p = Params::make(d, a, 0.3 / d);
      for (int s = 0; s < 2000; ++s) {
        const auto u = gen.simplex(d);
        const auto expected = testing::naive_kernel(u, a, p.delta);
        std::vector<double> got(u.size());
        kernel_into(u, p, got);
        for (std::size_t i = 0; i < u.size(); ++i)
          ASSERT_NEAR(got[i], expected[i], 1e-12 * std::max(1.0, expected[i]));
      }
    }
  }
}

TEST(KernelTest, SumsToOne) {
  Gen gen(12);
  const auto p = Params::make(5, 10.0, 0.01);
  std::vector<double> out(5);
  for (int s = 0; s < 100000; ++s) {
    kernel_into(gen.simplex(5), p, out);
    double sum = 0.0;
    for (double x : out) {
      ASSERT_GT(x, 0.0);
      ASSERT_LE(x, 1.0);
      sum += x;
    }
    ASSERT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(KernelTest, PermutationEquivariant) {
  Gen gen(13);
  const auto p = Params::make(6, 4.0, 0.02);
  for (int s = 0; s < 1000; ++s) {
    const auto u = gen.simplex(6);
    const auto perm = gen.permutation(6);
    std::vector<double> a(6), b(6);
    kernel_into(u, p, a);
    kernel_into(testing::permute(u, perm), p, b);
    const auto pa = testing::permute(a, perm);
    for (int i = 0; i < 6; ++i) ASSERT_NEAR(b[i], pa[i], 1e-15);
  }
}

TEST(KernelTest, DecreasingInOwnCoordinate) {
  const auto p = Params::make(3, 2.0, 0.05);
  double prev = 2.0;
  for (int k = 6; k <= 90; ++k) {
    const double v = k / 100.0;
    const double rest = (1.0 - v) / 2.0;
    const double pi0 = kernel(SimplexPoint({v, rest, rest}), p)[0];
    EXPECT_LT(pi0, prev);
    prev = pi0;
  }
}

TEST(KernelTest, NoOverflowAtLargeAlpha) {
  const auto p = Params::make(3, 50.0, 1e-13);
  std::vector<double> out(3);
  kernel_into(std::vector<double>{1e-12, 0.5, 0.5 - 1e-12}, p, out);
  double sum = 0.0;
  for (double x : out) {
    EXPECT_TRUE(std::isfinite(x));
    sum += x;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_NEAR(out[0], 1.0, 1e-12);
}

TEST(KernelTest, CountFormWhenUnfloored) {
  // With all coordinates above delta the kernel is N^{-a} / sum N^{-a}.
  const auto p = Params::make(3, 3.0, 0.01);
  const std::vector<long> counts{40, 25, 35};
  const double total = 100.0;
  std::vector<double> x(3), got(3);
  double s = 0.0;
  std::vector<double> w(3);
  for (int i = 0; i < 3; ++i) {
    x[i] = counts[i] / total;
    s += (w[i] = std::pow(static_cast<double>(counts[i]), -3.0));
  }
  kernel_into(x, p, got);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[i], w[i] / s, 1e-12);
}

TEST(JointSupportTest, Examples) {
  EXPECT_NEAR(joint_support(ProductPoint::uniform(3)), 1.0 / 3, 1e-15);
  EXPECT_EQ(joint_support(ProductPoint(SimplexPoint::vertex(3, 0), SimplexPoint::vertex(3, 1))), 0.0);
  EXPECT_NEAR(joint_support(ProductPoint(SimplexPoint({0.5, 0.3, 0.2}), SimplexPoint({0.2, 0.3, 0.5}))),
              0.29, 1e-15);
}

TEST(JointSupportTest, RangeAndCauchySchwarz) {
  Gen gen(14);
  for (int s = 0; s < 10000; ++s) {
    const int d = gen.integer(2, 8);
    const auto x = gen.simplex(d), y = gen.simplex(d);
    const double h = joint_support(x, y);
    ASSERT_GE(h, 0.0);
    ASSERT_LE(h, 1.0);
    ASSERT_EQ(h, joint_support(y, x));
    ASSERT_GE(joint_support(x, x), 1.0 / d - 1e-15);
  }
}

TEST(SDeltaTest, Examples) {
  const auto p = Params::make(3, 2.0, 0.05);
  EXPECT_TRUE(in_s_delta(0.10, p));
  EXPECT_FALSE(in_s_delta(ProductPoint::uniform(3), p));
  EXPECT_FALSE(in_s_delta(ProductPoint(SimplexPoint::vertex(3, 0), SimplexPoint::vertex(3, 0)), p));
  EXPECT_FALSE(in_s_delta(p.s_delta_bound(), p));  // strict
}

TEST(AlphaLargeEnoughTest, ConditionTwo) {
  auto r = alpha_large_enough(Params::make(3, 10.0, 0.01));
  EXPECT_NEAR(r.condition2_bound, 3.8188416793064195, 1e-12);
  EXPECT_TRUE(r.condition2);
  EXPECT_EQ(r.condition1, ConditionStatus::Unverified);
  EXPECT_FALSE(r.large_enough);

  EXPECT_FALSE(alpha_large_enough(Params::make(3, 2.0, 0.01)).condition2);

  r = alpha_large_enough(Params::make(2, 10.0, 0.01), true);
  EXPECT_NEAR(r.condition2_bound, 2.4094208396532095, 1e-12);
  EXPECT_EQ(r.condition1, ConditionStatus::Holds);
  EXPECT_TRUE(r.large_enough);

  r = alpha_large_enough(Params::make(2, 10.0, 0.01), false);
  EXPECT_EQ(r.condition1, ConditionStatus::Fails);
  EXPECT_FALSE(r.large_enough);
}

}  // namespace
}  // namespace rwalk
