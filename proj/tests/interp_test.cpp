#include "rwalk/interp.hpp"

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace rwalk {
namespace {

using testing::Gen;

TEST(TimeGridTest, Examples) {
  const TimeGrid g(3, 100);
  EXPECT_EQ(g.tau(0), 0.0);
  EXPECT_NEAR(g.tau(1), 0.25, 1e-15);
  EXPECT_NEAR(g.tau(2), 0.45, 1e-15);
  EXPECT_NEAR(g.sigma(2), 0.2, 1e-15);
  EXPECT_THROW(g.tau(101), std::out_of_range);
  EXPECT_THROW(g.m_of_t(-0.1), std::out_of_range);
  EXPECT_THROW(g.m_of_t(g.tau(100) + 1e-9), std::out_of_range);
}

TEST(TimeGridTest, MOfTInvertsTau) {
  const TimeGrid g(3, 10000);
  for (std::int64_t n = 0; n <= 10000; ++n) ASSERT_EQ(g.m_of_t(g.tau(n)), n);
  Gen gen(1);
  for (int s = 0; s < 10000; ++s) {
    const double t = gen.uniform(0.0, g.tau(10000));
    const auto m = g.m_of_t(t);
    ASSERT_LE(g.tau(m), t);
    if (m < 10000) {
      ASSERT_GT(g.tau(m + 1), t);
    }
  }
}

TEST(TimeGridTest, MatchesHarmonicAsymptotics) {
  // tau_n = H_{n+N0} - H_{N0}, with H_m = log m + gamma + 1/(2m) - 1/(12 m^2) + ...
  const int n0 = 3;
  const std::int64_t n = 1000000;
  const TimeGrid g(n0, n);
  const double gamma = 0.57721566490153286;
  const double m = static_cast<double>(n + n0);
  const double h_big = std::log(m) + gamma + 1 / (2 * m) - 1 / (12 * m * m);
  const double h_small = 1.0 + 0.5 + 1.0 / 3.0;
  EXPECT_NEAR(g.tau(n), h_big - h_small, 1e-12);
  EXPECT_GT(g.tau(n), 10.0);

  long double direct = 0.0L;
  for (std::int64_t k = n; k >= 1; --k) direct += 1.0L / static_cast<long double>(k + n0);
  EXPECT_NEAR(g.tau(n), static_cast<double>(direct), 1e-12);
}

Trajectory walk_trajectory(const Params& p, std::int64_t steps, std::uint64_t seed) {
  RunOptions o;
  o.thinning = 1;
  return run(p, steps, seed, o).trajectory;
}

TEST(InterpolatedPathTest, ExactAtGridAndAffineBetween) {
  const auto p = Params::make(3, 10.0, 0.05);
  const auto traj = walk_trajectory(p, 2000, 3);
  const TimeGrid g(p.n0, 2000);
  const InterpolatedPath path(traj, g);
  std::vector<double> z(6);
  for (std::int64_t n = 0; n < 2000; ++n) {
    path.eval_into(g.tau(n), z);
    const auto a = traj.flat_at(static_cast<std::size_t>(n));
    for (int i = 0; i < 6; ++i) ASSERT_EQ(z[i], a[i]);
    path.eval_into((g.tau(n) + g.tau(n + 1)) / 2, z);
    const auto b = traj.flat_at(static_cast<std::size_t>(n + 1));
    for (int i = 0; i < 6; ++i) ASSERT_NEAR(z[i], (a[i] + b[i]) / 2, 1e-14);
  }
}

TEST(InterpolatedPathTest, StaysInDomainAndHIsNearlyAffine) {
  const auto p = Params::make(4, 3.0, 0.02);
  const auto traj = walk_trajectory(p, 5000, 4);
  const TimeGrid g(p.n0, 5000);
  const InterpolatedPath path(traj, g);
  Gen gen(2);
  for (int s = 0; s < 1000; ++s) {
    const auto n = static_cast<std::int64_t>(gen.integer(0, 4999));
    const double w = gen.uniform();
    const double t = g.tau(n) + w * (g.tau(n + 1) - g.tau(n));
    const auto z = path.eval(t);  // constructing ProductPoint validates D
    const auto a = traj.point_at(static_cast<std::size_t>(n));
    const auto b = traj.point_at(static_cast<std::size_t>(n + 1));
    double dx = 0.0, dy = 0.0;
    for (int i = 0; i < 4; ++i) {
      dx += std::abs(a.x[i] - b.x[i]);
      dy += std::abs(a.y[i] - b.y[i]);
    }
    const double lo = std::min(joint_support(a), joint_support(b));
    const double hi = std::max(joint_support(a), joint_support(b));
    const double h = joint_support(z);
    ASSERT_GE(h, lo - dx * dy / 4 - 1e-15);
    ASSERT_LE(h, hi + dx * dy / 4 + 1e-15);
  }
}

TEST(InterpolatedPathTest, NeedsDenseSamples) {
  const auto p = Params::make(3, 2.0, 0.05);
  RunOptions o;
  o.thinning = 10;
  const auto traj = run(p, 100, 1, o).trajectory;
  const TimeGrid g(p.n0, 100);
  const InterpolatedPath path(traj, g);
  EXPECT_NO_THROW(path.eval(g.tau(10)));
  EXPECT_THROW(path.eval(g.tau(10) + 1e-6), std::out_of_range);
  EXPECT_THROW(path.eval(g.tau(100) + 1.0), std::out_of_range);
}

TEST(ErrorSupTest, WindowEnd) {
  const TimeGrid g(3, 200000);
  for (std::int64_t n : {0, 10, 1000, 20000}) {
    for (double T : {0.0, 0.5, 1.0}) {
      const auto k = error_window_end(g, n, T);
      EXPECT_GT(g.tau(k) - g.tau(n), T + 1);
      EXPECT_LE(g.tau(k - 1) - g.tau(n), T + 1);
    }
  }
}

TEST(ErrorSupTest, ZeroAndSingleTerm) {
  const int d = 3;
  const TimeGrid g(3, 1000);
  const auto end = error_window_end(g, 10, 1.0);
  NoiseRecord zero(d, 10);
  std::vector<double> eps(6, 0.0);
  for (std::int64_t i = 10; i < end; ++i) zero.append(i, eps);
  EXPECT_EQ(error_sup(zero, g, 10, 1.0), 0.0);

  NoiseRecord single(d, 10);
  for (std::int64_t i = 10; i < end; ++i) {
    std::fill(eps.begin(), eps.end(), 0.0);
    if (i == 12) eps = {0.1, -0.05, -0.05, 0.0, 0.02, -0.02};
    single.append(i, eps);
  }
  EXPECT_NEAR(error_sup(single, g, 10, 1.0), 0.24, 1e-15);

  NoiseRecord shorter(d, 10);
  for (std::int64_t i = 10; i < end - 2; ++i) shorter.append(i, eps);
  EXPECT_THROW(error_sup(shorter, g, 10, 1.0), std::out_of_range);
}

TEST(ErrorSupTest, MatchesBruteForce) {
  const auto p = Params::make(3, 10.0, 0.05);
  RunOptions o;
  o.record_noise = true;
  const auto r = run(p, 3000, 7, o);
  const TimeGrid g(p.n0, 4000);
  for (std::int64_t n : {0, 50, 400}) {
    double best = 0.0;
    std::vector<double> acc(6, 0.0);
    for (std::int64_t k = n + 1; g.tau(k) - g.tau(n) <= 2.0; ++k) {
      const auto e = r.noise.at(k - 1);
      double norm = 0.0;
      for (int i = 0; i < 6; ++i) norm += std::abs(acc[i] += e[i]);
      best = std::max(best, norm);
    }
    EXPECT_NEAR(error_sup(r.noise, g, n, 1.0), best, 1e-15);
  }
}

TEST(ErrorSupTest, DecaysWithN) {
  const auto p = Params::make(3, 10.0, 0.05);
  RunOptions o;
  o.record_noise = true;
  int decays = 0;
  const TimeGrid g(p.n0, 100000);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = run(p, 80000, seed, o);
    decays += error_sup(r.noise, g, 10000, 1.0) < error_sup(r.noise, g, 100, 1.0) ? 1 : 0;
  }
  EXPECT_GE(decays, 16);
}

TEST(GronwallTest, Formula) {
  const auto p = Params::make(3, 10.0, 0.05);
  const TimeGrid g(p.n0, 100000);
  const double L = 1 + 10.0 / (2 * 0.05);
  EXPECT_NEAR(lipschitz_bound(p), L, 1e-12);
  EXPECT_EQ(field_sup_bound(p), 4.0);
  const double t = g.tau(1000), T = 1.0, e = 0.01;
  const double expected =
      std::exp(L * T) * (L * T * g.sigma(g.m_of_t(t + T)) * 4.0 + 2 * e * (L * T + 1));
  EXPECT_NEAR(gronwall_bound(p, g, t, T, e), expected, 1e-12 * expected);
}

// Plain RK4 on the mean-field ODE, built from the test's own kernel.
void reference_rk4(std::vector<double>& z, double h, const Params& p) {
  const int d = p.d;
  auto field = [&](const std::vector<double>& s) {
    const std::vector<double> x(s.begin(), s.begin() + d), y(s.begin() + d, s.end());
    const auto px = testing::naive_kernel(y, p.alpha, p.delta);
    const auto py = testing::naive_kernel(x, p.alpha, p.delta);
    std::vector<double> f(2 * d);
    for (int i = 0; i < d; ++i) {
      f[i] = -x[i] + px[i];
      f[d + i] = -y[i] + py[i];
    }
    return f;
  };
  auto shift = [&](const std::vector<double>& k, double c) {
    std::vector<double> s(z);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += c * k[i];
    return s;
  };
  const auto k1 = field(z);
  const auto k2 = field(shift(k1, h / 2));
  const auto k3 = field(shift(k2, h / 2));
  const auto k4 = field(shift(k3, h));
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
}

TEST(GapTest, ZeroHorizon) {
  const auto p = Params::make(3, 10.0, 0.05);
  const auto traj = walk_trajectory(p, 500, 3);
  const TimeGrid g(p.n0, 500);
  const InterpolatedPath path(traj, g);
  EXPECT_EQ(pseudotrajectory_gap(path, p, g.tau(100), 0.0), 0.0);
}

TEST(GapTest, NoiseFreePathHasTinyGap) {
  // A path whose nodes are the flow itself: only interpolation and
  // integrator error remain.
  const auto p = Params::make(3, 2.0, 0.01);
  const std::int64_t n = 10000;
  const TimeGrid g(p.n0, 40000);
  const auto end = g.m_of_t(g.tau(n) + 1.0) + 2;
  Trajectory traj(p, 0, 1);
  std::vector<double> z{0.4, 0.35, 0.25, 0.2, 0.3, 0.5};
  traj.append(n, z);
  for (std::int64_t k = n; k < end; ++k) {
    const double h = g.tau(k + 1) - g.tau(k);
    for (int s = 0; s < 4; ++s) reference_rk4(z, h / 4, p);
    traj.append(k + 1, z);
  }
  const InterpolatedPath path(traj, g);
  const double gap = pseudotrajectory_gap(path, p, g.tau(n), 1.0);
  EXPECT_LT(gap, 1e-6);
}

TEST(GapTest, StudyBoundHolds) {
  const auto p = Params::make(3, 10.0, 0.05);
  const std::int64_t at[] = {100, 1000};
  const auto study = gap_study(p, 5, at, 0.5);
  ASSERT_EQ(study.samples.size(), 2u);
  for (const auto& s : study.samples) {
    EXPECT_GE(s.gap, 0.0);
    EXPECT_GT(s.eps_sup, 0.0);
    EXPECT_TRUE(s.bound_holds);
    EXPECT_LE(s.gap, s.bound);
  }
  EXPECT_EQ(study.samples[0].n, 100);
  const auto again = gap_study(p, 5, at, 0.5);
  EXPECT_EQ(again.samples[1].gap, study.samples[1].gap);
}

}  // namespace
}  // namespace rwalk
