#pragma once

// Continuous-time interpolation of the chain on the grid
// tau_n = sum_{k=1}^n 1/(k+N0), and its distance to the semiflow.

#include <cstdint>
#include <span>
#include <vector>

#include "rwalk/flow.hpp"
#include "rwalk/walk.hpp"

namespace rwalk {

class TimeGrid {
 public:
  /// Prefix sums up to tau_{max_n}.
  TimeGrid(int n0, std::int64_t max_n);

  int n0() const { return n0_; }
  std::int64_t max_n() const { return static_cast<std::int64_t>(tau_.size()) - 1; }
  /// tau_n. Throws std::out_of_range beyond max_n.
  double tau(std::int64_t n) const;
  /// sigma_n = 1/(n+N0).
  double sigma(std::int64_t n) const { return 1.0 / static_cast<double>(n + n0_); }
  /// m(t) = sup{p : tau_p <= t}. Throws std::out_of_range if t < 0 or t > tau_{max_n}.
  std::int64_t m_of_t(double t) const;

 private:
  int n0_;
  std::vector<double> tau_;
};

/// z(t), affine on each [tau_n, tau_{n+1}]. Evaluation needs the samples at
/// both ends of the segment, so query windows must be recorded densely.
class InterpolatedPath {
 public:
  InterpolatedPath(const Trajectory& traj, const TimeGrid& grid);

  /// Throws std::out_of_range if t falls outside the recorded dense steps.
  void eval_into(double t, std::span<double> out) const;
  ProductPoint eval(double t) const;

  const TimeGrid& grid() const { return *grid_; }
  const Trajectory& trajectory() const { return *traj_; }

 private:
  const Trajectory* traj_;
  const TimeGrid* grid_;
};

/// sup_{h in [0, T]} ||z(t+h) - Phi_h(z(t))||_1 sampled on the integrator's
/// step grid, a lower bound for the true sup. Returns 0 for T = 0.
double pseudotrajectory_gap(const InterpolatedPath& path, const Params& params,
                            double t, double T, const FlowConfig& cfg = {});

/// eps(n, T) = sup over k with 0 <= tau_k - tau_n <= T+1 of
/// ||sum_{i=n}^{k-1} eps(i)||_1. Throws std::out_of_range if the record or
/// the grid does not reach the end of the window.
double error_sup(const NoiseRecord& noise, const TimeGrid& grid, std::int64_t n,
                 double T);

/// Smallest k with tau_k - tau_n > T+1. error_sup(n, T) reads eps(n) up to
/// eps(k-2).
std::int64_t error_window_end(const TimeGrid& grid, std::int64_t n, double T);

/// e^{LT} (L T sigma_{m(t+T)} ||F||_D + 2 eps(m(t), T) (L T + 1)).
double gronwall_bound(const Params& params, const TimeGrid& grid, double t,
                      double T, double eps_sup);

struct GapSample {
  std::int64_t n = 0;
  double t = 0.0;        // tau_n
  double gap = 0.0;      // pseudotrajectory_gap(t, T)
  double eps_sup = 0.0;  // error_sup(n, T)
  double bound = 0.0;    // gronwall_bound(t, T, eps_sup)
  bool bound_holds = false;
};

struct GapStudy {
  std::uint64_t seed = 0;
  std::vector<GapSample> samples;  // in the order of `at`
};

/// One run of the chain, long enough to cover every window, with dense
/// trajectory and noise records around each n in `at`; then gap, error and
/// Gronwall bound at t = tau_n with horizon T.
GapStudy gap_study(const Params& params, std::uint64_t seed,
                   std::span<const std::int64_t> at, double T,
                   const FlowConfig& cfg = {});

}  // namespace rwalk
