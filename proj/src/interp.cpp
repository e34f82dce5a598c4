#include "rwalk/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rwalk {

TimeGrid::TimeGrid(int n0, std::int64_t max_n) : n0_(n0) {
  if (n0 < 1) throw std::invalid_argument("n0 must be >= 1");
  if (max_n < 0) throw std::invalid_argument("max_n must be >= 0");
  tau_.resize(static_cast<std::size_t>(max_n) + 1);
  tau_[0] = 0.0;
  for (std::int64_t k = 1; k <= max_n; ++k)
    tau_[static_cast<std::size_t>(k)] = tau_[static_cast<std::size_t>(k - 1)] + sigma(k);
}

double TimeGrid::tau(std::int64_t n) const {
  if (n < 0 || n > max_n()) throw std::out_of_range("tau: n outside the grid");
  return tau_[static_cast<std::size_t>(n)];
}

std::int64_t TimeGrid::m_of_t(double t) const {
  if (!(t >= 0.0) || t > tau_.back())
    throw std::out_of_range("m_of_t: t outside [0, tau_max]");
  auto it = std::upper_bound(tau_.begin(), tau_.end(), t);
  return (it - tau_.begin()) - 1;
}

InterpolatedPath::InterpolatedPath(const Trajectory& traj, const TimeGrid& grid)
    : traj_(&traj), grid_(&grid) {
  if (traj.empty()) throw std::invalid_argument("empty trajectory");
  if (grid.n0() != traj.params().n0)
    throw std::invalid_argument("grid and trajectory disagree on N0");
}

void InterpolatedPath::eval_into(double t, std::span<double> out) const {
  const std::int64_t n = grid_->m_of_t(t);
  const std::ptrdiff_t i = traj_->find_step(n);
  if (i < 0)
    throw std::out_of_range("z(t) needs step " + std::to_string(n) +
                            ", which was not recorded");
  const auto a = traj_->flat_at(static_cast<std::size_t>(i));
  if (out.size() != a.size()) throw std::invalid_argument("eval_into: size");
  const double t0 = grid_->tau(n);
  if (t == t0) {
    std::copy(a.begin(), a.end(), out.begin());
    return;
  }
  const std::size_t j = static_cast<std::size_t>(i) + 1;
  if (j >= traj_->size() || traj_->step_at(j) != n + 1)
    throw std::out_of_range("z(t) needs step " + std::to_string(n + 1) +
                            ", which was not recorded");
  const auto b = traj_->flat_at(j);
  const double w = (t - t0) / (grid_->tau(n + 1) - t0);
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = (1.0 - w) * a[k] + w * b[k];
}

ProductPoint InterpolatedPath::eval(double t) const {
  std::vector<double> z(2 * static_cast<std::size_t>(traj_->params().d));
  eval_into(t, z);
  return ProductPoint::from_flat(z);
}

double pseudotrajectory_gap(const InterpolatedPath& path, const Params& params,
                            double t, double T, const FlowConfig& cfg) {
  if (T < 0.0) throw std::invalid_argument("T must be >= 0");
  if (T == 0.0) return 0.0;
  cfg.validate();
  std::vector<double> z(2 * static_cast<std::size_t>(params.d));
  std::vector<double> w(z.size());
  path.eval_into(t, z);
  path.eval_into(t + T, w);  // fail before integrating if the window is short
  Rk4Integrator rk(params, cfg);
  double gap = 0.0;
  rk.integrate(z, T, [&](double h, std::span<const double> phi) {
    path.eval_into(std::min(t + h, t + T), w);
    gap = std::max(gap, l1_distance(w, phi));
  });
  return gap;
}

std::int64_t error_window_end(const TimeGrid& grid, std::int64_t n, double T) {
  const double limit = grid.tau(n) + T + 1.0;
  std::int64_t k = n;
  while (true) {
    if (k + 1 > grid.max_n())
      throw std::out_of_range("time grid too short for the error window");
    if (grid.tau(k + 1) > limit) return k + 1;
    ++k;
  }
}

double error_sup(const NoiseRecord& noise, const TimeGrid& grid, std::int64_t n,
                 double T) {
  if (T < 0.0) throw std::invalid_argument("T must be >= 0");
  const std::int64_t end = error_window_end(grid, n, T);
  // k runs over n..end-1, so eps(i) is needed for i < end - 1.
  if (end - 1 > n && (!noise.covers(n) || !noise.covers(end - 2)))
    throw std::out_of_range("noise record does not cover the error window");
  const std::size_t w = 2 * static_cast<std::size_t>(noise.d());
  std::vector<double> sum(w, 0.0);
  double sup = 0.0;
  for (std::int64_t k = n + 1; k < end; ++k) {
    const auto eps = noise.at(k - 1);
    double norm = 0.0;
    for (std::size_t c = 0; c < w; ++c) {
      sum[c] += eps[c];
      norm += std::abs(sum[c]);
    }
    sup = std::max(sup, norm);
  }
  return sup;
}

double gronwall_bound(const Params& params, const TimeGrid& grid, double t,
                      double T, double eps_sup) {
  const double L = lipschitz_bound(params);
  const double sigma = grid.sigma(grid.m_of_t(t + T));
  return std::exp(L * T) *
         (L * T * sigma * field_sup_bound(params) + 2.0 * eps_sup * (L * T + 1.0));
}

GapStudy gap_study(const Params& params, std::uint64_t seed,
                   std::span<const std::int64_t> at, double T, const FlowConfig& cfg) {
  if (at.empty()) throw std::invalid_argument("gap_study: no sample times");
  if (!(T > 0.0)) throw std::invalid_argument("gap_study: T must be > 0");
  const std::int64_t first = *std::min_element(at.begin(), at.end());
  const std::int64_t last = *std::max_element(at.begin(), at.end());
  if (first < 0) throw std::invalid_argument("gap_study: negative step");
  // tau_k - tau_n ~ log((k+N0)/(n+N0)), so the windows end near (n+N0) e^{T+1}.
  const auto grid_n = static_cast<std::int64_t>(
      std::ceil(static_cast<double>(last + params.n0 + 1) * std::exp(T + 1.0) * 1.05)) + 16;
  const TimeGrid grid(params.n0, grid_n);

  RunOptions opts;
  opts.thinning = std::max<std::int64_t>(1, grid_n);
  opts.record_noise = true;
  opts.noise_begin = first;
  std::int64_t steps = 0;
  for (std::int64_t n : at) {
    const std::int64_t path_end = grid.m_of_t(grid.tau(n) + T) + 1;
    opts.dense_windows.emplace_back(n, path_end);
    steps = std::max({steps, path_end, error_window_end(grid, n, T)});
  }
  opts.noise_end = steps;
  const RunResult res = run(params, steps, seed, opts);
  const InterpolatedPath path(res.trajectory, grid);

  GapStudy study;
  study.seed = seed;
  for (std::int64_t n : at) {
    GapSample s;
    s.n = n;
    s.t = grid.tau(n);
    s.gap = pseudotrajectory_gap(path, params, s.t, T, cfg);
    s.eps_sup = error_sup(res.noise, grid, n, T);
    s.bound = gronwall_bound(params, grid, s.t, T, s.eps_sup);
    s.bound_holds = s.gap <= s.bound;
    study.samples.push_back(s);
  }
  return study;
}

}  // namespace rwalk
