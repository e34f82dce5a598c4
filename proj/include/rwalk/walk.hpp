#pragma once

// The discrete two-particle chain on the complete graph K_d, its
// Robbins-Monro decomposition z(n+1) - z(n) = F(z(n)) / (n+1+N0) + eps(n),
// and Monte Carlo campaigns over independent seeds.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rwalk/model.hpp"
#include "rwalk/rng.hpp"

namespace rwalk {

/// Positions, visit counts N(X, i, n), N(Y, i, n) and the step index n.
/// Vertices are labelled 0..d-1.
struct WalkState {
  int pos_x = 0;
  int pos_y = 0;
  std::vector<std::int64_t> counts_x;
  std::vector<std::int64_t> counts_y;
  std::int64_t n = 0;
};

/// eps^X(n), eps^Y(n): indicator minus kernel, divided by n+1+N0.
struct NoiseSample {
  std::vector<double> eps_x;
  std::vector<double> eps_y;
  std::int64_t step = 0;
};

/// Every count starts at 1. Throws std::out_of_range for a bad vertex.
WalkState init(const Params& params, int pos_x0, int pos_y0);

/// x_i(n) = N(X,i,n)/(n+N0), likewise y. When N0 != d the raw vectors do not
/// sum to one; they are then renormalized and a warning is logged once.
ProductPoint occupation(const WalkState& state, const Params& params);

/// Raw occupation N/(n+N0) written to out (length 2d), without renormalizing.
void raw_occupation(const WalkState& state, const Params& params,
                    std::span<double> out);

/// Kernel pair (pi(y(n)), pi(x(n))): the laws of X_{n+1} and Y_{n+1}.
std::pair<std::vector<double>, std::vector<double>> step_laws(
    const WalkState& state, const Params& params);

/// One transition. X_{n+1} ~ pi(y(n)) and Y_{n+1} ~ pi(x(n)) are drawn
/// independently from the state at time n, one uniform each (X first).
NoiseSample step(WalkState& state, const Params& params, Rng& rng);
/// The same transition driven by explicit uniforms for X and Y.
NoiseSample step_with(WalkState& state, const Params& params, double ux, double uy);

/// Retained samples of a run, stored column-wise.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(Params params, std::uint64_t seed, std::int64_t thinning);

  const Params& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  std::int64_t thinning() const { return thinning_; }

  /// Appends z(n). Throws std::invalid_argument unless n increases.
  void append(std::int64_t n, std::span<const double> z);

  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  std::int64_t step_at(std::size_t i) const { return steps_[i]; }
  std::span<const double> flat_at(std::size_t i) const;
  ProductPoint point_at(std::size_t i) const { return ProductPoint::from_flat(flat_at(i)); }
  double h_at(std::size_t i) const { return h_[i]; }
  bool in_s_delta_at(std::size_t i) const { return inside_[i] != 0; }
  /// Index of the sample recorded at step n, if any.
  std::ptrdiff_t find_step(std::int64_t n) const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  Params params_;
  std::uint64_t seed_ = 0;
  std::int64_t thinning_ = 1;
  std::vector<std::int64_t> steps_;
  std::vector<double> coords_;
  std::vector<double> h_;
  std::vector<std::uint8_t> inside_;
};

/// eps(n) for a contiguous range of steps, 2d values per step.
class NoiseRecord {
 public:
  NoiseRecord() = default;
  NoiseRecord(int d, std::int64_t first_step);

  void append(const NoiseSample& s);
  /// eps(step) as a flat (eps_x, eps_y) array.
  void append(std::int64_t step, std::span<const double> eps);
  int d() const { return d_; }
  std::int64_t first_step() const { return first_; }
  std::int64_t end_step() const { return first_ + static_cast<std::int64_t>(size()); }
  std::size_t size() const { return d_ == 0 ? 0 : values_.size() / (2 * static_cast<std::size_t>(d_)); }
  bool covers(std::int64_t n) const { return n >= first_ && n < end_step(); }
  /// eps(n) as a flat (eps_x, eps_y) span. Throws std::out_of_range.
  std::span<const double> at(std::int64_t n) const;

 private:
  int d_ = 0;
  std::int64_t first_ = 0;
  std::vector<double> values_;
};

struct RunOptions {
  std::int64_t thinning = 100;
  double tail_fraction = 0.1;
  /// Steps in [begin, end] are all retained, whatever the thinning.
  std::vector<std::pair<std::int64_t, std::int64_t>> dense_windows;
  bool record_noise = false;
  /// Noise is kept for steps in [noise_begin, noise_end).
  std::int64_t noise_begin = 0;
  std::int64_t noise_end = INT64_MAX;
  /// Checks the Robbins-Monro identity on every step.
  bool check_decomposition = false;
  /// Initial vertices; negative values draw them from the run's stream.
  int pos_x0 = -1;
  int pos_y0 = -1;
};

struct RunSummary {
  std::uint64_t seed = 0;
  std::int64_t n_steps = 0;
  double final_h = 0.0;
  bool trapped = false;
  double dist_to_uniform = 0.0;
  /// sup over the tail of ||M_m - M_{tail start}||_1.
  double martingale_sup_tail = 0.0;
  /// Largest L1 residual of the decomposition identity (0 if unchecked).
  double max_decomposition_residual = 0.0;
};

struct RunResult {
  Trajectory trajectory;
  RunSummary summary;
  NoiseRecord noise;
};

/// A full run from uniform counts. Deterministic in (params, seed, options).
/// Records n = 0, every `thinning`-th step, all steps in dense windows, and the
/// final step. Throws std::invalid_argument if n_steps < 1.
RunResult run(const Params& params, std::int64_t n_steps, std::uint64_t seed,
              const RunOptions& options = {});

/// True iff every sample with step >= (1 - tail_fraction) * last step lies in
/// S^delta. Throws if tail_fraction is outside (0, 1] or the tail is empty.
bool trapped_in_s_delta(const Trajectory& traj, double tail_fraction);

struct MartingaleStats {
  std::vector<std::pair<std::int64_t, double>> partial_norms;  // (n, ||M_n||_1)
  std::vector<std::pair<std::int64_t, double>> tail_oscillation;  // (n, sup_{m>=n} ||M_m - M_n||_1)
  double quadratic_variation = 0.0;  // sum ||eps(i)||_1^2 over the record
  double max_block_sum = 0.0;        // max |sum_i eps_i| over blocks and steps
};

/// Partial sums M_n = sum_{i<n} eps(i) over the record, reported every
/// `stride` steps, with tail oscillations at the requested steps. Throws
/// std::invalid_argument on an empty record.
MartingaleStats martingale_partial_sums(const NoiseRecord& noise,
                                        std::int64_t stride,
                                        std::span<const std::int64_t> oscillation_at = {});

/// Quadratic variation sum_{i in [from, to)} ||eps(i)||_1^2 of a record.
double quadratic_variation(const NoiseRecord& noise, std::int64_t from,
                           std::int64_t to);

/// Per-step bound ||eps(i)||_1 <= 4 / (i+1+N0).
double noise_l1_bound(std::int64_t i, const Params& params);

/// max_k theta_k >= 1 / ((d-1) sqrt(2d)) for unit theta in TD.
double tangent_max_coordinate_floor(int d);

/// (n+1+N0) E[(eps(n) . theta)^+ | F_n], by enumerating all d^2 outcomes.
/// theta must have both d-blocks summing to 0 and unit L2 norm, else
/// std::domain_error.
double noise_positivity_probe(const WalkState& state, std::span<const double> theta,
                              const Params& params);

struct McConfig {
  int runs = 1;
  std::int64_t n_steps = 1000;
  std::uint64_t base_seed = 1;
  int workers = 0;
  RunOptions options;
  double near_uniform_radius = 0.01;
};

struct McReport {
  int runs = 0;
  double trapped_rate = 0.0;
  double mean_final_h = 0.0;
  double near_uniform_rate = 0.0;
  std::vector<RunSummary> summaries;  // in run order
};

/// Independent runs with seeds base_seed + k. Aggregates are a fold over the
/// summaries in run order, so they do not depend on the worker count.
McReport monte_carlo(const Params& params, const McConfig& cfg);

}  // namespace rwalk
