#include "rwalk/walk.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "rwalk/flow.hpp"
#include "rwalk/parallel.hpp"

namespace rwalk {

namespace {

std::atomic<bool> warned_unnormalized{false};

void warn_unnormalized(const Params& params) {
  if (!warned_unnormalized.exchange(true)) {
    std::clog << "warning: n0=" << params.n0 << " differs from d=" << params.d
              << "; occupation measures are renormalized\n";
  }
}

// Buffers for the hot loop: raw occupation, the two laws and the noise.
class Stepper {
 public:
  explicit Stepper(const Params& params)
      : params_(params),
        d_(static_cast<std::size_t>(params.d)),
        z_(2 * d_),
        law_x_(d_),
        law_y_(d_),
        eps_(2 * d_) {}

  // Advances the state with the given uniforms; fills eps().
  void advance(WalkState& s, double ux, double uy) {
    raw_occupation(s, params_, z_);
    const std::span<const double> z(z_);
    kernel_into(z.subspan(d_, d_), params_, law_x_);  // X follows pi(y)
    kernel_into(z.first(d_), params_, law_y_);        // Y follows pi(x)
    const int i = sample_categorical(law_x_, ux);
    const int j = sample_categorical(law_y_, uy);
    const double scale =
        1.0 / static_cast<double>(s.n + 1 + params_.n0);
    for (std::size_t k = 0; k < d_; ++k) {
      eps_[k] = ((static_cast<int>(k) == i ? 1.0 : 0.0) - law_x_[k]) * scale;
      eps_[d_ + k] = ((static_cast<int>(k) == j ? 1.0 : 0.0) - law_y_[k]) * scale;
    }
    ++s.counts_x[static_cast<std::size_t>(i)];
    ++s.counts_y[static_cast<std::size_t>(j)];
    s.pos_x = i;
    s.pos_y = j;
    ++s.n;
  }

  std::span<const double> eps() const { return eps_; }
  // Raw z(n) used for the last transition.
  std::span<const double> last_occupation() const { return z_; }

 private:
  Params params_;
  std::size_t d_;
  std::vector<double> z_, law_x_, law_y_, eps_;
};

NoiseSample to_sample(std::span<const double> eps, std::size_t d,
                      std::int64_t step) {
  NoiseSample s;
  s.eps_x.assign(eps.begin(), eps.begin() + static_cast<long>(d));
  s.eps_y.assign(eps.begin() + static_cast<long>(d), eps.end());
  s.step = step;
  return s;
}

void renormalize_blocks(std::span<double> z, std::size_t d) {
  for (std::size_t b = 0; b < 2; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += z[b * d + i];
    for (std::size_t i = 0; i < d; ++i) z[b * d + i] /= s;
  }
}

}  // namespace

WalkState init(const Params& params, int pos_x0, int pos_y0) {
  if (pos_x0 < 0 || pos_x0 >= params.d || pos_y0 < 0 || pos_y0 >= params.d)
    throw std::out_of_range("initial position outside 0..d-1");
  WalkState s;
  s.pos_x = pos_x0;
  s.pos_y = pos_y0;
  s.counts_x.assign(static_cast<std::size_t>(params.d), 1);
  s.counts_y.assign(static_cast<std::size_t>(params.d), 1);
  s.n = 0;
  return s;
}

void raw_occupation(const WalkState& state, const Params& params,
                    std::span<double> out) {
  const std::size_t d = state.counts_x.size();
  if (out.size() != 2 * d) throw std::invalid_argument("raw_occupation: size");
  const double denom = static_cast<double>(state.n + params.n0);
  for (std::size_t i = 0; i < d; ++i) {
    out[i] = static_cast<double>(state.counts_x[i]) / denom;
    out[d + i] = static_cast<double>(state.counts_y[i]) / denom;
  }
}

ProductPoint occupation(const WalkState& state, const Params& params) {
  std::vector<double> z(2 * state.counts_x.size());
  raw_occupation(state, params, z);
  if (params.n0 != params.d) {
    warn_unnormalized(params);
    renormalize_blocks(z, state.counts_x.size());
  }
  return ProductPoint::from_flat(z);
}

std::pair<std::vector<double>, std::vector<double>> step_laws(
    const WalkState& state, const Params& params) {
  const std::size_t d = state.counts_x.size();
  std::vector<double> z(2 * d);
  raw_occupation(state, params, z);
  std::vector<double> law_x(d), law_y(d);
  const std::span<const double> zs(z);
  kernel_into(zs.subspan(d, d), params, law_x);
  kernel_into(zs.first(d), params, law_y);
  return {std::move(law_x), std::move(law_y)};
}

NoiseSample step(WalkState& state, const Params& params, Rng& rng) {
  const double ux = rng.uniform();
  const double uy = rng.uniform();
  return step_with(state, params, ux, uy);
}

NoiseSample step_with(WalkState& state, const Params& params, double ux, double uy) {
  Stepper stepper(params);
  const std::int64_t n = state.n;
  stepper.advance(state, ux, uy);
  return to_sample(stepper.eps(), state.counts_x.size(), n);
}

Trajectory::Trajectory(Params params, std::uint64_t seed, std::int64_t thinning)
    : params_(params), seed_(seed), thinning_(thinning) {}

void Trajectory::append(std::int64_t n, std::span<const double> z) {
  if (z.size() != 2 * static_cast<std::size_t>(params_.d))
    throw std::invalid_argument("Trajectory::append: wrong dimension");
  if (!steps_.empty() && n <= steps_.back())
    throw std::invalid_argument("Trajectory::append: steps must increase");
  const std::size_t d = static_cast<std::size_t>(params_.d);
  const double h = joint_support(z.first(d), z.subspan(d, d));
  steps_.push_back(n);
  coords_.insert(coords_.end(), z.begin(), z.end());
  h_.push_back(h);
  inside_.push_back(in_s_delta(h, params_) ? 1 : 0);
}

std::span<const double> Trajectory::flat_at(std::size_t i) const {
  const std::size_t w = 2 * static_cast<std::size_t>(params_.d);
  return std::span<const double>(coords_).subspan(i * w, w);
}

std::ptrdiff_t Trajectory::find_step(std::int64_t n) const {
  auto it = std::lower_bound(steps_.begin(), steps_.end(), n);
  if (it == steps_.end() || *it != n) return -1;
  return it - steps_.begin();
}

NoiseRecord::NoiseRecord(int d, std::int64_t first_step)
    : d_(d), first_(first_step) {}

void NoiseRecord::append(const NoiseSample& s) {
  if (s.step != end_step())
    throw std::invalid_argument("NoiseRecord::append: steps must be contiguous");
  values_.insert(values_.end(), s.eps_x.begin(), s.eps_x.end());
  values_.insert(values_.end(), s.eps_y.begin(), s.eps_y.end());
}

void NoiseRecord::append(std::int64_t step, std::span<const double> eps) {
  if (step != end_step())
    throw std::invalid_argument("NoiseRecord::append: steps must be contiguous");
  if (eps.size() != 2 * static_cast<std::size_t>(d_))
    throw std::invalid_argument("NoiseRecord::append: wrong dimension");
  values_.insert(values_.end(), eps.begin(), eps.end());
}

std::span<const double> NoiseRecord::at(std::int64_t n) const {
  if (!covers(n)) throw std::out_of_range("noise not recorded for this step");
  const std::size_t w = 2 * static_cast<std::size_t>(d_);
  return std::span<const double>(values_).subspan(
      static_cast<std::size_t>(n - first_) * w, w);
}

RunResult run(const Params& params, std::int64_t n_steps, std::uint64_t seed,
              const RunOptions& options) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (options.thinning < 1) throw std::invalid_argument("thinning must be >= 1");
  if (!(options.tail_fraction > 0.0 && options.tail_fraction <= 1.0))
    throw std::invalid_argument("tail_fraction must lie in (0, 1]");

  const std::size_t d = static_cast<std::size_t>(params.d);
  Rng rng(seed);
  const int px = options.pos_x0 >= 0 ? options.pos_x0 : rng.below(params.d);
  const int py = options.pos_y0 >= 0 ? options.pos_y0 : rng.below(params.d);
  WalkState state = init(params, px, py);
  if (params.n0 != params.d) warn_unnormalized(params);

  RunResult result;
  result.trajectory = Trajectory(params, seed, options.thinning);
  const std::int64_t noise_first = std::max<std::int64_t>(0, options.noise_begin);
  if (options.record_noise) result.noise = NoiseRecord(params.d, noise_first);

  std::vector<double> z(2 * d), z_next(2 * d), field(2 * d), martingale(2 * d, 0.0),
      tail_anchor;
  auto record = [&](std::span<const double> raw) {
    if (params.n0 == params.d) {
      result.trajectory.append(state.n, raw);
    } else {
      std::vector<double> normed(raw.begin(), raw.end());
      renormalize_blocks(normed, d);
      result.trajectory.append(state.n, normed);
    }
  };
  auto in_dense_window = [&](std::int64_t n) {
    for (const auto& [lo, hi] : options.dense_windows)
      if (n >= lo && n <= hi) return true;
    return false;
  };

  const auto tail_start = static_cast<std::int64_t>(
      std::ceil((1.0 - options.tail_fraction) * static_cast<double>(n_steps)));
  double sup_tail = 0.0;
  double max_residual = 0.0;

  Stepper stepper(params);
  raw_occupation(state, params, z);
  record(z);
  if (tail_start == 0) tail_anchor = martingale;

  while (state.n < n_steps) {
    const std::int64_t n = state.n;
    if (options.check_decomposition) vector_field_into(z, params, field);
    const double ux = rng.uniform();
    const double uy = rng.uniform();
    stepper.advance(state, ux, uy);
    const auto eps = stepper.eps();

    for (std::size_t k = 0; k < 2 * d; ++k) martingale[k] += eps[k];
    if (state.n == tail_start) tail_anchor = martingale;
    if (!tail_anchor.empty())
      sup_tail = std::max(sup_tail, l1_distance(martingale, tail_anchor));

    if (options.record_noise && n >= noise_first && n < options.noise_end)
      result.noise.append(n, eps);

    raw_occupation(state, params, z_next);
    if (options.check_decomposition) {
      const double step_size = 1.0 / static_cast<double>(n + 1 + params.n0);
      double residual = 0.0;
      for (std::size_t k = 0; k < 2 * d; ++k)
        residual += std::abs(z_next[k] - z[k] - step_size * field[k] - eps[k]);
      max_residual = std::max(max_residual, residual);
    }
    std::swap(z, z_next);

    if (state.n % options.thinning == 0 || state.n == n_steps ||
        in_dense_window(state.n))
      record(z);
  }

  RunSummary& s = result.summary;
  const auto& traj = result.trajectory;
  const ProductPoint final_point = traj.point_at(traj.size() - 1);
  s.seed = seed;
  s.n_steps = n_steps;
  s.final_h = traj.h_at(traj.size() - 1);
  s.trapped = trapped_in_s_delta(traj, options.tail_fraction);
  s.dist_to_uniform = distance_to_uniform(final_point);
  s.martingale_sup_tail = sup_tail;
  s.max_decomposition_residual = max_residual;
  return result;
}

bool trapped_in_s_delta(const Trajectory& traj, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw std::invalid_argument("tail_fraction must lie in (0, 1]");
  if (traj.empty()) throw std::invalid_argument("empty trajectory");
  const auto last = traj.step_at(traj.size() - 1);
  const double cutoff = (1.0 - tail_fraction) * static_cast<double>(last);
  std::size_t in_tail = 0;
  for (std::size_t i = traj.size(); i-- > 0;) {
    if (static_cast<double>(traj.step_at(i)) < cutoff) break;
    ++in_tail;
    if (!traj.in_s_delta_at(i)) return false;
  }
  if (in_tail == 0) throw std::invalid_argument("empty tail");
  return true;
}

MartingaleStats martingale_partial_sums(const NoiseRecord& noise,
                                        std::int64_t stride,
                                        std::span<const std::int64_t> oscillation_at) {
  if (noise.size() == 0) throw std::invalid_argument("noise was not recorded");
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  const std::size_t w = 2 * static_cast<std::size_t>(noise.d());
  const std::size_t dd = static_cast<std::size_t>(noise.d());
  MartingaleStats st;

  // prefix[k] = M after k recorded terms.
  std::vector<std::vector<double>> anchors;
  std::vector<double> sups(oscillation_at.size(), 0.0);
  std::vector<bool> anchored(oscillation_at.size(), false);
  std::vector<double> m(w, 0.0);
  for (std::int64_t n = noise.first_step(); n <= noise.end_step(); ++n) {
    // m holds sum_{first <= i < n} eps(i).
    for (std::size_t a = 0; a < oscillation_at.size(); ++a) {
      if (oscillation_at[a] == n) {
        anchors.resize(oscillation_at.size());
        anchors[a] = m;
        anchored[a] = true;
      }
      if (anchored[a]) sups[a] = std::max(sups[a], l1_distance(m, anchors[a]));
    }
    if ((n - noise.first_step()) % stride == 0 || n == noise.end_step()) {
      double norm = 0.0;
      for (double c : m) norm += std::abs(c);
      st.partial_norms.emplace_back(n, norm);
    }
    if (n == noise.end_step()) break;
    const auto eps = noise.at(n);
    double l1 = 0.0, bx = 0.0, by = 0.0;
    for (std::size_t k = 0; k < w; ++k) {
      m[k] += eps[k];
      l1 += std::abs(eps[k]);
      (k < dd ? bx : by) += eps[k];
    }
    st.quadratic_variation += l1 * l1;
    st.max_block_sum = std::max({st.max_block_sum, std::abs(bx), std::abs(by)});
  }
  for (std::size_t a = 0; a < oscillation_at.size(); ++a) {
    if (!anchored[a])
      throw std::out_of_range("oscillation anchor outside the noise record");
    st.tail_oscillation.emplace_back(oscillation_at[a], sups[a]);
  }
  return st;
}

double quadratic_variation(const NoiseRecord& noise, std::int64_t from,
                           std::int64_t to) {
  double qv = 0.0;
  for (std::int64_t n = from; n < to; ++n) {
    double l1 = 0.0;
    for (double c : noise.at(n)) l1 += std::abs(c);
    qv += l1 * l1;
  }
  return qv;
}

double noise_l1_bound(std::int64_t i, const Params& params) {
  return 4.0 / static_cast<double>(i + 1 + params.n0);
}

double tangent_max_coordinate_floor(int d) {
  return 1.0 / ((d - 1) * std::sqrt(2.0 * d));
}

double noise_positivity_probe(const WalkState& state, std::span<const double> theta,
                              const Params& params) {
  const std::size_t d = static_cast<std::size_t>(params.d);
  if (theta.size() != 2 * d) throw std::domain_error("theta has wrong dimension");
  double sx = 0.0, sy = 0.0, norm2 = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    sx += theta[k];
    sy += theta[d + k];
  }
  for (double t : theta) norm2 += t * t;
  if (std::abs(sx) > 1e-10 || std::abs(sy) > 1e-10)
    throw std::domain_error("theta is not tangent to D (block sums nonzero)");
  if (std::abs(norm2 - 1.0) > 1e-9) throw std::domain_error("theta is not a unit vector");

  const auto [law_x, law_y] = step_laws(state, params);
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    mean_x += law_x[k] * theta[k];
    mean_y += law_y[k] * theta[d + k];
  }
  double expectation = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double value = theta[i] + theta[d + j] - mean_x - mean_y;
      if (value > 0.0) expectation += law_x[i] * law_y[j] * value;
    }
  }
  return expectation;
}

McReport monte_carlo(const Params& params, const McConfig& cfg) {
  if (cfg.runs < 1) throw std::invalid_argument("runs must be >= 1");
  McReport rep;
  rep.runs = cfg.runs;
  rep.summaries = parallel_map(
      static_cast<std::size_t>(cfg.runs), cfg.workers, [&](std::size_t k) {
        return run(params, cfg.n_steps, cfg.base_seed + k, cfg.options).summary;
      });
  std::size_t trapped = 0, near = 0;
  double h_sum = 0.0;
  for (const auto& s : rep.summaries) {
    trapped += s.trapped ? 1 : 0;
    near += s.dist_to_uniform < cfg.near_uniform_radius ? 1 : 0;
    h_sum += s.final_h;
  }
  const double runs = static_cast<double>(cfg.runs);
  rep.trapped_rate = static_cast<double>(trapped) / runs;
  rep.near_uniform_rate = static_cast<double>(near) / runs;
  rep.mean_final_h = h_sum / runs;
  return rep;
}

}  // namespace rwalk
