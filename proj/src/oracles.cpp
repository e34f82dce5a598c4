#include "rwalk/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rwalk/parallel.hpp"
#include "rwalk/rng.hpp"

namespace rwalk {

namespace {

constexpr double kViolationTol = 1e-12;
constexpr std::size_t kChunk = 4096;

void compositions(int parts, int total, int min_part, std::vector<int>& prefix,
                  std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    if (total >= min_part) {
      prefix.push_back(total);
      out.push_back(prefix);
      prefix.pop_back();
    }
    return;
  }
  for (int k = min_part; k <= total - min_part * (parts - 1); ++k) {
    prefix.push_back(k);
    compositions(parts - 1, total - k, min_part, prefix, out);
    prefix.pop_back();
  }
}

double min_of(std::span<const double> u) { return *std::min_element(u.begin(), u.end()); }

double uniform_l1(std::span<const double> u) {
  const double c = 1.0 / static_cast<double>(u.size());
  double s = 0.0;
  for (double x : u) s += std::abs(x - c);
  return s;
}

// Runs fn(rng, count, report) on fixed-size chunks and folds in chunk order.
template <typename Fn, typename Fold>
SweepReport chunked_sweep(std::size_t samples, std::uint64_t seed, int workers,
                          double init, Fn&& fn, Fold&& fold) {
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  auto parts = parallel_map(chunks, workers, [&](std::size_t c) {
    Rng rng(seed, c);
    SweepReport r;
    r.extreme = init;
    r.samples = std::min(kChunk, samples - c * kChunk);
    fn(rng, r.samples, r);
    return r;
  });
  SweepReport total;
  total.extreme = init;
  for (const auto& p : parts) {
    total.samples += p.samples;
    total.violations += p.violations;
    total.extreme = fold(total.extreme, p.extreme);
  }
  return total;
}

double max_fold(double a, double b) { return std::max(a, b); }
double min_fold(double a, double b) { return std::min(a, b); }

}  // namespace

void GridSpec::validate(int d) const {
  if (resolution < 10) throw std::invalid_argument("grid resolution must be >= 10");
  if (!(interior_floor > 0.0)) throw std::invalid_argument("interior floor must be > 0");
  if (interior_floor * d >= 1.0) throw std::invalid_argument("interior floor * d must be < 1");
}

std::vector<std::vector<double>> interior_lattice(int d, const GridSpec& grid) {
  grid.validate(d);
  std::vector<std::vector<int>> ks;
  std::vector<int> prefix;
  compositions(d, grid.resolution, 1, prefix, ks);
  std::vector<std::vector<double>> out;
  for (const auto& k : ks) {
    std::vector<double> u(k.size());
    for (std::size_t i = 0; i < k.size(); ++i)
      u[i] = static_cast<double>(k[i]) / grid.resolution;
    if (min_of(u) >= grid.interior_floor) out.push_back(std::move(u));
  }
  return out;
}

double ratio(std::span<const double> u, double alpha) {
  if (u.empty()) throw std::invalid_argument("ratio: empty vector");
  const double m = min_of(u);
  if (!(m > 0.0)) throw std::domain_error("ratio needs strictly positive coordinates");
  double num = 0.0, den = 0.0;
  for (double x : u) {
    const double q = m / x;
    const double qa = x == m ? 1.0 : std::pow(q, alpha);
    num += qa;
    den += qa * q;
  }
  return m * num / den;
}

double master_margin(std::span<const double> u, std::span<const double> v, double alpha) {
  return 2.0 * joint_support(u, v) - ratio(u, alpha) - ratio(v, alpha);
}

InequalityReport verify_master_grid(int d, double alpha, const GridSpec& grid,
                                     const MasterGridOptions& opts,
                                     const std::function<void(const InequalityRow&)>& sink) {
  const auto start = std::chrono::steady_clock::now();
  const auto lattice = interior_lattice(d, grid);
  if (lattice.empty()) throw std::invalid_argument("empty lattice");
  std::vector<double> ratios(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) ratios[i] = ratio(lattice[i], alpha);

  struct Row {
    double min_margin = std::numeric_limits<double>::infinity();
    std::size_t argmin_v = 0;
    std::size_t violations = 0;
    std::vector<std::size_t> violating_v;
  };
  const std::size_t n = lattice.size();
  auto margin_at = [&](std::size_t i, std::size_t j) {
    return 2.0 * joint_support(lattice[i], lattice[j]) - ratios[i] - ratios[j];
  };
  auto scan_row = [&](std::size_t i) {
    Row r;
    for (std::size_t j = 0; j < n; ++j) {
      const double m = margin_at(i, j);
      if (m < r.min_margin) {
        r.min_margin = m;
        r.argmin_v = j;
      }
      if (m < -kViolationTol) {
        ++r.violations;
        if (r.violating_v.size() < opts.max_violations_kept) r.violating_v.push_back(j);
      }
    }
    return r;
  };
  std::vector<Row> rows;
  if (sink) {
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) sink({lattice[i], lattice[j], margin_at(i, j)});
      rows.push_back(scan_row(i));
    }
  } else {
    rows = parallel_map(n, opts.workers, scan_row);
  }

  InequalityReport rep;
  rep.lattice_points = n;
  rep.points_checked = n * n;
  rep.min_margin = std::numeric_limits<double>::infinity();
  std::size_t best_u = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Row& r = rows[i];
    if (r.min_margin < rep.min_margin) {
      rep.min_margin = r.min_margin;
      best_u = i;
    }
    rep.violation_count += r.violations;
    for (std::size_t j : r.violating_v) {
      if (rep.violations.size() >= opts.max_violations_kept) break;
      rep.violations.push_back({lattice[i], lattice[j], margin_at(i, j)});
    }
  }
  const std::size_t best_v = rows[best_u].argmin_v;
  rep.argmin = {lattice[best_u], lattice[best_v], rep.min_margin};

  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& u : lattice) nearest = std::min(nearest, uniform_l1(u));
  const double tol = 1e-12;
  rep.argmin_adjacent_uniform = uniform_l1(lattice[best_u]) <= nearest + tol &&
                                uniform_l1(lattice[best_v]) <= nearest + tol;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

AlphaReport check_alpha(const Params& params, const GridSpec& grid, int workers) {
  const auto rep = verify_master_grid(params.d, params.alpha, grid, {workers, 0});
  return alpha_large_enough(params, rep.ok());
}

MeanBound mean_bound_check(std::span<const double> a, double alpha) {
  double num = 1.0, den = 1.0;
  for (double x : a) {
    if (!(x > 0.0 && x <= 1.0)) throw std::domain_error("mean bound needs a_i in (0, 1]");
    const double xa = std::pow(x, alpha);
    num += xa;
    den += xa * x;
  }
  MeanBound r;
  r.value = num / den;
  r.bound = std::pow(static_cast<double>(a.size() + 1), 1.0 / (alpha + 1.0));
  r.holds = r.value < r.bound;
  return r;
}

double g_function(std::span<const double> u, double alpha) {
  const double m = min_of(u);
  const double d = static_cast<double>(u.size());
  return 2.0 * m - d * m * m - ratio(u, alpha);
}

LocalMinProbe local_min_probe(int d, double alpha, double radius, std::size_t samples,
                              std::uint64_t seed, int workers) {
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be > 0");
  struct Part {
    double min_g = std::numeric_limits<double>::infinity();
    std::vector<double> argmin;
    std::size_t negative = 0;
    std::size_t samples = 0;
  };
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  const double c = 1.0 / d;
  auto parts = parallel_map(chunks, workers, [&](std::size_t k) {
    Rng rng(seed, k);
    Part p;
    p.samples = std::min(kChunk, samples - k * kChunk);
    std::vector<double> u(static_cast<std::size_t>(d));
    for (std::size_t s = 0; s < p.samples; ++s) {
      while (true) {
        const auto dir = sample_simplex(d, rng);
        const double dist = uniform_l1(dir);
        const double target = radius * rng.uniform();
        if (!(dist > 0.0)) continue;
        const double lambda = target / dist;
        if (lambda >= 1.0) continue;
        for (int i = 0; i < d; ++i) u[i] = (1.0 - lambda) * c + lambda * dir[i];
        break;
      }
      const double g = g_function(u, alpha);
      if (g < p.min_g) {
        p.min_g = g;
        p.argmin = u;
      }
      if (g < -kViolationTol) ++p.negative;
    }
    return p;
  });
  LocalMinProbe r;
  r.min_g = std::numeric_limits<double>::infinity();
  r.hypothesis = alpha > d - 2;
  for (const auto& p : parts) {
    r.samples += p.samples;
    r.negative += p.negative;
    if (p.min_g < r.min_g) {
      r.min_g = p.min_g;
      r.argmin = p.argmin;
    }
  }
  return r;
}

double far_from_uniform_threshold(int d, double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("kappa must lie in (0, 1)");
  return std::log(static_cast<double>(d)) / std::log(2.0 - kappa) - 1.0;
}

FarFromUniform far_from_uniform_check(std::span<const double> u, double alpha, double kappa) {
  const int d = static_cast<int>(u.size());
  FarFromUniform r;
  r.threshold = far_from_uniform_threshold(d, kappa);
  const double m = min_of(u);
  r.lhs = 2.0 * m - d * m * m;
  r.ratio = ratio(u, alpha);
  r.intermediate_bound = std::pow(static_cast<double>(d), 1.0 / (alpha + 1.0)) * m;
  r.inequality = r.lhs > r.ratio;
  r.intermediate = r.ratio <= r.intermediate_bound;
  if (!(m < kappa / d)) {
    r.reason = "min u >= kappa/d";
  } else if (!(alpha >= r.threshold)) {
    r.reason = "alpha below the far-from-uniform threshold";
  } else {
    r.applicable = true;
  }
  return r;
}

Rearrangement rearrangement_bound(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("dimension mismatch");
  const double mu = min_of(u), mv = min_of(v);
  Rearrangement r;
  r.lhs = joint_support(u, v);
  r.rhs = mu + mv - static_cast<double>(u.size()) * mu * mv;
  r.holds = r.lhs >= r.rhs - kViolationTol;
  return r;
}

SweepReport mean_bound_sweep(int d, double alpha, std::size_t samples, std::uint64_t seed,
                             int workers) {
  return chunked_sweep(
      samples, seed, workers, 0.0,
      [&](Rng& rng, std::size_t count, SweepReport& r) {
        std::vector<double> a(static_cast<std::size_t>(d - 1));
        for (std::size_t s = 0; s < count; ++s) {
          for (double& x : a) x = 1.0 - rng.uniform();  // (0, 1]
          const auto mb = mean_bound_check(a, alpha);
          if (!mb.holds) ++r.violations;
          r.extreme = std::max(r.extreme, mb.value / mb.bound);
        }
      },
      max_fold);
}

SweepReport rearrangement_sweep(int d, std::size_t samples, std::uint64_t seed, int workers) {
  return chunked_sweep(
      samples, seed, workers, std::numeric_limits<double>::infinity(),
      [&](Rng& rng, std::size_t count, SweepReport& r) {
        for (std::size_t s = 0; s < count; ++s) {
          const auto u = sample_simplex(d, rng);
          const auto v = sample_simplex(d, rng);
          const auto rb = rearrangement_bound(u, v);
          if (!rb.holds) ++r.violations;
          r.extreme = std::min(r.extreme, rb.lhs - rb.rhs);
        }
      },
      min_fold);
}

SweepReport ratio_monotone_sweep(int d, std::span<const double> alphas, std::size_t samples,
                                 std::uint64_t seed, int workers) {
  std::vector<double> sorted(alphas.begin(), alphas.end());
  std::sort(sorted.begin(), sorted.end());
  return chunked_sweep(
      samples, seed, workers, -std::numeric_limits<double>::infinity(),
      [&](Rng& rng, std::size_t count, SweepReport& r) {
        for (std::size_t s = 0; s < count; ++s) {
          const auto u = sample_simplex(d, rng);
          if (!(min_of(u) > 0.0)) continue;
          for (std::size_t k = 1; k < sorted.size(); ++k) {
            const double lo = ratio(u, sorted[k - 1]);
            const double hi = ratio(u, sorted[k]);
            r.extreme = std::max(r.extreme, hi - lo);
            if (hi > lo * (1.0 + 1e-12)) ++r.violations;
          }
        }
      },
      max_fold);
}

SweepReport intermediate_bound_sweep(int d, double alpha, std::size_t samples,
                                     std::uint64_t seed, int workers) {
  const double bound = std::pow(static_cast<double>(d), 1.0 / (alpha + 1.0));
  return chunked_sweep(
      samples, seed, workers, 0.0,
      [&](Rng& rng, std::size_t count, SweepReport& r) {
        for (std::size_t s = 0; s < count; ++s) {
          const auto u = sample_simplex(d, rng);
          const double m = min_of(u);
          if (!(m > 0.0)) continue;
          const double q = ratio(u, alpha) / m;
          if (!(q < bound)) ++r.violations;
          r.extreme = std::max(r.extreme, q / bound);
        }
      },
      max_fold);
}

FarCoverage far_from_uniform_grid(int d, double alpha, double kappa, const GridSpec& grid) {
  FarCoverage c;
  c.threshold = far_from_uniform_threshold(d, kappa);
  for (const auto& u : interior_lattice(d, grid)) {
    ++c.lattice_points;
    const auto r = far_from_uniform_check(u, alpha, kappa);
    if (r.applicable) {
      ++c.applicable;
      if (!r.ok()) ++c.failures;
    }
  }
  return c;
}

}  // namespace rwalk
