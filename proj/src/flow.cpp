#include "rwalk/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rwalk/parallel.hpp"

namespace rwalk {

void FlowConfig::validate() const {
  if (!(step > 0.0)) throw std::invalid_argument("flow step must be positive");
  if (!(max_time > 0.0)) throw std::invalid_argument("max_time must be positive");
}

void vector_field_into(std::span<const double> z, const Params& params,
                       std::span<double> out) {
  const std::size_t d = z.size() / 2;
  if (out.size() != z.size()) throw std::invalid_argument("vector_field: size");
  auto u = z.first(d);
  auto v = z.subspan(d, d);
  // pi(v) drives u and pi(u) drives v.
  kernel_into(v, params, out.first(d));
  kernel_into(u, params, out.subspan(d, d));
  for (std::size_t i = 0; i < 2 * d; ++i) out[i] -= z[i];
}

std::vector<double> vector_field(const ProductPoint& z, const Params& params) {
  const auto flat = z.flat();
  std::vector<double> out(flat.size());
  vector_field_into(flat, params, out);
  return out;
}

double lipschitz_bound(const Params& params) {
  return 1.0 + params.alpha / (2.0 * params.delta);
}

double field_sup_bound(const Params&) { return 4.0; }

Rk4Integrator::Rk4Integrator(const Params& params, const FlowConfig& cfg)
    : params_(params), cfg_(cfg) {
  cfg_.validate();
}

void Rk4Integrator::step(std::span<double> z, double h) {
  const std::size_t n = z.size();
  for (auto* buf : {&k1_, &k2_, &k3_, &k4_, &tmp_}) buf->resize(n);

  vector_field_into(z, params_, k1_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = z[i] + 0.5 * h * k1_[i];
  vector_field_into(tmp_, params_, k2_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = z[i] + 0.5 * h * k2_[i];
  vector_field_into(tmp_, params_, k3_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = z[i] + h * k3_[i];
  vector_field_into(tmp_, params_, k4_);
  for (std::size_t i = 0; i < n; ++i)
    z[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);

  if (cfg_.renormalize) {
    const std::size_t d = n / 2;
    for (std::size_t b = 0; b < 2; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += z[b * d + i];
      max_renorm_ = std::max(max_renorm_, std::abs(s - 1.0));
      for (std::size_t i = 0; i < d; ++i) z[b * d + i] /= s;
    }
  }
}

void Rk4Integrator::integrate(
    std::span<double> z, double t,
    const std::function<void(double, std::span<const double>)>& observer) {
  if (t < 0.0) throw std::invalid_argument("integrate: negative time");
  if (observer) observer(0.0, z);
  if (t == 0.0) return;
  const auto steps = static_cast<long>(std::ceil(t / cfg_.step - 1e-9));
  const double h = t / static_cast<double>(steps);
  for (long k = 1; k <= steps; ++k) {
    step(z, h);
    if (observer) observer(k == steps ? t : static_cast<double>(k) * h, z);
  }
}

ProductPoint integrate(const ProductPoint& z0, double t, const FlowConfig& cfg,
                       const Params& params) {
  auto z = z0.flat();
  Rk4Integrator rk(params, cfg);
  rk.integrate(z, t, [](double, std::span<const double> s) {
    for (double c : s)
      if (c < -1e-9)
        throw std::runtime_error("integrator left the domain; step too large?");
  });
  return ProductPoint::from_flat(z);
}

InvarianceReport check_invariance(const ProductPoint& z0, double T,
                                  const FlowConfig& cfg, const Params& params) {
  InvarianceReport r;
  const double da = std::pow(params.delta, params.alpha);
  r.inflow_lower_bound = da / (da + (params.d - 1));

  auto z = z0.flat();
  std::vector<double> f(z.size());
  vector_field_into(z, params, f);
  r.min_initial_inflow = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] == 0.0) {
      ++r.zero_coordinates;
      r.min_initial_inflow = std::min(r.min_initial_inflow, f[i]);
      if (!(f[i] > 0.0)) r.zero_coordinates_increase = false;
    }
  }
  if (r.zero_coordinates == 0) r.min_initial_inflow = 0.0;

  Rk4Integrator rk(params, cfg);
  rk.integrate(z, T, [&](double, std::span<const double> s) {
    for (double c : s) r.min_coordinate = std::min(r.min_coordinate, c);
  });
  r.stays_in_domain = r.min_coordinate >= -1e-9;
  return r;
}

double floored_weighted_mean(std::span<const double> u, const Params& params) {
  double m = 1.0;
  for (double c : u) m = std::min(m, c <= params.delta ? params.delta : c);
  double num = 0.0, den = 0.0;
  for (double c : u) {
    const double f = c <= params.delta ? params.delta : c;
    const double w = f == m ? 1.0 : std::pow(m / f, params.alpha);
    num += c * w;
    den += w;
  }
  return num / den;
}

double dH_dt(std::span<const double> u, std::span<const double> v,
             const Params& params) {
  return -2.0 * joint_support(u, v) + floored_weighted_mean(u, params) +
         floored_weighted_mean(v, params);
}

double dH_dt(const ProductPoint& z, const Params& params) {
  return dH_dt(z.x.coords(), z.y.coords(), params);
}

std::string to_string(Region r) {
  switch (r) {
    case Region::BelowThreshold: return "below_threshold";
    case Region::Case1: return "case1";
    case Region::Case2: return "case2";
    case Region::Case3: return "case3";
  }
  return "unknown";
}

namespace {

double min_floored(std::span<const double> u, double delta) {
  double m = std::numeric_limits<double>::infinity();
  for (double c : u) m = std::min(m, c <= delta ? delta : c);
  return m;
}

Region classify_unthresholded(double mu, double mv, double delta) {
  if (mu > delta && mv > delta) return Region::Case1;
  if ((mu == delta && mv > 2.0 * delta) || (mv == delta && mu > 2.0 * delta))
    return Region::Case2;
  return Region::Case3;
}

}  // namespace

Region region_classify(std::span<const double> u, std::span<const double> v,
                       const Params& params) {
  if (joint_support(u, v) < params.lyapunov_threshold())
    return Region::BelowThreshold;
  return classify_unthresholded(min_floored(u, params.delta),
                                min_floored(v, params.delta), params.delta);
}

Region region_classify(const ProductPoint& z, const Params& params) {
  return region_classify(z.x.coords(), z.y.coords(), params);
}

namespace {

void compositions(int d, int total, std::vector<int>& k, int pos,
                  std::vector<std::vector<int>>& out) {
  if (pos == d - 1) {
    k[static_cast<std::size_t>(pos)] = total;
    out.push_back(k);
    return;
  }
  for (int c = 0; c <= total; ++c) {
    k[static_cast<std::size_t>(pos)] = c;
    compositions(d, total - c, k, pos + 1, out);
  }
}

}  // namespace

std::vector<std::vector<double>> offset_lattice(int d, int resolution,
                                                double floor) {
  if (d < 2 || resolution < 1) throw std::invalid_argument("lattice size");
  if (!(floor >= 0.0) || !(floor * d < 1.0))
    throw std::invalid_argument("lattice floor must satisfy 0 <= floor < 1/d");
  std::vector<std::vector<int>> ks;
  std::vector<int> k(static_cast<std::size_t>(d));
  compositions(d, resolution, k, 0, ks);
  const double span = 1.0 - d * floor;
  std::vector<std::vector<double>> pts;
  pts.reserve(ks.size());
  for (const auto& comp : ks) {
    std::vector<double> u(comp.size());
    for (std::size_t i = 0; i < comp.size(); ++i)
      u[i] = floor + span * comp[i] / resolution;
    pts.push_back(std::move(u));
  }
  return pts;
}

namespace {

struct ScanPartial {
  std::size_t pairs_in_region = 0;
  std::size_t violation_count = 0;
  std::vector<ScanRow> violations;
  bool has_max = false;
  ScanRow argmax;
};

}  // namespace

LyapunovScanReport lyapunov_scan(
    const Params& params, const ScanConfig& cfg,
    const std::function<void(const ScanRow&)>& sink) {
  const auto pts = offset_lattice(params.d, cfg.resolution, cfg.floor);
  const std::size_t n = pts.size();
  std::vector<double> wmean(n), fmin(n);
  for (std::size_t i = 0; i < n; ++i) {
    wmean[i] = floored_weighted_mean(pts[i], params);
    fmin[i] = min_floored(pts[i], params.delta);
  }
  const double threshold = params.lyapunov_threshold();

  auto scan_row = [&](std::size_t i) {
    ScanPartial p;
    for (std::size_t j = 0; j < n; ++j) {
      const double h = joint_support(pts[i], pts[j]);
      if (cfg.apply_threshold && !(h >= threshold)) continue;
      ++p.pairs_in_region;
      const double dhdt = -2.0 * h + wmean[i] + wmean[j];
      const bool violation = dhdt > cfg.tolerance;
      const bool new_max = !p.has_max || dhdt > p.argmax.dhdt;
      if (!violation && !new_max && !sink) continue;
      ScanRow row{pts[i], pts[j], h, dhdt,
                  h < threshold ? Region::BelowThreshold
                                : classify_unthresholded(fmin[i], fmin[j],
                                                         params.delta)};
      if (sink) sink(row);
      if (violation) {
        ++p.violation_count;
        if (p.violations.size() < cfg.max_violations_kept)
          p.violations.push_back(row);
      }
      if (new_max) {
        p.has_max = true;
        p.argmax = std::move(row);
      }
    }
    return p;
  };

  // A sink observes rows in order, so it forces a serial scan.
  const auto partials = parallel_map(n, sink ? 1 : cfg.workers, scan_row);

  LyapunovScanReport r;
  r.lattice_points = n;
  r.pairs_checked = n * n;
  bool has_max = false;
  for (const auto& p : partials) {
    r.pairs_in_region += p.pairs_in_region;
    r.violation_count += p.violation_count;
    for (const auto& row : p.violations)
      if (r.violations.size() < cfg.max_violations_kept) r.violations.push_back(row);
    if (p.has_max && (!has_max || p.argmax.dhdt > r.argmax.dhdt)) {
      has_max = true;
      r.argmax = p.argmax;
    }
  }

  const std::vector<double> uniform(static_cast<std::size_t>(params.d),
                                    1.0 / params.d);
  r.nearest_uniform_distance = std::numeric_limits<double>::infinity();
  for (const auto& u : pts)
    r.nearest_uniform_distance =
        std::min(r.nearest_uniform_distance, l1_distance(u, uniform));
  if (has_max) {
    const double tol = 1e-12;
    r.argmax_nearest_uniform =
        l1_distance(r.argmax.u, uniform) <= r.nearest_uniform_distance + tol &&
        l1_distance(r.argmax.v, uniform) <= r.nearest_uniform_distance + tol;
  }
  return r;
}

MonotoneReport lyapunov_monotone_check(const ProductPoint& z0,
                                       const FlowConfig& cfg,
                                       const Params& params) {
  MonotoneReport r;
  const double threshold = params.lyapunov_threshold();
  const double entry_level = threshold * (1.0 - 1e-6);
  auto z = z0.flat();
  const std::size_t d = z.size() / 2;
  auto h_of = [d](std::span<const double> s) {
    return joint_support(s.first(d), s.subspan(d, d));
  };
  double prev = h_of(z);
  bool entered_below = prev < entry_level;
  Rk4Integrator rk(params, cfg);
  rk.integrate(z, cfg.max_time, [&](double t, std::span<const double> s) {
    if (t == 0.0) return;
    const double h = h_of(s);
    if (!entered_below && prev >= threshold) {
      const double increase = h - prev;
      r.worst_increase = std::max(r.worst_increase, increase);
      if (increase > 1e-9) r.monotone = false;
    }
    if (h < entry_level) entered_below = true;
    if (in_s_delta(h, params)) {
      r.entered_s_delta = true;
    } else if (r.entered_s_delta) {
      r.stayed_in_s_delta = false;
    }
    prev = h;
  });
  r.final_h = prev;
  return r;
}

OmegaEstimate omega_limit_estimate(const ProductPoint& z0, const FlowConfig& cfg,
                                   const Params& params, double tail_fraction,
                                   double cluster_radius) {
  cfg.validate();
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw std::invalid_argument("tail_fraction must lie in (0, 1]");
  OmegaEstimate est;
  est.tail_end = cfg.max_time;
  est.tail_start = cfg.max_time * (1.0 - tail_fraction);
  const double expected = tail_fraction * cfg.max_time / cfg.step;
  if (expected < 100.0)
    throw std::invalid_argument("tail window holds fewer than 100 samples");

  std::vector<std::vector<double>> reps;
  std::vector<std::size_t> counts;
  auto z = z0.flat();
  Rk4Integrator rk(params, cfg);
  rk.integrate(z, cfg.max_time, [&](double t, std::span<const double> s) {
    if (t < est.tail_start) return;
    ++est.tail_samples;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      if (l1_distance(reps[r], s) <= cluster_radius) {
        ++counts[r];
        return;
      }
    }
    reps.emplace_back(s.begin(), s.end());
    counts.push_back(1);
  });
  for (std::size_t r = 0; r < reps.size(); ++r) {
    est.points.push_back(ProductPoint::from_flat(reps[r]));
    est.densities.push_back(static_cast<double>(counts[r]) /
                            static_cast<double>(est.tail_samples));
  }
  return est;
}

}  // namespace rwalk
