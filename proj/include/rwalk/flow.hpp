#pragma once

// Mean-field ODE dz/dt = F(z) on D, its RK4 semiflow, and the Lyapunov-type
// functional H(u, v) = sum u_i v_i along it.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rwalk/model.hpp"

namespace rwalk {

struct FlowConfig {
  double step = 1e-3;
  double max_time = 10.0;
  bool renormalize = true;

  /// Throws std::invalid_argument for non-positive step or max_time.
  void validate() const;
};

/// F(u, v) = (-u + pi(v), -v + pi(u)) on flat 2d arrays.
void vector_field_into(std::span<const double> z, const Params& params,
                       std::span<double> out);
std::vector<double> vector_field(const ProductPoint& z, const Params& params);

/// Rigorous L1 Lipschitz bound of F on D: 1 + alpha / (2 delta).
double lipschitz_bound(const Params& params);
/// Bound on sup_D ||F||_1 (each block is a difference of two probability
/// vectors).
double field_sup_bound(const Params& params);

/// Fixed-step classical RK4 on flat states. Each block is rescaled to sum one
/// after every step when cfg.renormalize is set; the largest such correction
/// is kept in max_renormalization().
class Rk4Integrator {
 public:
  Rk4Integrator(const Params& params, const FlowConfig& cfg);

  /// Advances z in place by one step of size h.
  void step(std::span<double> z, double h);
  /// Integrates over [0, t] with steps no larger than cfg.step. The observer
  /// sees (time, state) after every step, starting with time 0.
  void integrate(std::span<double> z, double t,
                 const std::function<void(double, std::span<const double>)>&
                     observer = {});

  double max_renormalization() const { return max_renorm_; }

 private:
  Params params_;
  FlowConfig cfg_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
  double max_renorm_ = 0.0;
};

/// Phi_t(z0). Throws std::runtime_error if a coordinate drops below -1e-9.
ProductPoint integrate(const ProductPoint& z0, double t, const FlowConfig& cfg,
                       const Params& params);

struct InvarianceReport {
  double min_coordinate = 1.0;        // over the whole integrated path
  double min_initial_inflow = 0.0;    // min dz_i/dt over zero coordinates at t=0
  double inflow_lower_bound = 0.0;    // delta^alpha / (delta^alpha + d - 1)
  int zero_coordinates = 0;
  bool zero_coordinates_increase = true;
  bool stays_in_domain = true;
  bool ok() const { return stays_in_domain && zero_coordinates_increase; }
};

/// Integrates to T and checks that D is positively invariant along the path.
InvarianceReport check_invariance(const ProductPoint& z0, double T,
                                  const FlowConfig& cfg, const Params& params);

/// Closed form -2 sum u_i v_i + sum u_i f(u_i)^{-a} / sum f(u_k)^{-a}
/// + (same for v).
double dH_dt(const ProductPoint& z, const Params& params);
double dH_dt(std::span<const double> u, std::span<const double> v,
             const Params& params);

/// The weighted mean sum u_i f(u_i)^{-a} / sum f(u_k)^{-a} appearing in dH/dt.
double floored_weighted_mean(std::span<const double> u, const Params& params);

enum class Region { BelowThreshold, Case1, Case2, Case3 };
std::string to_string(Region r);

/// Partition used in the sign argument for dH/dt: below the Lyapunov
/// threshold, both sides unfloored, one side floored with the other's minimum
/// above 2 delta, or the rest.
Region region_classify(const ProductPoint& z, const Params& params);
Region region_classify(std::span<const double> u, std::span<const double> v,
                       const Params& params);

/// Offset simplex lattice floor + (1 - d floor) k / R over compositions k of R
/// into d nonnegative parts, in lexicographic order of k.
std::vector<std::vector<double>> offset_lattice(int d, int resolution,
                                                double floor);

struct ScanConfig {
  int resolution = 25;
  double floor = 0.005;
  bool apply_threshold = true;
  double tolerance = 1e-12;
  int workers = 0;
  std::size_t max_violations_kept = 1000;
};

struct ScanRow {
  std::vector<double> u, v;
  double h = 0.0;
  double dhdt = 0.0;
  Region region = Region::Case1;
};

struct LyapunovScanReport {
  std::size_t lattice_points = 0;
  std::size_t pairs_checked = 0;
  std::size_t pairs_in_region = 0;
  std::size_t violation_count = 0;
  std::vector<ScanRow> violations;  // at most max_violations_kept, in scan order
  ScanRow argmax;                   // max dH/dt over the scanned region
  double nearest_uniform_distance = 0.0;
  bool argmax_nearest_uniform = false;
  bool ok() const { return violation_count == 0; }
};

/// Deterministic product-lattice scan of dH/dt over {H >= threshold} (or all of
/// the lattice when apply_threshold is false). The optional row sink sees every
/// pair in the region in lexicographic order.
LyapunovScanReport lyapunov_scan(
    const Params& params, const ScanConfig& cfg,
    const std::function<void(const ScanRow&)>& sink = {});

struct MonotoneReport {
  bool monotone = true;
  double worst_increase = 0.0;  // largest per-step increase of H while above
  bool entered_s_delta = false;
  bool stayed_in_s_delta = true;
  double final_h = 0.0;
};

/// Integrates to cfg.max_time and asserts per step that H is non-increasing
/// (tolerance 1e-9) while H >= lyapunov_threshold. Also records whether the
/// path enters S^delta and stays there.
MonotoneReport lyapunov_monotone_check(const ProductPoint& z0,
                                       const FlowConfig& cfg,
                                       const Params& params);

struct OmegaEstimate {
  std::vector<ProductPoint> points;
  std::vector<double> densities;
  double tail_start = 0.0;
  double tail_end = 0.0;
  std::size_t tail_samples = 0;
};

/// Integrates to cfg.max_time and clusters the tail samples (first-seen
/// representative, L1 radius cluster_radius). Throws std::invalid_argument if
/// the tail would hold fewer than 100 samples.
OmegaEstimate omega_limit_estimate(const ProductPoint& z0, const FlowConfig& cfg,
                                   const Params& params, double tail_fraction,
                                   double cluster_radius = 1e-4);

}  // namespace rwalk
