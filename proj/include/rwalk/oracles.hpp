#pragma once

// Brute-force checks of the inequalities on the open simplex that underlie the
// sign of dH/dt: the master inequality 2 sum u_i v_i >= R(u) + R(v), the mean
// bound, the local-minimum function g, the far-from-uniform bound and the
// rearrangement lower bound. R is the ratio functional below.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rwalk/model.hpp"

namespace rwalk {

/// Interior lattice u = k / resolution over compositions with every k_i >= 1,
/// keeping points with all coordinates >= interior_floor.
struct GridSpec {
  int resolution = 25;
  double interior_floor = 0.01;
  /// Throws std::invalid_argument if resolution < 10, interior_floor <= 0 or
  /// interior_floor * d >= 1.
  void validate(int d) const;
};

/// Lexicographic order of k.
std::vector<std::vector<double>> interior_lattice(int d, const GridSpec& grid);

/// R(u, alpha) = sum u_i^{-alpha} / sum u_i^{-(1+alpha)}, evaluated as
/// m sum (m/u_i)^alpha / sum (m/u_i)^{1+alpha} with m = min u_i.
/// Throws std::domain_error on a non-positive coordinate.
double ratio(std::span<const double> u, double alpha);

/// 2 sum u_i v_i - R(u) - R(v).
double master_margin(std::span<const double> u, std::span<const double> v, double alpha);

struct InequalityRow {
  std::vector<double> u, v;
  double margin = 0.0;
};

struct InequalityReport {
  std::size_t points_checked = 0;  // lattice pairs
  std::size_t lattice_points = 0;
  double min_margin = 0.0;
  InequalityRow argmin;
  std::size_t violation_count = 0;     // margin < -1e-12
  std::vector<InequalityRow> violations;  // first max_violations_kept, scan order
  /// argmin u and v are both lattice points at minimal L1 distance from U.
  bool argmin_adjacent_uniform = false;
  double wall_seconds = 0.0;
  bool ok() const { return violation_count == 0; }
};

struct MasterGridOptions {
  int workers = 0;
  std::size_t max_violations_kept = 1000;
};

/// Exhaustive scan over all lattice pairs (u, v). Ties in the minimum go to
/// the first pair in scan order. The optional sink sees every row in order.
InequalityReport verify_master_grid(
    int d, double alpha, const GridSpec& grid, const MasterGridOptions& opts = {},
    const std::function<void(const InequalityRow&)>& sink = {});

/// First largeness condition decided by a grid scan, fed into alpha_large_enough.
AlphaReport check_alpha(const Params& params, const GridSpec& grid, int workers = 0);

struct MeanBound {
  double value = 0.0;  // (1 + sum a_i^alpha) / (1 + sum a_i^{1+alpha})
  double bound = 0.0;  // d^{1/(alpha+1)}, d = a.size() + 1
  bool holds = false;  // value < bound
};

/// Throws std::domain_error unless every a_i lies in (0, 1].
MeanBound mean_bound_check(std::span<const double> a, double alpha);

/// g(u) = 2 m - d m^2 - R(u), m = min u_i.
double g_function(std::span<const double> u, double alpha);

struct LocalMinProbe {
  std::size_t samples = 0;
  double min_g = 0.0;
  std::vector<double> argmin;
  std::size_t negative = 0;  // samples with g < -1e-12
  bool hypothesis = false;   // alpha > d - 2
  bool ok() const { return negative == 0; }
};

/// Samples u = (1-l) U + l s with s uniform on the simplex and the step l
/// chosen so that ||u - U||_1 is uniform on [0, radius].
LocalMinProbe local_min_probe(int d, double alpha, double radius, std::size_t samples,
                              std::uint64_t seed, int workers = 0);

/// log d / log(2 - kappa) - 1.
double far_from_uniform_threshold(int d, double kappa);

struct FarFromUniform {
  bool applicable = false;  // min u < kappa/d and alpha >= threshold
  std::string reason;       // why not applicable
  double threshold = 0.0;
  double lhs = 0.0;         // 2 m - d m^2
  double ratio = 0.0;       // R(u)
  double intermediate_bound = 0.0;  // d^{1/(alpha+1)} m
  bool inequality = false;          // lhs > ratio
  bool intermediate = false;        // ratio <= intermediate_bound
  bool ok() const { return !applicable || (inequality && intermediate); }
};

FarFromUniform far_from_uniform_check(std::span<const double> u, double alpha, double kappa);

struct Rearrangement {
  double lhs = 0.0;  // sum u_i v_i
  double rhs = 0.0;  // min u + min v - d min u min v
  bool holds = false;  // lhs >= rhs - 1e-12
};

Rearrangement rearrangement_bound(std::span<const double> u, std::span<const double> v);

/// Outcome of a seeded sampling sweep. Samples are drawn in fixed chunks with
/// one stream per chunk, so results do not depend on the worker count.
struct SweepReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double extreme = 0.0;  // sweep-specific: see each function
  bool ok() const { return violations == 0; }
};

/// mean_bound_check on a_i uniform in (0, 1]; extreme = sup value / bound.
SweepReport mean_bound_sweep(int d, double alpha, std::size_t samples,
                             std::uint64_t seed, int workers = 0);
/// rearrangement_bound on uniform pairs; extreme = min (lhs - rhs).
SweepReport rearrangement_sweep(int d, std::size_t samples, std::uint64_t seed,
                                int workers = 0);
/// R(u, a) non-increasing along the sorted alphas; extreme = largest increase.
SweepReport ratio_monotone_sweep(int d, std::span<const double> alphas,
                                 std::size_t samples, std::uint64_t seed,
                                 int workers = 0);
/// R(u) / min u < d^{1/(alpha+1)}; extreme = sup of the left side over the bound.
SweepReport intermediate_bound_sweep(int d, double alpha, std::size_t samples,
                                     std::uint64_t seed, int workers = 0);

struct FarCoverage {
  std::size_t lattice_points = 0;
  std::size_t applicable = 0;
  std::size_t failures = 0;
  double threshold = 0.0;
};

/// far_from_uniform_check over the interior lattice at a given kappa.
FarCoverage far_from_uniform_grid(int d, double alpha, double kappa, const GridSpec& grid);

}  // namespace rwalk
