#pragma once

// Parameters, simplex points and the pure functions of the two-particle
// repelling walk: floored weights, the transition kernel, the joint-support
// functional H and the trapping region S^delta.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rwalk {

/// Model parameters. Construct through Params::make, which validates.
struct Params {
  int d = 3;
  double alpha = 1.0;
  double delta = 0.01;
  int n0 = 3;

  /// Throws std::invalid_argument unless d >= 2, alpha > 0, 0 < delta < 1/d
  /// and n0 >= 1. n0 defaults to d.
  static Params make(int d, double alpha, double delta,
                     std::optional<int> n0 = std::nullopt);

  /// d^{1/(alpha+1)}, the constant shared by both thresholds below.
  double mean_constant() const;
  /// 2 d^{1/(alpha+1)} delta: S^delta = {H < s_delta_bound}.
  double s_delta_bound() const;
  /// (3/2) d^{1/(alpha+1)} delta: dH/dt <= 0 above this level.
  double lyapunov_threshold() const;

  friend bool operator==(const Params&, const Params&) = default;
};

/// A point of the closed simplex: d nonnegative coordinates summing to 1.
///
/// Coordinate sums within kRenormTol of 1 are renormalized on construction;
/// larger defects and negative coordinates below -kNegTol throw
/// std::domain_error. Tiny negatives are clamped to zero.
class SimplexPoint {
 public:
  static constexpr double kSumTol = 1e-12;
  static constexpr double kRenormTol = 1e-9;
  static constexpr double kNegTol = 1e-12;

  explicit SimplexPoint(std::vector<double> coords);

  static SimplexPoint uniform(int d);
  /// Vertex e_i of the simplex.
  static SimplexPoint vertex(int d, int i);

  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }
  double min() const;

  friend bool operator==(const SimplexPoint&, const SimplexPoint&) = default;

 private:
  std::vector<double> coords_;
};

/// A point z = (x, y) of D = simplex x simplex.
struct ProductPoint {
  SimplexPoint x;
  SimplexPoint y;

  ProductPoint(SimplexPoint x_, SimplexPoint y_);
  static ProductPoint uniform(int d);
  /// Builds from a flat (x..., y...) array of length 2d.
  static ProductPoint from_flat(std::span<const double> z);

  int d() const { return static_cast<int>(x.size()); }
  std::vector<double> flat() const;

  friend bool operator==(const ProductPoint&, const ProductPoint&) = default;
};

/// L1 distance on R^d or R^{2d}.
double l1_distance(std::span<const double> a, std::span<const double> b);
double l1_distance(const ProductPoint& a, const ProductPoint& b);
/// L1 distance of z to (U, U).
double distance_to_uniform(const ProductPoint& z);

/// f(v) = delta if v <= delta, else v. Throws std::domain_error outside [0,1].
double floor_weight(double v, const Params& params);

/// f(v)^{-alpha}.
double repelling_weight(double v, const Params& params);

/// pi_i(p) = f(p_i)^{-alpha} / sum_k f(p_k)^{-alpha}.
///
/// Evaluated as (m/f_i)^alpha / sum_k (m/f_k)^alpha with m = min_k f_k, which
/// cannot overflow for any alpha. The input need not sum to one; the walk
/// calls this on raw occupation vectors.
void kernel_into(std::span<const double> p, const Params& params,
                 std::span<double> out);
SimplexPoint kernel(const SimplexPoint& p, const Params& params);

/// H(x, y) = sum_i x_i y_i.
double joint_support(std::span<const double> x, std::span<const double> y);
double joint_support(const ProductPoint& z);

/// H(z) < 2 d^{1/(alpha+1)} delta, strict.
bool in_s_delta(const ProductPoint& z, const Params& params);
bool in_s_delta(double h, const Params& params);

enum class ConditionStatus { Holds, Fails, Unverified };
std::string to_string(ConditionStatus s);

struct AlphaReport {
  double condition2_bound = 0.0;  // log d / log(4/3)
  bool condition2 = false;        // alpha > condition2_bound
  ConditionStatus condition1 = ConditionStatus::Unverified;
  bool large_enough = false;      // condition1 == Holds && condition2
};

/// The two largeness conditions on alpha. The first has no closed form;
/// pass the verdict of a master-inequality grid scan (see oracles::check_alpha) or
/// leave it unverified.
AlphaReport alpha_large_enough(const Params& params,
                               std::optional<bool> master_grid_holds = {});

}  // namespace rwalk
