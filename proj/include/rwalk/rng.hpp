#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace rwalk {

/// Seedable random stream. Independent streams come from (seed, stream index)
/// pairs, so Monte Carlo results do not depend on how runs map to workers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
  double uniform();
  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, n).
  int below(int n);
  /// Standard exponential variate.
  double exponential();

 private:
  std::mt19937_64 engine_;
};

/// Index i with cdf(i-1) <= u < cdf(i) for the probability vector p. Falls
/// back to the last index with positive mass when roundoff leaves u above the
/// accumulated total.
int sample_categorical(std::span<const double> p, double u);

/// Uniform point on the (d-1)-simplex via normalized exponential draws.
std::vector<double> sample_simplex(int d, Rng& rng);

}  // namespace rwalk
