#include "rwalk/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rwalk {

Params Params::make(int d, double alpha, double delta, std::optional<int> n0) {
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("alpha must be a finite positive number");
  if (!(delta > 0.0) || !(delta < 1.0 / d))
    throw std::invalid_argument("delta must satisfy 0 < delta < 1/d");
  const int offset = n0.value_or(d);
  if (offset < 1) throw std::invalid_argument("n0 must be >= 1");
  return Params{d, alpha, delta, offset};
}

double Params::mean_constant() const {
  return std::pow(static_cast<double>(d), 1.0 / (alpha + 1.0));
}

double Params::s_delta_bound() const { return 2.0 * mean_constant() * delta; }

double Params::lyapunov_threshold() const {
  return 1.5 * mean_constant() * delta;
}

SimplexPoint::SimplexPoint(std::vector<double> coords)
    : coords_(std::move(coords)) {
  if (coords_.size() < 2)
    throw std::domain_error("simplex point needs at least two coordinates");
  for (double& c : coords_) {
    if (!std::isfinite(c)) throw std::domain_error("non-finite coordinate");
    if (c < 0.0) {
      if (c < -kNegTol) throw std::domain_error("negative coordinate");
      c = 0.0;
    }
  }
  const double sum = std::accumulate(coords_.begin(), coords_.end(), 0.0);
  if (std::abs(sum - 1.0) > kRenormTol)
    throw std::domain_error("coordinates do not sum to 1");
  if (std::abs(sum - 1.0) > kSumTol) {
    for (double& c : coords_) c /= sum;
  }
}

SimplexPoint SimplexPoint::uniform(int d) {
  return SimplexPoint(std::vector<double>(static_cast<std::size_t>(d), 1.0 / d));
}

SimplexPoint SimplexPoint::vertex(int d, int i) {
  if (i < 0 || i >= d) throw std::out_of_range("vertex index");
  std::vector<double> c(static_cast<std::size_t>(d), 0.0);
  c[static_cast<std::size_t>(i)] = 1.0;
  return SimplexPoint(std::move(c));
}

double SimplexPoint::min() const {
  return *std::min_element(coords_.begin(), coords_.end());
}

ProductPoint::ProductPoint(SimplexPoint x_, SimplexPoint y_)
    : x(std::move(x_)), y(std::move(y_)) {
  if (x.size() != y.size())
    throw std::domain_error("product point blocks differ in dimension");
}

ProductPoint ProductPoint::uniform(int d) {
  return {SimplexPoint::uniform(d), SimplexPoint::uniform(d)};
}

ProductPoint ProductPoint::from_flat(std::span<const double> z) {
  if (z.size() % 2 != 0) throw std::domain_error("flat point has odd length");
  const std::size_t d = z.size() / 2;
  return {SimplexPoint({z.begin(), z.begin() + static_cast<long>(d)}),
          SimplexPoint({z.begin() + static_cast<long>(d), z.end()})};
}

std::vector<double> ProductPoint::flat() const {
  std::vector<double> out(x.coords().begin(), x.coords().end());
  out.insert(out.end(), y.coords().begin(), y.coords().end());
  return out;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

double l1_distance(const ProductPoint& a, const ProductPoint& b) {
  return l1_distance(a.x.coords(), b.x.coords()) +
         l1_distance(a.y.coords(), b.y.coords());
}

double distance_to_uniform(const ProductPoint& z) {
  const double u = 1.0 / z.d();
  double s = 0.0;
  for (double c : z.x.coords()) s += std::abs(c - u);
  for (double c : z.y.coords()) s += std::abs(c - u);
  return s;
}

double floor_weight(double v, const Params& params) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::domain_error("floor_weight: argument outside [0, 1]");
  return v <= params.delta ? params.delta : v;
}

double repelling_weight(double v, const Params& params) {
  return std::pow(floor_weight(v, params), -params.alpha);
}

void kernel_into(std::span<const double> p, const Params& params,
                 std::span<double> out) {
  const std::size_t d = p.size();
  if (out.size() != d) throw std::invalid_argument("kernel: output size");
  // out holds f(p_i) until the final pass.
  double m = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double f = p[i] <= params.delta ? params.delta : p[i];
    out[i] = f;
    m = std::min(m, f);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    out[i] = out[i] == m ? 1.0 : std::pow(m / out[i], params.alpha);
    total += out[i];
  }
  for (std::size_t i = 0; i < d; ++i) out[i] /= total;
}

SimplexPoint kernel(const SimplexPoint& p, const Params& params) {
  std::vector<double> out(p.size());
  kernel_into(p.coords(), params, out);
  return SimplexPoint(std::move(out));
}

double joint_support(std::span<const double> x, std::span<const double> y) {
  double h = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) h += x[i] * y[i];
  return h;
}

double joint_support(const ProductPoint& z) {
  return joint_support(z.x.coords(), z.y.coords());
}

bool in_s_delta(double h, const Params& params) {
  return h < params.s_delta_bound();
}

bool in_s_delta(const ProductPoint& z, const Params& params) {
  return in_s_delta(joint_support(z), params);
}

std::string to_string(ConditionStatus s) {
  switch (s) {
    case ConditionStatus::Holds: return "holds";
    case ConditionStatus::Fails: return "fails";
    case ConditionStatus::Unverified: return "unverified";
  }
  return "unknown";
}

AlphaReport alpha_large_enough(const Params& params,
                               std::optional<bool> master_grid_holds) {
  AlphaReport r;
  r.condition2_bound = std::log(static_cast<double>(params.d)) / std::log(4.0 / 3.0);
  r.condition2 = params.alpha > r.condition2_bound;
  if (master_grid_holds)
    r.condition1 = *master_grid_holds ? ConditionStatus::Holds : ConditionStatus::Fails;
  r.large_enough = r.condition2 && r.condition1 == ConditionStatus::Holds;
  return r;
}

}  // namespace rwalk
