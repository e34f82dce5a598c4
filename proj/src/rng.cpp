#include "rwalk/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace rwalk {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(seeded_engine(seed, stream)) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

int Rng::below(int n) {
  if (n <= 0) throw std::invalid_argument("Rng::below: n must be positive");
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return static_cast<int>(v % range);
}

double Rng::exponential() {
  // 1 - u lies in (0, 1], so the log is finite.
  return -std::log1p(-uniform());
}

int sample_categorical(std::span<const double> p, double u) {
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) last_positive = static_cast<int>(i);
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  if (last_positive < 0) throw std::domain_error("categorical with no mass");
  return last_positive;
}

std::vector<double> sample_simplex(int d, Rng& rng) {
  std::vector<double> u(static_cast<std::size_t>(d));
  double total = 0.0;
  for (double& c : u) {
    c = rng.exponential();
    total += c;
  }
  for (double& c : u) c /= total;
  return u;
}

}  // namespace rwalk
