#include "rwalk/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "rwalk/flow.hpp"

namespace rwalk {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::asymmetry() const {
  if (rows_ != cols_) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
  return worst;
}

std::vector<double> Matrix::apply(const std::vector<double>& x) const {
  if (x.size() != cols_) throw std::invalid_argument("Matrix::apply: size");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
  return y;
}

Matrix jacobian_at_uniform(const Params& params) {
  if (params.delta >= 1.0 / params.d)
    throw std::domain_error("the floor is active at (U,U); kernel not differentiable");
  const std::size_t d = static_cast<std::size_t>(params.d);
  const double a = params.alpha;
  const double off = a / params.d;
  const double diag = -a + off;
  Matrix j(2 * d, 2 * d);
  for (std::size_t i = 0; i < 2 * d; ++i) j(i, i) = -1.0;
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double b = r == c ? diag : off;
      j(r, d + c) = b;
      j(d + r, c) = b;
    }
  }
  return j;
}

std::vector<double> expand(const std::vector<Eigenvalue>& pairs) {
  std::vector<double> out;
  for (const auto& p : pairs) out.insert(out.end(), static_cast<std::size_t>(p.multiplicity), p.value);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Eigenvalue> cluster_eigenvalues(const std::vector<double>& sorted, double tol) {
  std::vector<Eigenvalue> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i] - sorted[i - 1] <= tol) {
      ++out.back().multiplicity;
    } else {
      out.push_back({sorted[i], 1});
    }
  }
  return out;
}

namespace {

std::vector<Eigenvalue> normalized(const std::vector<Eigenvalue>& pairs) {
  std::vector<Eigenvalue> nonzero;
  for (const auto& p : pairs)
    if (p.multiplicity > 0) nonzero.push_back(p);
  return cluster_eigenvalues(expand(nonzero));
}

}  // namespace

std::vector<Eigenvalue> closed_form_eigenvalues(const Params& params) {
  const int d = params.d;
  const double a = params.alpha;
  return normalized({{-1.0, 2}, {-1.0 + a, d - 1}, {-1.0 - a, d - 1}});
}

std::vector<double> numeric_eigenvalues(const Matrix& input) {
  if (input.rows() != input.cols()) throw std::invalid_argument("matrix is not square");
  if (input.asymmetry() > 1e-12) throw std::invalid_argument("matrix is not symmetric");
  Matrix a = input;
  const std::size_t n = a.rows();
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };
  for (int sweep = 0; sweep < 100 && off_norm() >= 1e-12; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }
  if (off_norm() >= 1e-12) throw std::runtime_error("Jacobi iteration did not converge");
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

SpectrumReport compare_spectrum(const Matrix& a, const std::vector<Eigenvalue>& closed_form) {
  SpectrumReport r;
  r.dimension = a.rows();
  r.numeric = numeric_eigenvalues(a);
  r.numeric_pairs = cluster_eigenvalues(r.numeric);
  r.closed_form = closed_form;
  const auto expected = expand(closed_form);
  if (expected.size() != r.numeric.size()) {
    r.discrepancy = std::numeric_limits<double>::infinity();
    return r;
  }
  for (std::size_t i = 0; i < expected.size(); ++i)
    r.discrepancy = std::max(r.discrepancy, std::abs(expected[i] - r.numeric[i]));
  r.multiplicities_match = cluster_eigenvalues(expected).size() == r.numeric_pairs.size();
  if (r.multiplicities_match) {
    const auto ce = cluster_eigenvalues(expected);
    for (std::size_t i = 0; i < ce.size(); ++i)
      r.multiplicities_match = r.multiplicities_match &&
                               ce[i].multiplicity == r.numeric_pairs[i].multiplicity;
  }
  return r;
}

SpectrumReport jacobian_spectrum(const Params& params) {
  return compare_spectrum(jacobian_at_uniform(params), closed_form_eigenvalues(params));
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Unstable: return "unstable";
    case Stability::Attracting: return "attracting";
    case Stability::Marginal: return "marginal";
  }
  return "?";
}

Stability classify_equilibrium(const Params& params) {
  const double top = numeric_eigenvalues(jacobian_at_uniform(params)).back();
  if (top > 1e-10) return Stability::Unstable;
  if (top < -1e-10) return Stability::Attracting;
  return Stability::Marginal;
}

Matrix finite_difference_jacobian(const std::vector<double>& z, const Params& params,
                                  double h) {
  const std::size_t n = z.size();
  Matrix j(n, n);
  std::vector<double> zp(z), zm(z), fp(n), fm(n);
  for (std::size_t c = 0; c < n; ++c) {
    zp[c] = z[c] + h;
    zm[c] = z[c] - h;
    vector_field_into(zp, params, fp);
    vector_field_into(zm, params, fm);
    for (std::size_t r = 0; r < n; ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
    zp[c] = z[c];
    zm[c] = z[c];
  }
  return j;
}

namespace {

using Rational = boost::multiprecision::cpp_rational;

// Entry (i, j) of the displayed M, generic in the scalar type.
template <typename T>
T m_entry(std::size_t i, std::size_t j, std::size_t d, const T& alpha) {
  const T c = (alpha + 2) / T(static_cast<long>(d));
  const std::size_t last = d - 1;
  if (i == last && j == last) return -c + alpha + 1 + 2 - T(static_cast<long>(d));
  if (i == last || j == last) return T(1) - c;
  if (i == j) return -c + alpha + 1;
  return -c;
}

}  // namespace

AppendixSpectra appendix_matrices(int d, double alpha) {
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be > 0");
  AppendixSpectra s;
  s.d = d;
  s.alpha = alpha;
  const std::size_t n = static_cast<std::size_t>(d);
  s.m = Matrix(n, n);
  s.n = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      s.m(i, j) = m_entry<double>(i, j, n, alpha);
      s.n(i, j) = s.m(i, j) - (i == j ? alpha + 1.0 : 0.0);
    }
  }

  const double a = alpha;
  s.m_stated = normalized({{a + 1.0, d - 2}, {0.0, 1}, {a * (a + 2.0 - d) / (a + 2.0), 1}});
  s.n_stated = normalized({{0.0, d - 2}, {-(a + 1.0), 1}, {-(d * a / (a + 2.0) + 1.0), 1}});
  s.m_derived = normalized({{a + 1.0, d - 2}, {0.0, 1}, {a + 2.0 - d, 1}});
  s.n_derived = normalized({{0.0, d - 2}, {-(a + 1.0), 1}, {1.0 - d, 1}});
  s.m_vs_stated = compare_spectrum(s.m, s.m_stated);
  s.n_vs_stated = compare_spectrum(s.n, s.n_stated);
  s.m_vs_derived = compare_spectrum(s.m, s.m_derived);
  s.n_vs_derived = compare_spectrum(s.n, s.n_derived);

  const Rational ra(alpha);
  s.row_sums_exact_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    Rational sum = 0;
    for (std::size_t j = 0; j < n; ++j) sum += m_entry<Rational>(i, j, n, ra);
    if (sum != 0) s.row_sums_exact_zero = false;
  }

  int zeros = 0;
  bool nonnegative = true;
  for (double v : s.m_vs_derived.numeric) {
    if (std::abs(v) <= 1e-10) ++zeros;
    if (v < -1e-10) nonnegative = false;
  }
  s.psd_single_zero = nonnegative && zeros == 1;
  return s;
}

}  // namespace rwalk
