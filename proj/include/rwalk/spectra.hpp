#pragma once

// Linearization of the mean-field field at (U, U) and the Hessian matrices
// behind the local-minimum argument for g. Small dense symmetric matrices only.

#include <cstddef>
#include <string>
#include <vector>

#include "rwalk/model.hpp"

namespace rwalk {

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  /// max |a_ij - a_ji|; infinity for non-square input.
  double asymmetry() const;
  std::vector<double> apply(const std::vector<double>& x) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

struct Eigenvalue {
  double value = 0.0;
  int multiplicity = 1;
  friend bool operator==(const Eigenvalue&, const Eigenvalue&) = default;
};

/// DF at (U, U): [[-I, B], [B, -I]] with B = -alpha I + (alpha/d) J.
/// Throws std::domain_error if delta >= 1/d.
Matrix jacobian_at_uniform(const Params& params);

/// {-1 (x2), -1+alpha (x(d-1)), -1-alpha (x(d-1))}, merged when alpha
/// values coincide, sorted ascending.
std::vector<Eigenvalue> closed_form_eigenvalues(const Params& params);

/// Cyclic Jacobi; sweeps until the off-diagonal Frobenius norm is below 1e-12.
/// Returns eigenvalues in ascending order. Throws std::invalid_argument unless
/// the matrix is square and symmetric within 1e-12.
std::vector<double> numeric_eigenvalues(const Matrix& a);

/// Groups sorted values whose consecutive gaps are within tol.
std::vector<Eigenvalue> cluster_eigenvalues(const std::vector<double>& sorted,
                                            double tol = 1e-8);
/// Inverse of clustering: each value repeated multiplicity times, sorted.
std::vector<double> expand(const std::vector<Eigenvalue>& pairs);

struct SpectrumReport {
  std::size_t dimension = 0;
  std::vector<double> numeric;            // sorted
  std::vector<Eigenvalue> numeric_pairs;  // clustered at 1e-8
  std::vector<Eigenvalue> closed_form;
  /// max |numeric - closed form| after sorting both (optimal for sup matching);
  /// infinity when the multiplicities do not sum to the dimension.
  double discrepancy = 0.0;
  bool multiplicities_match = false;
};

SpectrumReport compare_spectrum(const Matrix& a, const std::vector<Eigenvalue>& closed_form);
SpectrumReport jacobian_spectrum(const Params& params);

enum class Stability { Unstable, Attracting, Marginal };
std::string to_string(Stability s);

/// From the numeric spectrum of DF at (U, U): Unstable iff the top eigenvalue
/// exceeds 1e-10, Attracting iff it is below -1e-10.
Stability classify_equilibrium(const Params& params);

/// Central-difference Jacobian of the vector field at a flat point z.
Matrix finite_difference_jacobian(const std::vector<double>& z, const Params& params,
                                  double h = 1e-6);

struct AppendixSpectra {
  int d = 0;
  double alpha = 0.0;
  Matrix m, n;  // as displayed; n = m - (alpha+1) I
  /// Closed forms written next to the matrices:
  /// lambda^M = {alpha+1 (x(d-2)), 0, alpha(alpha+2-d)/(alpha+2)},
  /// lambda^N = {0 (x(d-2)), -(alpha+1), -(d alpha/(alpha+2) + 1)}.
  std::vector<Eigenvalue> m_stated, n_stated;
  /// Spectra of the displayed matrices, worked out by hand:
  /// lambda^M = {alpha+1 (x(d-2)), 0, alpha+2-d},
  /// lambda^N = {0 (x(d-2)), -(alpha+1), 1-d}.
  std::vector<Eigenvalue> m_derived, n_derived;
  SpectrumReport m_vs_stated, n_vs_stated, m_vs_derived, n_vs_derived;
  /// M 1 = 0 in exact rational arithmetic (alpha taken as its exact binary value).
  bool row_sums_exact_zero = false;
  /// M has no eigenvalue below -1e-10 and exactly one within 1e-10 of zero.
  bool psd_single_zero = false;
};

/// Throws std::invalid_argument unless d >= 2 and alpha > 0.
AppendixSpectra appendix_matrices(int d, double alpha);

}  // namespace rwalk
