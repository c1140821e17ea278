#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace tvsaddle {

using Vector = std::vector<double>;

/// Dense row-major matrix. Small sizes only (M nodes, problem dimensions).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vector operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double distance(std::span<const double> a, std::span<const double> b);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
bool all_finite(std::span<const double> a) noexcept;

/// Symmetric to within `rel_tol` times the largest entry magnitude.
bool is_symmetric(const Matrix& a, double rel_tol = 1e-12);

/// All eigenvalues of a symmetric matrix, sorted descending.
///
/// Cyclic Jacobi rotations. Throws ValidationError on a non-square,
/// non-symmetric or non-finite input.
Vector sym_eigvals(const Matrix& a);

struct SymEigen {
  Vector values;   // descending
  Matrix vectors;  // column j pairs with values[j]
};
SymEigen sym_eigen(const Matrix& a);

/// Largest singular value, via the eigenvalues of AᵀA.
double spectral_norm(const Matrix& a);

/// Euclidean projection onto the closed ball {u : ‖u - center‖ <= radius}.
Vector project_ball(std::span<const double> z, std::span<const double> center, double radius);

/// Euclidean projection onto the probability simplex (sort-and-threshold).
Vector project_simplex(std::span<const double> z);

/// Solves Ax = b with partially pivoted LU and one refinement step.
///
/// Throws SolverError when the 1-norm condition estimate exceeds 1e12; the
/// message carries the estimate.
Vector solve_linear(const Matrix& a, std::span<const double> b);

/// ‖A‖₁‖A⁻¹‖₁, with A⁻¹ formed explicitly. Infinity when a pivot vanishes.
double condition_estimate(const Matrix& a);

}  // namespace tvsaddle
