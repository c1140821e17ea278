#include "tvsaddle/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "tvsaddle/errors.hpp"

namespace tvsaddle {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw ValidationError("Matrix::from_rows: ragged rows");
    std::copy(row.begin(), row.end(), m.row(i++).begin());
  }
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool Matrix::all_finite() const noexcept { return tvsaddle::all_finite(data_); }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ValidationError("matrix product: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

namespace {

Matrix elementwise(const Matrix& a, const Matrix& b, double sign) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("matrix sum: shapes differ");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + sign * b(i, j);
  return c;
}

}  // namespace

Matrix operator+(const Matrix& a, const Matrix& b) { return elementwise(a, b, 1.0); }
Matrix operator-(const Matrix& a, const Matrix& b) { return elementwise(a, b, -1.0); }

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (double& v : c.row(i)) v *= s;
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw ValidationError("matrix-vector product: dimension mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("dot: dimension mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw ValidationError("axpy: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

bool all_finite(std::span<const double> a) noexcept {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (!a.square()) return false;
  const double tol = rel_tol * a.max_abs();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

namespace {

void require_symmetric(const Matrix& a, const char* who) {
  if (!a.square() || a.rows() == 0) {
    throw ValidationError(std::string(who) + ": expected a non-empty square matrix");
  }
  if (!a.all_finite()) throw ValidationError(std::string(who) + ": non-finite entry");
  if (!is_symmetric(a)) throw ValidationError(std::string(who) + ": matrix is not symmetric");
}

// Cyclic Jacobi on a copy of `a`. Accumulates rotations into `v` when given.
Vector jacobi(Matrix a, Matrix* v) {
  const std::size_t n = a.rows();
  if (v) *v = Matrix::identity(n);

  double frob_sq = 0.0;
  for (double x : a.data()) frob_sq += x * x;

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off_sq = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off_sq += a(p, q) * a(p, q);
    if (off_sq == 0.0 || off_sq <= 1e-32 * frob_sq) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
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
        a(p, q) = a(q, p) = 0.0;
        if (v) {
          Matrix& vv = *v;
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = vv(k, p), vkq = vv(k, q);
            vv(k, p) = c * vkp - s * vkq;
            vv(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  Vector d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
  return d;
}

}  // namespace

Vector sym_eigvals(const Matrix& a) {
  require_symmetric(a, "sym_eigvals");
  Vector d = jacobi(a, nullptr);
  std::sort(d.begin(), d.end(), std::greater<>());
  return d;
}

SymEigen sym_eigen(const Matrix& a) {
  require_symmetric(a, "sym_eigen");
  Matrix v;
  Vector d = jacobi(a, &v);
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return d[i] > d[j]; });
  SymEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = d[order[j]];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

double spectral_norm(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  const Matrix ata = a.transpose() * a;
  // Symmetrize to absorb rounding in the product.
  Matrix sym(ata.rows(), ata.cols());
  for (std::size_t i = 0; i < ata.rows(); ++i)
    for (std::size_t j = 0; j < ata.cols(); ++j) sym(i, j) = 0.5 * (ata(i, j) + ata(j, i));
  const Vector ev = sym_eigvals(sym);
  return std::sqrt(std::max(ev.front(), 0.0));
}

Vector project_ball(std::span<const double> z, std::span<const double> center, double radius) {
  if (!(radius > 0.0)) throw ValidationError("project_ball: radius must be positive");
  if (z.size() != center.size()) throw ValidationError("project_ball: dimension mismatch");
  const double r = distance(z, center);
  Vector out(z.begin(), z.end());
  if (r <= radius) return out;
  const double scale = radius / r;
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = center[i] + scale * (z[i] - center[i]);
  return out;
}

Vector project_simplex(std::span<const double> z) {
  if (z.empty()) throw ValidationError("project_simplex: empty vector");
  Vector u(z.begin(), z.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  Vector out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::max(z[i] - theta, 0.0);
  return out;
}

namespace {

struct LuFactors {
  Matrix lu;
  std::vector<std::size_t> perm;
  bool singular = false;
};

LuFactors lu_factor(const Matrix& a) {
  const std::size_t n = a.rows();
  LuFactors f{a, std::vector<std::size_t>(n)};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  Matrix& lu = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    if (lu(piv, k) == 0.0) {
      f.singular = true;
      return f;
    }
    if (piv != k) {
      std::swap_ranges(lu.row(k).begin(), lu.row(k).end(), lu.row(piv).begin());
      std::swap(f.perm[k], f.perm[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = lu(i, k) / lu(k, k);
      lu(i, k) = l;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= l * lu(k, j);
    }
  }
  return f;
}

Vector lu_solve(const LuFactors& f, std::span<const double> b) {
  const std::size_t n = b.size();
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
    x[i] /= f.lu(i, i);
  }
  return x;
}

double one_norm(const Matrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

double condition_from(const Matrix& a, const LuFactors& f) {
  if (f.singular) return std::numeric_limits<double>::infinity();
  const std::size_t n = a.rows();
  double inv_norm = 0.0;
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Vector col = lu_solve(f, e);
    e[j] = 0.0;
    double s = 0.0;
    for (double v : col) s += std::abs(v);
    inv_norm = std::max(inv_norm, s);
  }
  const double cond = one_norm(a) * inv_norm;
  return std::isfinite(cond) ? cond : std::numeric_limits<double>::infinity();
}

}  // namespace

double condition_estimate(const Matrix& a) {
  if (!a.square() || a.rows() == 0) throw ValidationError("condition_estimate: expected a square matrix");
  return condition_from(a, lu_factor(a));
}

Vector solve_linear(const Matrix& a, std::span<const double> b) {
  if (!a.square() || a.rows() == 0) throw ValidationError("solve_linear: expected a square matrix");
  if (a.rows() != b.size()) throw ValidationError("solve_linear: dimension mismatch");
  if (!a.all_finite() || !all_finite(b)) throw ValidationError("solve_linear: non-finite input");

  const LuFactors f = lu_factor(a);
  const double cond = condition_from(a, f);
  if (!(cond <= 1e12)) {
    std::ostringstream msg;
    msg << "solve_linear: matrix is singular or ill-conditioned (condition estimate " << cond
        << ")";
    throw SolverError(msg.str());
  }

  Vector x = lu_solve(f, b);
  Vector r = a * x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const Vector dx = lu_solve(f, r);
  axpy(1.0, dx, x);
  return x;
}

}  // namespace tvsaddle
