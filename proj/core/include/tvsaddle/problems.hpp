#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tvsaddle/linalg.hpp"

namespace tvsaddle {

struct ProblemConstants {
  double l_global = 0.0;            // Lipschitz constant of the averaged operator F
  double l_max = 0.0;               // max over nodes of the Lipschitz constant of F_m
  double mu = 0.0;                  // strong monotonicity of F; 0 for convex-concave
  std::optional<double> diameter;   // of Z = X × Y; empty when unbounded
};

/// min_x max_y f(x, y) = (1/M) Σ_m f_m(x, y) over Z = X × Y.
///
/// Node m only evaluates its local operator F_m(z) = (∇_x f_m, -∇_y f_m).
/// Points are laid out z = (x, y) with x first. Implementations are immutable
/// and safe to evaluate concurrently.
class SaddleProblem {
 public:
  virtual ~SaddleProblem() = default;

  std::size_t node_count() const noexcept { return nodes_; }
  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t dim() const noexcept { return nx_ + ny_; }
  const ProblemConstants& constants() const noexcept { return constants_; }

  virtual void local_operator(std::size_t m, std::span<const double> z,
                              std::span<double> out) const = 0;
  Vector local_operator(std::size_t m, std::span<const double> z) const;

  /// F(z) = (1/M) Σ_m F_m(z).
  Vector global_operator(std::span<const double> z) const;

  virtual bool is_constrained() const noexcept { return false; }
  /// Euclidean projection onto Z; identity when unconstrained.
  virtual void project_in_place(std::span<double> z) const;
  Vector project(std::span<const double> z) const;

  virtual std::optional<Vector> solution() const { return std::nullopt; }

  virtual bool has_gap_oracle() const noexcept { return false; }
  /// max_{y'} f(x, y') - min_{x'} f(x', y). Throws UnsupportedMetricError
  /// when has_gap_oracle() is false.
  virtual double gap(std::span<const double> z) const;

  /// f(x, y) when available.
  virtual std::optional<double> objective(std::span<const double> z) const;
  /// f_m(x, y) when available.
  virtual std::optional<double> local_objective(std::size_t m, std::span<const double> z) const;

 protected:
  SaddleProblem(std::size_t nodes, std::size_t nx, std::size_t ny);
  void check_point(std::span<const double> z) const;

  ProblemConstants constants_;

 private:
  std::size_t nodes_;
  std::size_t nx_;
  std::size_t ny_;
};

using ProblemPtr = std::shared_ptr<const SaddleProblem>;

// ---------------------------------------------------------------------------
// Quadratic instances:
//   f_m(x, y) = ½xᵀA_m x + xᵀB_m y - ½yᵀC_m y + a_mᵀx - c_mᵀy

struct QuadraticNode {
  Matrix a;       // nx × nx, symmetric
  Matrix b;       // nx × ny
  Matrix c;       // ny × ny, symmetric
  Vector a_lin;   // nx
  Vector c_lin;   // ny
};

struct QuadraticSpec {
  std::vector<QuadraticNode> nodes;
  double mu = 0.0;      // required lower spectral bound of every A_m, C_m
  double l_max = 0.0;   // required upper bound on every local Lipschitz constant
  std::uint64_t seed = 0;
};

/// Heterogeneous random family. Each node mixes a shared base with its own
/// draw, A_m = (1 - het) A + het R_m, with spectra of A, R_m, C, R'_m spread
/// over [mu, L/2] and ‖B‖, ‖B_m‖ <= L/2, so every local operator is
/// mu-strongly monotone and L-Lipschitz. het lies in [0, 1].
QuadraticSpec random_quadratic_spec(std::size_t nodes, std::size_t nx, std::size_t ny, double mu,
                                    double l, double het, std::uint64_t seed);

class QuadraticProblem;
std::shared_ptr<const QuadraticProblem> make_quadratic(const QuadraticSpec& spec);

class QuadraticProblem final : public SaddleProblem {
 public:
  void local_operator(std::size_t m, std::span<const double> z,
                      std::span<double> out) const override;
  std::optional<Vector> solution() const override { return solution_; }
  bool has_gap_oracle() const noexcept override { return true; }
  double gap(std::span<const double> z) const override;
  std::optional<double> objective(std::span<const double> z) const override;
  std::optional<double> local_objective(std::size_t m,
                                        std::span<const double> z) const override;

  const QuadraticNode& node(std::size_t m) const { return nodes_.at(m); }
  /// Averaged data (Ā, B̄, C̄, ā, c̄).
  const QuadraticNode& mean() const noexcept { return mean_; }

 private:
  friend std::shared_ptr<const QuadraticProblem> make_quadratic(const QuadraticSpec& spec);
  explicit QuadraticProblem(const QuadraticSpec& spec);

  std::vector<QuadraticNode> nodes_;
  QuadraticNode mean_;
  Vector solution_;
};

// ---------------------------------------------------------------------------
// Bilinear matrix games f_m(x, y) = xᵀA_m y over two probability simplices.

struct MatrixGameSpec {
  std::vector<Matrix> payoffs;  // A_m, all nx × ny
};

/// Entries of each A_m uniform in [-1, 1].
MatrixGameSpec random_matrix_game_spec(std::size_t nodes, std::size_t nx, std::size_t ny,
                                       std::uint64_t seed);

/// A_m = P + het (R_m - mean R) with P = [[1, -1], [-1, 1]], so the averaged
/// game is exactly matching pennies.
MatrixGameSpec matching_pennies_spec(std::size_t nodes, double het, std::uint64_t seed);

class MatrixGameProblem;
std::shared_ptr<const MatrixGameProblem> make_matrix_game(const MatrixGameSpec& spec);

class MatrixGameProblem final : public SaddleProblem {
 public:
  void local_operator(std::size_t m, std::span<const double> z,
                      std::span<double> out) const override;
  bool is_constrained() const noexcept override { return true; }
  void project_in_place(std::span<double> z) const override;
  std::optional<Vector> solution() const override { return solution_; }
  bool has_gap_oracle() const noexcept override { return true; }
  double gap(std::span<const double> z) const override;
  std::optional<double> objective(std::span<const double> z) const override;
  std::optional<double> local_objective(std::size_t m,
                                        std::span<const double> z) const override;

  const Matrix& mean_payoff() const noexcept { return mean_; }

 private:
  friend std::shared_ptr<const MatrixGameProblem> make_matrix_game(const MatrixGameSpec& spec);
  explicit MatrixGameProblem(const MatrixGameSpec& spec);

  std::vector<Matrix> payoffs_;
  Matrix mean_;
  std::optional<Vector> solution_;
};

/// Exact diameter bound used for a product of two simplices.
inline constexpr double kSimplexProductDiameter = 2.8284271247461903;  // 2√2

// ---------------------------------------------------------------------------
// Proximal regularization of a bounded problem:
//   f(x, y) + (ε / 4D²)‖x - x⁰‖² - (ε / 4D²)‖y - y⁰‖²
// which adds (ε / 2D²)(z - z⁰) to every local operator.

class RegularizedProblem final : public SaddleProblem {
 public:
  RegularizedProblem(ProblemPtr base, double eps, Vector anchor);

  void local_operator(std::size_t m, std::span<const double> z,
                      std::span<double> out) const override;
  bool is_constrained() const noexcept override { return base_->is_constrained(); }
  void project_in_place(std::span<double> z) const override { base_->project_in_place(z); }
  std::optional<Vector> solution() const override { return solution_; }
  std::optional<double> objective(std::span<const double> z) const override;

  const ProblemPtr& base() const noexcept { return base_; }
  double eps() const noexcept { return eps_; }
  double weight() const noexcept { return weight_; }
  const Vector& anchor() const noexcept { return anchor_; }

 private:
  ProblemPtr base_;
  double eps_;
  double weight_;  // ε / (2D²)
  Vector anchor_;
  Vector solution_;
};

/// Throws ValidationError when `base` is unbounded or eps <= 0.
std::shared_ptr<const RegularizedProblem> regularize(ProblemPtr base, double eps, Vector anchor);

// ---------------------------------------------------------------------------
// Empirical property probes over random pairs of feasible points.

/// max ‖F(z₁) - F(z₂)‖ / ‖z₁ - z₂‖.
double check_lipschitz(const SaddleProblem& p, std::size_t trials, std::uint64_t seed);
/// Same ratio for one local operator F_m.
double check_local_lipschitz(const SaddleProblem& p, std::size_t m, std::size_t trials,
                             std::uint64_t seed);
/// min ⟨F(z₁) - F(z₂), z₁ - z₂⟩ / ‖z₁ - z₂‖².
double check_monotonicity(const SaddleProblem& p, std::size_t trials, std::uint64_t seed);

/// Feasible point drawn from a standard normal and projected onto Z.
Vector random_feasible_point(const SaddleProblem& p, std::uint64_t seed);

}  // namespace tvsaddle
