#include "tvsaddle/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "tvsaddle/errors.hpp"

namespace tvsaddle {

// ---------------------------------------------------------------------------
// SaddleProblem

SaddleProblem::SaddleProblem(std::size_t nodes, std::size_t nx, std::size_t ny)
    : nodes_(nodes), nx_(nx), ny_(ny) {
  if (nodes == 0) throw ValidationError("saddle problem needs at least one node");
  if (nx == 0 || ny == 0) throw ValidationError("saddle problem needs nx, ny >= 1");
}

void SaddleProblem::check_point(std::span<const double> z) const {
  if (z.size() != dim()) {
    throw ValidationError("point has dimension " + std::to_string(z.size()) + ", expected " +
                          std::to_string(dim()));
  }
}

Vector SaddleProblem::local_operator(std::size_t m, std::span<const double> z) const {
  Vector out(dim());
  local_operator(m, z, out);
  return out;
}

Vector SaddleProblem::global_operator(std::span<const double> z) const {
  Vector sum(dim(), 0.0);
  Vector scratch(dim());
  for (std::size_t m = 0; m < node_count(); ++m) {
    local_operator(m, z, scratch);
    axpy(1.0, scratch, sum);
  }
  const double inv = 1.0 / static_cast<double>(node_count());
  for (double& v : sum) v *= inv;
  return sum;
}

void SaddleProblem::project_in_place(std::span<double> z) const { check_point(z); }

Vector SaddleProblem::project(std::span<const double> z) const {
  Vector out(z.begin(), z.end());
  project_in_place(out);
  return out;
}

double SaddleProblem::gap(std::span<const double>) const {
  throw UnsupportedMetricError("gap: this problem has no gap oracle");
}

std::optional<double> SaddleProblem::objective(std::span<const double>) const {
  return std::nullopt;
}

std::optional<double> SaddleProblem::local_objective(std::size_t, std::span<const double>) const {
  return std::nullopt;
}

namespace {

using Rng = std::mt19937_64;

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (double& v : g.row(i)) v = normal(rng);
  return g;
}

// Modified Gram–Schmidt on the columns of a Gaussian matrix.
Matrix random_orthogonal(std::size_t n, Rng& rng) {
  Matrix q = gaussian_matrix(n, n, rng);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double proj = 0.0;
      for (std::size_t i = 0; i < n; ++i) proj += q(i, j) * q(i, k);
      for (std::size_t i = 0; i < n; ++i) q(i, j) -= proj * q(i, k);
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += q(i, j) * q(i, j);
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
  }
  return q;
}

// Q diag(spectrum) Qᵀ with the spectrum spread over [lo, hi], endpoints included.
Matrix random_spd(std::size_t n, double lo, double hi, Rng& rng) {
  const Matrix q = random_orthogonal(n, rng);
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) /
                                                   static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += lambda * q(i, k) * q(j, k);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out(i, j) = out(j, i) = 0.5 * (out(i, j) + out(j, i));
  return out;
}

Matrix random_bounded(std::size_t rows, std::size_t cols, double bound, Rng& rng) {
  Matrix g = gaussian_matrix(rows, cols, rng);
  const double s = spectral_norm(g);
  return s > 0.0 ? (bound / s) * g : g;
}

Vector gaussian_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

Vector blend(const Vector& base, const Vector& own, double het) {
  Vector out(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) out[i] = (1.0 - het) * base[i] + het * own[i];
  return out;
}

// J = [[A, B], [-Bᵀ, C]], the Jacobian of the local operator.
Matrix operator_jacobian(const QuadraticNode& n) {
  const std::size_t nx = n.a.rows(), ny = n.c.rows();
  Matrix j(nx + ny, nx + ny);
  for (std::size_t r = 0; r < nx; ++r) {
    for (std::size_t c = 0; c < nx; ++c) j(r, c) = n.a(r, c);
    for (std::size_t c = 0; c < ny; ++c) {
      j(r, nx + c) = n.b(r, c);
      j(nx + c, r) = -n.b(r, c);
    }
  }
  for (std::size_t r = 0; r < ny; ++r)
    for (std::size_t c = 0; c < ny; ++c) j(nx + r, nx + c) = n.c(r, c);
  return j;
}

double quad_value(const QuadraticNode& n, std::span<const double> x, std::span<const double> y) {
  const Vector ax = n.a * x;
  const Vector by = n.b * y;
  const Vector cy = n.c * y;
  return 0.5 * dot(x, ax) + dot(x, by) - 0.5 * dot(y, cy) + dot(n.a_lin, x) - dot(n.c_lin, y);
}

}  // namespace

// ---------------------------------------------------------------------------
// Quadratic

QuadraticSpec random_quadratic_spec(std::size_t nodes, std::size_t nx, std::size_t ny, double mu,
                                    double l, double het, std::uint64_t seed) {
  if (nodes == 0 || nx == 0 || ny == 0)
    throw ValidationError("quadratic: nodes, nx and ny must be positive");
  if (!(mu > 0.0)) throw ValidationError("quadratic: mu must be positive");
  if (!(l >= 2.0 * mu)) throw ValidationError("quadratic: L must be at least 2*mu");
  if (!(het >= 0.0 && het <= 1.0)) throw ValidationError("quadratic: het must lie in [0, 1]");

  Rng rng(seed);
  const double hi = 0.5 * l;
  const QuadraticNode base{random_spd(nx, mu, hi, rng), random_bounded(nx, ny, hi, rng),
                           random_spd(ny, mu, hi, rng), gaussian_vector(nx, rng),
                           gaussian_vector(ny, rng)};
  QuadraticSpec spec{{}, mu, l, seed};
  spec.nodes.reserve(nodes);
  for (std::size_t m = 0; m < nodes; ++m) {
    const QuadraticNode own{random_spd(nx, mu, hi, rng), random_bounded(nx, ny, hi, rng),
                            random_spd(ny, mu, hi, rng), gaussian_vector(nx, rng),
                            gaussian_vector(ny, rng)};
    spec.nodes.push_back({(1.0 - het) * base.a + het * own.a, (1.0 - het) * base.b + het * own.b,
                          (1.0 - het) * base.c + het * own.c, blend(base.a_lin, own.a_lin, het),
                          blend(base.c_lin, own.c_lin, het)});
  }
  return spec;
}

QuadraticProblem::QuadraticProblem(const QuadraticSpec& spec)
    : SaddleProblem(spec.nodes.size(), spec.nodes.empty() ? 0 : spec.nodes[0].a.rows(),
                    spec.nodes.empty() ? 0 : spec.nodes[0].c.rows()),
      nodes_(spec.nodes) {
  const std::size_t nx = this->nx(), ny = this->ny();
  if (!(spec.mu > 0.0)) throw ValidationError("quadratic: mu must be positive");

  constexpr double kTol = 1e-10;
  auto check_block = [&](const Matrix& block, const char* name, std::size_t m) {
    if (!is_symmetric(block)) {
      throw ValidationError(std::string("quadratic: ") + name + "_" + std::to_string(m) +
                            " is not symmetric");
    }
    const Vector ev = sym_eigvals(block);
    auto fail = [&](double lambda, const char* bound) {
      std::ostringstream msg;
      msg << "quadratic: eigenvalue " << lambda << " of " << name << "_" << m
          << " violates the " << bound << " bound";
      throw ValidationError(msg.str());
    };
    if (ev.back() < spec.mu - kTol) fail(ev.back(), "mu");
    if (ev.front() > spec.l_max + kTol) fail(ev.front(), "L_max");
  };

  mean_ = QuadraticNode{Matrix(nx, nx), Matrix(nx, ny), Matrix(ny, ny), Vector(nx, 0.0),
                        Vector(ny, 0.0)};
  double l_max = 0.0;
  for (std::size_t m = 0; m < nodes_.size(); ++m) {
    const QuadraticNode& n = nodes_[m];
    if (n.a.rows() != nx || n.a.cols() != nx || n.b.rows() != nx || n.b.cols() != ny ||
        n.c.rows() != ny || n.c.cols() != ny || n.a_lin.size() != nx || n.c_lin.size() != ny) {
      throw ValidationError("quadratic: node " + std::to_string(m) + " has inconsistent shapes");
    }
    check_block(n.a, "A", m);
    check_block(n.c, "C", m);
    const double lm = spectral_norm(operator_jacobian(n));
    if (lm > spec.l_max * (1.0 + kTol)) {
      std::ostringstream msg;
      msg << "quadratic: local operator " << m << " has Lipschitz constant " << lm
          << " above L_max " << spec.l_max;
      throw ValidationError(msg.str());
    }
    l_max = std::max(l_max, lm);
    mean_.a = mean_.a + n.a;
    mean_.b = mean_.b + n.b;
    mean_.c = mean_.c + n.c;
    axpy(1.0, n.a_lin, mean_.a_lin);
    axpy(1.0, n.c_lin, mean_.c_lin);
  }
  const double inv = 1.0 / static_cast<double>(nodes_.size());
  mean_.a = inv * mean_.a;
  mean_.b = inv * mean_.b;
  mean_.c = inv * mean_.c;
  for (double& v : mean_.a_lin) v *= inv;
  for (double& v : mean_.c_lin) v *= inv;

  const Matrix jbar = operator_jacobian(mean_);
  constants_.l_global = spectral_norm(jbar);
  constants_.l_max = l_max;
  constants_.mu = std::min(sym_eigvals(mean_.a).back(), sym_eigvals(mean_.c).back());

  Vector rhs(nx + ny);
  for (std::size_t i = 0; i < nx; ++i) rhs[i] = -mean_.a_lin[i];
  for (std::size_t i = 0; i < ny; ++i) rhs[nx + i] = -mean_.c_lin[i];
  solution_ = solve_linear(jbar, rhs);
}

std::shared_ptr<const QuadraticProblem> make_quadratic(const QuadraticSpec& spec) {
  if (spec.nodes.empty()) throw ValidationError("quadratic: spec has no nodes");
  return std::shared_ptr<const QuadraticProblem>(new QuadraticProblem(spec));
}

void QuadraticProblem::local_operator(std::size_t m, std::span<const double> z,
                                      std::span<double> out) const {
  check_point(z);
  const QuadraticNode& n = nodes_.at(m);
  const std::size_t nx = this->nx(), ny = this->ny();
  const auto x = z.first(nx);
  const auto y = z.subspan(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    double s = n.a_lin[i];
    for (std::size_t j = 0; j < nx; ++j) s += n.a(i, j) * x[j];
    for (std::size_t j = 0; j < ny; ++j) s += n.b(i, j) * y[j];
    out[i] = s;
  }
  // -∇_y f_m = C y - Bᵀx + c
  for (std::size_t i = 0; i < ny; ++i) {
    double s = n.c_lin[i];
    for (std::size_t j = 0; j < ny; ++j) s += n.c(i, j) * y[j];
    for (std::size_t j = 0; j < nx; ++j) s -= n.b(j, i) * x[j];
    out[nx + i] = s;
  }
}

std::optional<double> QuadraticProblem::objective(std::span<const double> z) const {
  check_point(z);
  return quad_value(mean_, z.first(nx()), z.subspan(nx()));
}

std::optional<double> QuadraticProblem::local_objective(std::size_t m,
                                                        std::span<const double> z) const {
  check_point(z);
  return quad_value(nodes_.at(m), z.first(nx()), z.subspan(nx()));
}

double QuadraticProblem::gap(std::span<const double> z) const {
  check_point(z);
  const auto x = z.first(nx());
  const auto y = z.subspan(nx());
  // argmax_y' f(x, y'):  C̄ y' = B̄ᵀx - c̄
  Vector rhs_y = mean_.b.transpose() * x;
  for (std::size_t i = 0; i < ny(); ++i) rhs_y[i] -= mean_.c_lin[i];
  const Vector y_best = solve_linear(mean_.c, rhs_y);
  // argmin_x' f(x', y):  Ā x' = -(B̄ y + ā)
  Vector rhs_x = mean_.b * y;
  for (std::size_t i = 0; i < nx(); ++i) rhs_x[i] = -(rhs_x[i] + mean_.a_lin[i]);
  const Vector x_best = solve_linear(mean_.a, rhs_x);
  return quad_value(mean_, x, y_best) - quad_value(mean_, x_best, y);
}

// ---------------------------------------------------------------------------
// Matrix games

MatrixGameSpec random_matrix_game_spec(std::size_t nodes, std::size_t nx, std::size_t ny,
                                       std::uint64_t seed) {
  if (nodes == 0 || nx == 0 || ny == 0)
    throw ValidationError("matrix_game: nodes, nx and ny must be positive");
  Rng rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  MatrixGameSpec spec;
  for (std::size_t m = 0; m < nodes; ++m) {
    Matrix a(nx, ny);
    for (std::size_t i = 0; i < nx; ++i)
      for (double& v : a.row(i)) v = uniform(rng);
    spec.payoffs.push_back(std::move(a));
  }
  return spec;
}

MatrixGameSpec matching_pennies_spec(std::size_t nodes, double het, std::uint64_t seed) {
  if (!(het >= 0.0)) throw ValidationError("matching_pennies: het must be >= 0");
  const Matrix pennies = Matrix::from_rows({{1.0, -1.0}, {-1.0, 1.0}});
  MatrixGameSpec noise = random_matrix_game_spec(nodes, 2, 2, seed);
  Matrix noise_mean(2, 2);
  for (const Matrix& r : noise.payoffs) noise_mean = noise_mean + r;
  noise_mean = (1.0 / static_cast<double>(nodes)) * noise_mean;
  MatrixGameSpec spec;
  for (const Matrix& r : noise.payoffs) spec.payoffs.push_back(pennies + het * (r - noise_mean));
  return spec;
}

MatrixGameProblem::MatrixGameProblem(const MatrixGameSpec& spec)
    : SaddleProblem(spec.payoffs.size(), spec.payoffs.empty() ? 0 : spec.payoffs[0].rows(),
                    spec.payoffs.empty() ? 0 : spec.payoffs[0].cols()),
      payoffs_(spec.payoffs),
      mean_(nx(), ny()) {
  double l_max = 0.0;
  for (std::size_t m = 0; m < payoffs_.size(); ++m) {
    const Matrix& a = payoffs_[m];
    if (a.rows() != nx() || a.cols() != ny()) {
      throw ValidationError("matrix_game: payoff " + std::to_string(m) + " has shape " +
                            std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                            ", expected " + std::to_string(nx()) + "x" + std::to_string(ny()));
    }
    if (!a.all_finite()) throw ValidationError("matrix_game: non-finite payoff entry");
    l_max = std::max(l_max, spectral_norm(a));
    mean_ = mean_ + a;
  }
  mean_ = (1.0 / static_cast<double>(payoffs_.size())) * mean_;

  // ‖[[0, Ā], [-Āᵀ, 0]]‖ = σ_max(Ā)
  constants_.l_global = spectral_norm(mean_);
  constants_.l_max = l_max;
  constants_.mu = 0.0;
  constants_.diameter = kSimplexProductDiameter;

  // Averaged matching pennies: the unique equilibrium is uniform play.
  const Matrix pennies = Matrix::from_rows({{1.0, -1.0}, {-1.0, 1.0}});
  if (nx() == 2 && ny() == 2) {
    bool same = true;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) same = same && std::abs(mean_(i, j) - pennies(i, j)) < 1e-12;
    if (same) solution_ = Vector{0.5, 0.5, 0.5, 0.5};
  }
}

std::shared_ptr<const MatrixGameProblem> make_matrix_game(const MatrixGameSpec& spec) {
  if (spec.payoffs.empty()) throw ValidationError("matrix_game: spec has no payoffs");
  return std::shared_ptr<const MatrixGameProblem>(new MatrixGameProblem(spec));
}

void MatrixGameProblem::local_operator(std::size_t m, std::span<const double> z,
                                       std::span<double> out) const {
  check_point(z);
  const Matrix& a = payoffs_.at(m);
  const std::size_t nx = this->nx(), ny = this->ny();
  for (std::size_t i = 0; i < nx; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < ny; ++j) s += a(i, j) * z[nx + j];
    out[i] = s;
  }
  for (std::size_t j = 0; j < ny; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < nx; ++i) s += a(i, j) * z[i];
    out[nx + j] = -s;
  }
}

void MatrixGameProblem::project_in_place(std::span<double> z) const {
  check_point(z);
  const Vector x = project_simplex(z.first(nx()));
  const Vector y = project_simplex(z.subspan(nx()));
  std::copy(x.begin(), x.end(), z.begin());
  std::copy(y.begin(), y.end(), z.begin() + static_cast<std::ptrdiff_t>(nx()));
}

double MatrixGameProblem::gap(std::span<const double> z) const {
  check_point(z);
  const Vector ax = mean_.transpose() * z.first(nx());
  const Vector ay = mean_ * z.subspan(nx());
  return *std::max_element(ax.begin(), ax.end()) - *std::min_element(ay.begin(), ay.end());
}

std::optional<double> MatrixGameProblem::objective(std::span<const double> z) const {
  check_point(z);
  return dot(z.first(nx()), mean_ * z.subspan(nx()));
}

std::optional<double> MatrixGameProblem::local_objective(std::size_t m,
                                                         std::span<const double> z) const {
  check_point(z);
  return dot(z.first(nx()), payoffs_.at(m) * z.subspan(nx()));
}

// ---------------------------------------------------------------------------
// Regularization

namespace {

// Projected extragradient on the averaged operator until the step stalls.
// Only used on strongly monotone problems, where it converges linearly.
Vector solve_by_extragradient(const SaddleProblem& p, Vector z) {
  const double gamma = 1.0 / (2.0 * p.constants().l_global);
  constexpr std::size_t kMaxIterations = 20'000'000;
  for (std::size_t k = 0; k < kMaxIterations; ++k) {
    Vector half = z;
    axpy(-gamma, p.global_operator(z), half);
    p.project_in_place(half);
    Vector next = z;
    axpy(-gamma, p.global_operator(half), next);
    p.project_in_place(next);
    const double step = distance(next, z);
    z = std::move(next);
    if (step <= 1e-15) return z;
  }
  throw SolverError("regularize: reference extragradient did not converge");
}

}  // namespace

RegularizedProblem::RegularizedProblem(ProblemPtr base, double eps, Vector anchor)
    : SaddleProblem(base ? base->node_count() : 0, base ? base->nx() : 0, base ? base->ny() : 0),
      base_(std::move(base)),
      eps_(eps),
      weight_(0.0),
      anchor_(std::move(anchor)) {
  if (!base_) throw ValidationError("regularize: null base problem");
  if (!(eps_ > 0.0)) throw ValidationError("regularize: eps must be positive");
  const auto& bc = base_->constants();
  if (!bc.diameter) throw ValidationError("regularize: feasible set is unbounded (D required)");
  check_point(anchor_);
  const double d = *bc.diameter;
  weight_ = eps_ / (2.0 * d * d);
  constants_.l_global = bc.l_global + weight_;
  constants_.l_max = bc.l_max + weight_;
  constants_.mu = bc.mu + weight_;
  constants_.diameter = bc.diameter;
  solution_ = solve_by_extragradient(*this, base_->project(anchor_));
}

void RegularizedProblem::local_operator(std::size_t m, std::span<const double> z,
                                        std::span<double> out) const {
  base_->local_operator(m, z, out);
  for (std::size_t i = 0; i < z.size(); ++i) out[i] += weight_ * (z[i] - anchor_[i]);
}

std::optional<double> RegularizedProblem::objective(std::span<const double> z) const {
  const auto f = base_->objective(z);
  if (!f) return std::nullopt;
  double dx = 0.0, dy = 0.0;
  for (std::size_t i = 0; i < nx(); ++i) dx += (z[i] - anchor_[i]) * (z[i] - anchor_[i]);
  for (std::size_t i = nx(); i < dim(); ++i) dy += (z[i] - anchor_[i]) * (z[i] - anchor_[i]);
  return *f + 0.5 * weight_ * (dx - dy);
}

std::shared_ptr<const RegularizedProblem> regularize(ProblemPtr base, double eps, Vector anchor) {
  if (!base) throw ValidationError("regularize: null base problem");
  return std::make_shared<const RegularizedProblem>(std::move(base), eps, std::move(anchor));
}

// ---------------------------------------------------------------------------
// Property probes

Vector random_feasible_point(const SaddleProblem& p, std::uint64_t seed) {
  Rng rng(seed);
  Vector z = gaussian_vector(p.dim(), rng);
  p.project_in_place(z);
  return z;
}

namespace {

template <typename Eval, typename Reduce>
double probe_pairs(const SaddleProblem& p, std::size_t trials, std::uint64_t seed, Eval eval,
                   double init, Reduce reduce) {
  if (trials == 0) throw ValidationError("property probe: trials must be >= 1");
  Rng rng(seed);
  double acc = init;
  Vector f1(p.dim()), f2(p.dim());
  for (std::size_t t = 0; t < trials; ++t) {
    Vector z1 = gaussian_vector(p.dim(), rng);
    Vector z2 = gaussian_vector(p.dim(), rng);
    p.project_in_place(z1);
    p.project_in_place(z2);
    const double dz = distance(z1, z2);
    if (dz < 1e-12) continue;
    eval(z1, f1);
    eval(z2, f2);
    acc = reduce(acc, f1, f2, z1, z2, dz);
  }
  return acc;
}

double lipschitz_reduce(double acc, const Vector& f1, const Vector& f2, const Vector&,
                        const Vector&, double dz) {
  return std::max(acc, distance(f1, f2) / dz);
}

}  // namespace

double check_lipschitz(const SaddleProblem& p, std::size_t trials, std::uint64_t seed) {
  return probe_pairs(
      p, trials, seed, [&](const Vector& z, Vector& out) { out = p.global_operator(z); }, 0.0,
      lipschitz_reduce);
}

double check_local_lipschitz(const SaddleProblem& p, std::size_t m, std::size_t trials,
                             std::uint64_t seed) {
  return probe_pairs(
      p, trials, seed, [&](const Vector& z, Vector& out) { p.local_operator(m, z, out); }, 0.0,
      lipschitz_reduce);
}

double check_monotonicity(const SaddleProblem& p, std::size_t trials, std::uint64_t seed) {
  return probe_pairs(
      p, trials, seed, [&](const Vector& z, Vector& out) { out = p.global_operator(z); },
      std::numeric_limits<double>::infinity(),
      [](double acc, const Vector& f1, const Vector& f2, const Vector& z1, const Vector& z2,
         double dz) {
        double inner = 0.0;
        for (std::size_t i = 0; i < z1.size(); ++i) inner += (f1[i] - f2[i]) * (z1[i] - z2[i]);
        return std::min(acc, inner / (dz * dz));
      });
}

}  // namespace tvsaddle
