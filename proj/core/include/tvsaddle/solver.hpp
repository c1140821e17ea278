#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "tvsaddle/errors.hpp"
#include "tvsaddle/gossip.hpp"
#include "tvsaddle/metrics.hpp"
#include "tvsaddle/mixing.hpp"
#include "tvsaddle/problems.hpp"

namespace tvsaddle {

struct SolverConfig {
  ProblemPtr problem;
  std::shared_ptr<const MixingSchedule> schedule;
  double gamma = 0.0;
  std::size_t gossip_steps = 0;  // H; each gossip phase performs H + 1 rounds
  std::size_t iterations = 1;    // K
  std::size_t record_every = 1;
  Vector z0;                     // replicated to every node; must lie in Z
  // When false, gamma above 1/(4 L_max) is accepted (used to reproduce
  // divergence from the command line).
  bool check_stepsize = true;
};

/// Throws ValidationError unless gamma ∈ (0, 1/(4 L_max)] (upper bound
/// skipped when check_stepsize is false), K >= 1,
/// record_every >= 1, shapes agree and z0 is feasible.
void validate(const SolverConfig& cfg);

/// 1 / (4 L_max).
double default_stepsize(const SaddleProblem& problem);

struct TrajectoryPoint {
  std::size_t k = 0;
  std::uint64_t rounds = 0;             // communication rounds used so far
  std::uint64_t evaluations = 0;        // local operator calls per node
  Vector mean;                          // z̄ᵏ
  Vector ergodic;                       // (1/(Mk)) Σ_{t<k} Σ_m z_m^{t+1/2}; z⁰ at k = 0
  double consensus = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
};

/// Metrics along a trajectory; absent fields where the problem lacks an oracle.
std::vector<MetricPoint> evaluate(const Trajectory& trajectory, const SaddleProblem& problem);

/// Divergence during run(); carries everything recorded before the failure.
class RunDiverged : public DivergenceError {
 public:
  RunDiverged(const DivergenceError& cause, Trajectory partial)
      : DivergenceError(cause), partial_(std::move(partial)) {}
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

/// Decentralized extra-step method over a time-varying network.
///
/// Per iteration every node m
///   (a) ẑ_m = z_m - γ F_m(z_m)          (b) gossip, H + 1 rounds
///   (c) z_m^{1/2} = proj(ẑ_m)
///   (d) ẑ_m = z_m - γ F_m(z_m^{1/2})    (e) gossip, H + 1 rounds
///   (f) z_m ← proj(ẑ_m)
/// Step (d) starts from z_m, not from the half step. The averaged iterates
/// z̄ᵏ are observed from outside and never fed back.
class TvdesmSolver {
 public:
  explicit TvdesmSolver(SolverConfig cfg);
  /// Starts from arbitrary node states (round cursor included) instead of z0.
  TvdesmSolver(SolverConfig cfg, NodeStates initial);

  /// One outer iteration. Throws DivergenceError on a non-finite value or a
  /// coordinate above 1e12 in magnitude.
  void step();

  const SolverConfig& config() const noexcept { return cfg_; }
  const NodeStates& states() const noexcept { return states_; }
  const NodeStates& half_states() const noexcept { return half_; }
  std::size_t iteration() const noexcept { return k_; }
  std::uint64_t rounds() const noexcept { return rounds_; }
  std::uint64_t evaluations() const noexcept { return 2 * static_cast<std::uint64_t>(k_); }
  Vector ergodic_average() const;

  TrajectoryPoint snapshot() const;

 private:
  void local_step(const NodeStates& at, NodeStates& out);
  void check_finite(const NodeStates& s) const;

  SolverConfig cfg_;
  NodeStates states_;
  NodeStates half_;
  NodeStates buffer_;
  Matrix scratch_;
  Vector ergodic_sum_;
  std::size_t k_ = 0;
  std::uint64_t rounds_ = 0;
};

/// Functional form of TvdesmSolver::step; `half`, when given, receives z^{k+1/2}.
NodeStates tvdesm_iteration(const NodeStates& states, const SolverConfig& cfg,
                            NodeStates* half = nullptr);

/// K iterations, recording at k = 0, every record_every iterations and at K.
/// Throws RunDiverged with the partial trajectory on divergence.
Trajectory run(const SolverConfig& cfg);

/// Projected extragradient on the averaged operator F:
///   z^{k+1/2} = proj(zᵏ - γF(zᵏ)),  z^{k+1} = proj(zᵏ - γF(z^{k+1/2})).
/// Requires gamma <= 1/(4 L_global).
Trajectory centralized_extragradient(const SaddleProblem& problem, Vector z0, double gamma,
                                     std::size_t iterations, std::size_t record_every = 1);

}  // namespace tvsaddle
