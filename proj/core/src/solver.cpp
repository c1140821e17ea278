#include "tvsaddle/solver.hpp"

#include <cmath>
#include <sstream>

namespace tvsaddle {

namespace {

constexpr double kDivergenceBound = 1e12;
constexpr double kStepsizeSlack = 1e-12;

bool diverged(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x) || std::abs(x) > kDivergenceBound) return true;
  return false;
}

}  // namespace

double default_stepsize(const SaddleProblem& problem) {
  return 1.0 / (4.0 * problem.constants().l_max);
}

void validate(const SolverConfig& cfg) {
  if (!cfg.problem) throw ValidationError("solver: no problem");
  if (!cfg.schedule) throw ValidationError("solver: no topology");
  const SaddleProblem& p = *cfg.problem;
  if (cfg.schedule->node_count() != p.node_count()) {
    throw ValidationError("solver: topology has M=" + std::to_string(cfg.schedule->node_count()) +
                          " but the problem has " + std::to_string(p.node_count()) + " nodes");
  }
  const double bound = default_stepsize(p);
  if (!(cfg.gamma > 0.0) || (cfg.check_stepsize && cfg.gamma > bound * (1.0 + kStepsizeSlack))) {
    std::ostringstream msg;
    msg << "solver: gamma=" << cfg.gamma << " must lie in (0, 1/(4 L_max)] = (0, " << bound << "]";
    throw ValidationError(msg.str());
  }
  if (cfg.iterations < 1) throw ValidationError("solver: K must be >= 1");
  if (cfg.record_every < 1) throw ValidationError("solver: record_every must be >= 1");
  if (cfg.z0.size() != p.dim()) throw ValidationError("solver: z0 has the wrong dimension");
  if (!all_finite(cfg.z0)) throw ValidationError("solver: z0 is not finite");
  if (distance(p.project(cfg.z0), cfg.z0) > 1e-12)
    throw ValidationError("solver: z0 is not in the feasible set");
}

TvdesmSolver::TvdesmSolver(SolverConfig cfg) : cfg_(std::move(cfg)) {
  validate(cfg_);
  states_ = NodeStates::replicated(cfg_.problem->node_count(), cfg_.z0);
  half_ = states_;
  buffer_ = states_;
  ergodic_sum_.assign(cfg_.z0.size(), 0.0);
}

TvdesmSolver::TvdesmSolver(SolverConfig cfg, NodeStates initial)
    : cfg_(std::move(cfg)), states_(std::move(initial)) {
  validate(cfg_);
  if (states_.node_count() != cfg_.problem->node_count() || states_.dim() != cfg_.problem->dim())
    throw ValidationError("solver: initial states do not match the problem shape");
  half_ = states_;
  buffer_ = states_;
  ergodic_sum_.assign(cfg_.z0.size(), 0.0);
}

void TvdesmSolver::local_step(const NodeStates& at, NodeStates& out) {
  const SaddleProblem& p = *cfg_.problem;
  Vector f(p.dim());
  for (std::size_t m = 0; m < p.node_count(); ++m) {
    p.local_operator(m, at.row(m), f);
    auto dst = out.row(m);
    const auto base = states_.row(m);
    for (std::size_t i = 0; i < f.size(); ++i) dst[i] = base[i] - cfg_.gamma * f[i];
  }
}

void TvdesmSolver::check_finite(const NodeStates& s) const {
  if (diverged(s.rows().data())) {
    throw DivergenceError(k_, "solver diverged at iteration " + std::to_string(k_) +
                                  " (non-finite or |z| > 1e12)");
  }
}

void TvdesmSolver::step() {
  const SaddleProblem& p = *cfg_.problem;
  const std::size_t m = p.node_count();

  buffer_.set_round_cursor(states_.round_cursor());
  local_step(states_, buffer_);                                       // (a)
  gossip_in_place(buffer_, *cfg_.schedule, cfg_.gossip_steps, scratch_);  // (b)
  for (std::size_t i = 0; i < m; ++i) p.project_in_place(buffer_.row(i));  // (c)
  check_finite(buffer_);
  std::swap(half_, buffer_);

  buffer_.set_round_cursor(half_.round_cursor());
  local_step(half_, buffer_);                                         // (d)
  gossip_in_place(buffer_, *cfg_.schedule, cfg_.gossip_steps, scratch_);  // (e)
  for (std::size_t i = 0; i < m; ++i) p.project_in_place(buffer_.row(i));  // (f)
  check_finite(buffer_);
  std::swap(states_, buffer_);

  axpy(1.0, half_.mean(), ergodic_sum_);
  ++k_;
  rounds_ += 2 * (static_cast<std::uint64_t>(cfg_.gossip_steps) + 1);
}

Vector TvdesmSolver::ergodic_average() const {
  if (k_ == 0) return cfg_.z0;
  Vector avg = ergodic_sum_;
  for (double& v : avg) v /= static_cast<double>(k_);
  return avg;
}

TrajectoryPoint TvdesmSolver::snapshot() const {
  return {k_, rounds_, evaluations(), states_.mean(), ergodic_average(),
          consensus_error(states_)};
}

NodeStates tvdesm_iteration(const NodeStates& states, const SolverConfig& cfg, NodeStates* half) {
  SolverConfig one = cfg;
  if (states.node_count() > 0) one.z0.assign(states.row(0).begin(), states.row(0).end());
  TvdesmSolver solver(std::move(one), states);
  solver.step();
  if (half) *half = solver.half_states();
  return solver.states();
}

Trajectory run(const SolverConfig& cfg) {
  TvdesmSolver solver(cfg);
  Trajectory traj;
  traj.points.push_back(solver.snapshot());
  try {
    for (std::size_t k = 1; k <= cfg.iterations; ++k) {
      solver.step();
      if (k % cfg.record_every == 0 || k == cfg.iterations) traj.points.push_back(solver.snapshot());
    }
  } catch (const DivergenceError& e) {
    throw RunDiverged(e, std::move(traj));
  }
  return traj;
}

Trajectory centralized_extragradient(const SaddleProblem& problem, Vector z0, double gamma,
                                     std::size_t iterations, std::size_t record_every) {
  const double bound = 1.0 / (4.0 * problem.constants().l_global);
  if (!(gamma > 0.0) || gamma > bound * (1.0 + kStepsizeSlack))
    throw ValidationError("centralized_extragradient: gamma must lie in (0, 1/(4 L)]");
  if (record_every < 1) throw ValidationError("centralized_extragradient: record_every >= 1");
  if (z0.size() != problem.dim()) throw ValidationError("centralized_extragradient: bad z0");

  Trajectory traj;
  Vector z = std::move(z0);
  Vector sum(z.size(), 0.0);
  traj.points.push_back({0, 0, 0, z, z, 0.0});
  for (std::size_t k = 1; k <= iterations; ++k) {
    Vector half = z;
    axpy(-gamma, problem.global_operator(z), half);
    problem.project_in_place(half);
    Vector next = z;
    axpy(-gamma, problem.global_operator(half), next);
    problem.project_in_place(next);
    if (diverged(next) || diverged(half)) {
      throw DivergenceError(k, "centralized extragradient diverged at iteration " +
                                   std::to_string(k));
    }
    z = std::move(next);
    axpy(1.0, half, sum);
    if (k % record_every == 0 || k == iterations) {
      Vector avg = sum;
      for (double& v : avg) v /= static_cast<double>(k);
      traj.points.push_back({k, 0, 2 * static_cast<std::uint64_t>(k), z, std::move(avg), 0.0});
    }
  }
  return traj;
}

std::vector<MetricPoint> evaluate(const Trajectory& trajectory, const SaddleProblem& problem) {
  const auto zstar = problem.solution();
  std::vector<MetricPoint> out;
  out.reserve(trajectory.points.size());
  for (const auto& pt : trajectory.points) {
    MetricPoint mp{pt.k, pt.rounds, std::nullopt, std::nullopt, pt.consensus};
    if (zstar) mp.dist_sq = distance_sq(pt.mean, *zstar);
    if (problem.has_gap_oracle()) mp.gap = gap_of(problem, pt.ergodic);
    out.push_back(mp);
  }
  return out;
}

}  // namespace tvsaddle
