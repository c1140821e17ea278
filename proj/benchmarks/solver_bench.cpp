#include <benchmark/benchmark.h>

#include <memory>

#include "tvsaddle/gossip.hpp"
#include "tvsaddle/problems.hpp"
#include "tvsaddle/solver.hpp"

namespace {

using namespace tvsaddle;

void BM_GossipRotatingStar(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const MixingSchedule schedule(make_rotating_star(m, 1));
  NodeStates s(m, 8);
  for (std::size_t i = 0; i < m; ++i) s.row(i)[0] = static_cast<double>(i);
  Matrix scratch;
  for (auto _ : state) {
    gossip_in_place(s, schedule, 0, scratch);
    benchmark::DoNotOptimize(s.rows());
  }
}
BENCHMARK(BM_GossipRotatingStar)->Arg(5)->Arg(20)->Arg(80);

void BM_TvdesmIterationQuadratic(benchmark::State& state) {
  const std::size_t m = 5;
  const auto d = static_cast<std::size_t>(state.range(0));
  SolverConfig cfg;
  cfg.problem = make_quadratic(random_quadratic_spec(m, d, d, 0.1, 1.0, 0.5, 3));
  cfg.schedule = std::make_shared<const MixingSchedule>(make_static(TopologyKind::kRing, m));
  cfg.gamma = default_stepsize(*cfg.problem);
  cfg.gossip_steps = 20;
  cfg.z0 = Vector(cfg.problem->dim(), 0.0);
  TvdesmSolver solver(cfg);
  for (auto _ : state) solver.step();
  state.counters["rounds"] = static_cast<double>(solver.rounds());
}
BENCHMARK(BM_TvdesmIterationQuadratic)->Arg(2)->Arg(8)->Arg(32);

}  // namespace
