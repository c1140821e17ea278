#include <cmath>
#include <random>

#include "doctest.h"
#include "tvsaddle/errors.hpp"
#include "tvsaddle/gossip.hpp"
#include "tvsaddle/metrics.hpp"

using namespace tvsaddle;

namespace {

NodeStates random_states(std::size_t m, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  NodeStates s(m, d);
  for (std::size_t i = 0; i < m; ++i)
    for (double& x : s.row(i)) x = normal(rng);
  return s;
}

}  // namespace

TEST_CASE("gossip examples") {
  const MixingSchedule path2(make_static(TopologyKind::kPath, 2));
  NodeStates s(Matrix::from_rows({{0}, {2}}));
  const NodeStates out = gossip_round(s, path2);
  CHECK(out.row(0)[0] == doctest::Approx(1.0));
  CHECK(out.row(1)[0] == doctest::Approx(1.0));
  CHECK(out.round_cursor() == 1);

  const MixingSchedule k3(make_static(TopologyKind::kComplete, 3));
  const NodeStates r = random_states(3, 4, 2);
  const Vector mean = r.mean();
  const NodeStates once = gossip_round(r, k3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(once.row(i)[j] - mean[j]) < 1e-12);

  const NodeStates same = NodeStates::replicated(3, Vector{1.5, -2.0});
  const NodeStates after = gossip(same, k3, 5);
  CHECK(after.rows() == same.rows());
}

TEST_CASE("gossip runs H+1 multiplications") {
  const MixingSchedule star(make_rotating_star(4, 1));
  const NodeStates s = random_states(4, 2, 3);
  CHECK(gossip(s, star, 0).round_cursor() == 1);
  CHECK(gossip(s, star, 6).round_cursor() == 7);

  // H=0 equals exactly one round.
  const NodeStates one = gossip_round(s, star);
  CHECK(gossip(s, star, 0).rows() == one.rows());

  // In-place variant agrees with the functional one and starts at the cursor.
  NodeStates t(s.rows(), 5);
  Matrix scratch;
  gossip_in_place(t, star, 3, scratch);
  NodeStates u(s.rows(), 5);
  u = gossip(u, star, 3);
  CHECK(t.rows() == u.rows());
  CHECK(t.round_cursor() == 9);
}

TEST_CASE("gossip preserves the mean") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MixingSchedule sched(make_random_connected(6, 0.3, seed));
    const NodeStates s = random_states(6, 3, seed);
    const NodeStates out = gossip(s, sched, 12);
    const Vector a = s.mean(), b = out.mean();
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(a[j] - b[j]) < 1e-12);
  }
}

TEST_CASE("rotating star consensus after H=20") {
  const MixingSchedule star(make_rotating_star(3, 1));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const NodeStates s = random_states(3, 5, seed);
    const double before = std::sqrt(consensus_error(s));
    const double after = std::sqrt(consensus_error(gossip(s, star, 20)));
    CHECK(after <= std::pow(2.0 / 3.0, 21) * before + 1e-9);
  }
}

TEST_CASE("rounds_for_accuracy") {
  CHECK(rounds_for_accuracy(1.0, 1e-3) == 1);
  CHECK(rounds_for_accuracy(2.0, 0.25) == 2);
  CHECK(rounds_for_accuracy(3.0, 1e-6) == 35);
  CHECK(std::pow(2.0 / 3.0, 35) <= 1e-6);
  CHECK(std::pow(2.0 / 3.0, 34) > 1e-6);
  CHECK_THROWS_AS(rounds_for_accuracy(3.0, 0.0), ValidationError);
  CHECK_THROWS_AS(rounds_for_accuracy(3.0, 1.0), ValidationError);
  CHECK_THROWS_AS(rounds_for_accuracy(0.5, 0.1), ValidationError);

  // Smallest n with ρⁿ ≤ target, by direct search.
  for (double chi : {1.5, 2.618, 5.0, 40.0})
    for (double target : {0.5, 1e-3, 1e-8, 1e-12}) {
      const double rho = 1.0 - 1.0 / chi;
      std::size_t n = 0;
      double p = 1.0;
      while (p > target) {
        p *= rho;
        ++n;
      }
      CHECK(rounds_for_accuracy(chi, target) == n);
    }
}
