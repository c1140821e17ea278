#include <cmath>
#include <random>

#include "doctest.h"
#include "tvsaddle/errors.hpp"
#include "tvsaddle/gossip.hpp"
#include "tvsaddle/metrics.hpp"
#include "tvsaddle/problems.hpp"

using namespace tvsaddle;

namespace {

template <typename F>
Series synthetic(F f, int n, double start = 1.0, double step = 1.0) {
  Series s;
  for (int i = 0; i < n; ++i) {
    const double x = start + step * i;
    s.emplace_back(x, f(x));
  }
  return s;
}

}  // namespace

TEST_CASE("distance_sq") {
  CHECK(distance_sq(Vector{0.3, -2}, Vector{0.3, -2}) == 0.0);
  CHECK(distance_sq(Vector{1, 0}, Vector{0, 0}) == 1.0);
  CHECK(distance_sq(Vector{1, 1}, Vector{-1, -1}) == 8.0);
  CHECK_THROWS_AS(distance_sq(Vector{1}, Vector{1, 2}), ValidationError);
}

TEST_CASE("gap_of") {
  const auto mp = make_matrix_game(MatrixGameSpec{{Matrix::from_rows({{1, -1}, {-1, 1}})}});
  CHECK(gap_of(*mp, Vector{0.5, 0.5, 0.5, 0.5}) == doctest::Approx(0.0));
  CHECK(gap_of(*mp, Vector{1, 0, 1, 0}) == doctest::Approx(2.0));
  const auto zero = make_matrix_game(MatrixGameSpec{{Matrix(2, 3)}});
  CHECK(gap_of(*zero, Vector{1, 0, 0.2, 0.3, 0.5}) == 0.0);

  const ProblemPtr reg = regularize(mp, 0.1, Vector{0.5, 0.5, 0.5, 0.5});
  CHECK_THROWS_AS(gap_of(*reg, Vector{0.5, 0.5, 0.5, 0.5}), UnsupportedMetricError);
}

TEST_CASE("consensus_error") {
  CHECK(consensus_error(NodeStates::replicated(4, Vector{1, 2, 3})) == 0.0);
  CHECK(consensus_error(NodeStates(Matrix::from_rows({{0}, {2}}))) == doctest::Approx(1.0));

  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  NodeStates s(5, 3);
  for (std::size_t i = 0; i < 5; ++i)
    for (double& v : s.row(i)) v = normal(rng);
  CHECK(consensus_error(s) > 0.0);
  const MixingSchedule k5(make_static(TopologyKind::kComplete, 5));
  CHECK(consensus_error(gossip_round(s, k5)) <= 1e-12);
}

TEST_CASE("fit_linear_rate") {
  CHECK(std::abs(fit_linear_rate(synthetic([](double r) { return std::exp(-0.01 * r); }, 200)) +
                 0.01) < 1e-9);
  CHECK(std::abs(fit_linear_rate(synthetic([](double) { return 3.0; }, 50))) < 1e-12);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  const Series noisy = synthetic(
      [&](double r) { return 2.0 * std::exp(-0.05 * r) * (1.0 + 0.01 * noise(rng)); }, 300);
  CHECK(std::abs(fit_linear_rate(noisy) + 0.05) < 0.005);

  CHECK_THROWS_AS(fit_linear_rate(synthetic([](double) { return 1.0; }, 5)), ValidationError);
  Series bad = synthetic([](double) { return 1.0; }, 20);
  bad[15].second = 0.0;
  CHECK_THROWS_AS(fit_linear_rate(bad), ValidationError);
}

TEST_CASE("fit_sublinear_rate") {
  CHECK(std::abs(fit_sublinear_rate(synthetic([](double k) { return 1.0 / k; }, 1000)) + 1.0) <
        1e-9);
  CHECK(std::abs(fit_sublinear_rate(synthetic([](double k) { return 5.0 / k; }, 1000)) + 1.0) <
        1e-9);
  CHECK(std::abs(
            fit_sublinear_rate(synthetic([](double k) { return 1.0 / std::sqrt(k); }, 1000)) +
            0.5) < 1e-9);

  const Series s = synthetic([](double k) { return 1.0 / (k * k); }, 1000);
  CHECK(std::abs(fit_loglog_window(s, 100, 1000) + 2.0) < 1e-9);
}
