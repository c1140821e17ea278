#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tvsaddle/gossip.hpp"
#include "tvsaddle/linalg.hpp"
#include "tvsaddle/problems.hpp"

namespace tvsaddle {

struct MetricPoint {
  std::size_t k = 0;
  std::uint64_t rounds = 0;
  std::optional<double> dist_sq;  // ‖z̄ᵏ - z*‖² when z* is known
  std::optional<double> gap;      // gap(z̄ᵏ_avg) when the problem has an oracle
  double consensus = 0.0;         // (1/M) Σ_m ‖z_mᵏ - z̄ᵏ‖²
};

double distance_sq(std::span<const double> a, std::span<const double> b);

/// Throws UnsupportedMetricError when the problem has no gap oracle.
double gap_of(const SaddleProblem& problem, std::span<const double> z);

/// Mean squared deviation of the rows from their mean.
double consensus_error(const NodeStates& states);

using Series = std::vector<std::pair<double, double>>;

/// Least-squares slope of ln(value) against x over the last half of the
/// series. Needs at least 10 points, all values positive.
double fit_linear_rate(const Series& series);

/// Least-squares slope of ln(value) against ln(x) over the last half.
double fit_sublinear_rate(const Series& series);

/// Slope of ln(value) against ln(x) restricted to x in [x_lo, x_hi].
double fit_loglog_window(const Series& series, double x_lo, double x_hi);

}  // namespace tvsaddle
