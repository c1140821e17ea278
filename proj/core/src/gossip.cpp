#include "tvsaddle/gossip.hpp"

#include <cmath>

#include "tvsaddle/errors.hpp"

namespace tvsaddle {

NodeStates::NodeStates(Matrix rows, std::uint64_t round_cursor)
    : rows_(std::move(rows)), round_cursor_(round_cursor) {}

NodeStates NodeStates::replicated(std::size_t nodes, std::span<const double> z) {
  NodeStates s(nodes, z.size());
  for (std::size_t m = 0; m < nodes; ++m) std::copy(z.begin(), z.end(), s.row(m).begin());
  return s;
}

Vector NodeStates::mean() const {
  Vector out(dim(), 0.0);
  for (std::size_t m = 0; m < node_count(); ++m) axpy(1.0, row(m), out);
  const double inv = 1.0 / static_cast<double>(node_count());
  for (double& v : out) v *= inv;
  return out;
}

namespace {

void multiply_into(const Matrix& wt, const Matrix& z, Matrix& out) {
  const std::size_t m = z.rows();
  const std::size_t d = z.cols();
  for (std::size_t i = 0; i < m; ++i) {
    auto dst = out.row(i);
    std::fill(dst.begin(), dst.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const double w = wt(i, j);
      if (w == 0.0) continue;
      const auto src = z.row(j);
      for (std::size_t k = 0; k < d; ++k) dst[k] += w * src[k];
    }
  }
}

void check_shape(const NodeStates& states, const MixingSchedule& schedule) {
  if (states.node_count() != schedule.node_count()) {
    throw ValidationError("gossip: states have " + std::to_string(states.node_count()) +
                          " rows but the topology has M=" +
                          std::to_string(schedule.node_count()));
  }
}

}  // namespace

void gossip_in_place(NodeStates& states, const MixingSchedule& schedule, std::size_t h,
                     Matrix& scratch) {
  check_shape(states, schedule);
  if (scratch.rows() != states.node_count() || scratch.cols() != states.dim())
    scratch = Matrix(states.node_count(), states.dim());
  for (std::size_t step = 0; step <= h; ++step) {
    const auto entry = schedule.at(states.round_cursor());
    multiply_into(entry->mixing.wt, states.rows(), scratch);
    std::swap(states.rows(), scratch);
    states.set_round_cursor(states.round_cursor() + 1);
  }
}

NodeStates gossip_round(const NodeStates& states, const MixingSchedule& schedule) {
  check_shape(states, schedule);
  NodeStates out(states.node_count(), states.dim());
  multiply_into(schedule.at(states.round_cursor())->mixing.wt, states.rows(), out.rows());
  out.set_round_cursor(states.round_cursor() + 1);
  return out;
}

NodeStates gossip(const NodeStates& states, const MixingSchedule& schedule, std::size_t h) {
  NodeStates out = states;
  Matrix scratch;
  gossip_in_place(out, schedule, h, scratch);
  return out;
}

std::size_t rounds_for_accuracy(double chi, double target_contraction) {
  if (!(target_contraction > 0.0 && target_contraction < 1.0))
    throw ValidationError("rounds_for_accuracy: target must lie in (0, 1)");
  const double rho = rho_of(chi);
  if (rho == 0.0) return 1;
  const double n = std::ceil(std::log(target_contraction) / std::log(rho));
  std::size_t rounds = static_cast<std::size_t>(std::max(1.0, n));
  // Guard against log rounding pushing the ceiling one short.
  while (std::pow(rho, static_cast<double>(rounds)) > target_contraction) ++rounds;
  return rounds;
}

}  // namespace tvsaddle
