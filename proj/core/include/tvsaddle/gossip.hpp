#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "tvsaddle/linalg.hpp"
#include "tvsaddle/mixing.hpp"

namespace tvsaddle {

/// Stacked per-node vectors (row m is node m) plus the global round counter.
class NodeStates {
 public:
  NodeStates() = default;
  NodeStates(std::size_t nodes, std::size_t dim) : rows_(nodes, dim) {}
  explicit NodeStates(Matrix rows, std::uint64_t round_cursor = 0);

  /// Every node starts at z.
  static NodeStates replicated(std::size_t nodes, std::span<const double> z);

  std::size_t node_count() const noexcept { return rows_.rows(); }
  std::size_t dim() const noexcept { return rows_.cols(); }

  std::span<double> row(std::size_t m) { return rows_.row(m); }
  std::span<const double> row(std::size_t m) const { return rows_.row(m); }
  const Matrix& rows() const noexcept { return rows_; }
  Matrix& rows() noexcept { return rows_; }

  std::uint64_t round_cursor() const noexcept { return round_cursor_; }
  void set_round_cursor(std::uint64_t r) noexcept { round_cursor_ = r; }

  /// Row mean, (1/M) Σ_m z_m.
  Vector mean() const;

 private:
  Matrix rows_;
  std::uint64_t round_cursor_ = 0;
};

/// One communication round: z ← W̃(round_cursor) z, then round_cursor += 1.
NodeStates gossip_round(const NodeStates& states, const MixingSchedule& schedule);

/// H + 1 communication rounds (the loop runs h = 0, ..., H inclusive).
NodeStates gossip(const NodeStates& states, const MixingSchedule& schedule, std::size_t h);

/// In-place variant used by the solver; `scratch` avoids reallocation.
void gossip_in_place(NodeStates& states, const MixingSchedule& schedule, std::size_t h,
                     Matrix& scratch);

/// Smallest number of multiplications n with ρⁿ <= target, ρ = 1 - 1/χ.
/// Returns 1 when ρ = 0.
std::size_t rounds_for_accuracy(double chi, double target_contraction);

}  // namespace tvsaddle
