#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tvsaddle {

/// Undirected edge stored with first < second.
using Edge = std::pair<std::size_t, std::size_t>;
/// Sorted, duplicate-free list of edges.
using EdgeSet = std::vector<Edge>;

enum class TopologyKind { kRing, kPath, kComplete, kStar, kRotatingStar, kRandom };

const char* to_string(TopologyKind kind);

/// Graph sequence G(t) on a fixed vertex set {0, ..., M-1}.
///
/// Every round is connected. edges_at is a pure function of the construction
/// parameters and t, so two sequences built with the same arguments agree at
/// every round.
class TopologySequence {
 public:
  std::size_t node_count() const noexcept { return node_count_; }
  TopologyKind kind() const noexcept { return kind_; }
  std::size_t period() const noexcept { return period_; }
  double edge_prob() const noexcept { return edge_prob_; }
  std::uint64_t seed() const noexcept { return seed_; }

  bool is_static() const noexcept;

  EdgeSet edges_at(std::uint64_t t) const;

  /// Canonical spec string, e.g. "rotating_star:period=2".
  std::string describe() const;

  friend TopologySequence make_static(TopologyKind kind, std::size_t m);
  friend TopologySequence make_rotating_star(std::size_t m, std::size_t period);
  friend TopologySequence make_random_connected(std::size_t m, double edge_prob,
                                                std::uint64_t seed);

 private:
  TopologySequence(TopologyKind kind, std::size_t m) : kind_(kind), node_count_(m) {}

  TopologyKind kind_;
  std::size_t node_count_;
  std::size_t period_ = 1;
  double edge_prob_ = 1.0;
  std::uint64_t seed_ = 0;
};

/// ring (M >= 3), path (M >= 2), complete (M >= 2) or star centered at 0 (M >= 2).
TopologySequence make_static(TopologyKind kind, std::size_t m);

/// Star whose center at round t is floor(t / period) mod M.
TopologySequence make_rotating_star(std::size_t m, std::size_t period);

/// Erdős–Rényi G(M, p) per round, seeded by (seed, t). A disconnected draw is
/// repaired by adding the missing edges of a random spanning tree.
TopologySequence make_random_connected(std::size_t m, double edge_prob, std::uint64_t seed);

/// Breadth-first reachability from vertex 0.
bool is_connected(const EdgeSet& edges, std::size_t m);

EdgeSet star_edges(std::size_t m, std::size_t center);

}  // namespace tvsaddle
