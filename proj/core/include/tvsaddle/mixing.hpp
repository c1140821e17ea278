#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "tvsaddle/graph.hpp"
#include "tvsaddle/linalg.hpp"

namespace tvsaddle {

/// W(t): symmetric PSD, kernel = constant vectors, supported on the edges of G(t).
struct GossipMatrix {
  Matrix w;
  double lambda_max = 0.0;          // λ₁(W)
  double lambda_min_nonzero = 0.0;  // λ_{M-1}(W)
  std::uint64_t round = 0;

  double chi() const { return lambda_max / lambda_min_nonzero; }
};

/// W̃ = I - W / λ₁(W). Rows sum to one; spectrum in [0, 1].
struct MixingMatrix {
  Matrix wt;
  std::uint64_t round = 0;
};

/// Unweighted Laplacian D - A of an edge list on M vertices.
Matrix laplacian_matrix(const EdgeSet& edges, std::size_t m);

/// Laplacian of G(t) with its extreme nonzero eigenvalues. Throws
/// ValidationError when G(t) is disconnected.
GossipMatrix laplacian_of(const TopologySequence& topology, std::uint64_t t);
GossipMatrix gossip_matrix_from(const EdgeSet& edges, std::size_t m, std::uint64_t round);

MixingMatrix mixing_of(const GossipMatrix& g);

/// max over t in [0, horizon) of λ₁(W(t)) / λ_{M-1}(W(t)).
double chi_of(const TopologySequence& topology, std::uint64_t horizon);

/// 1 - 1/χ.
double rho_of(double chi);

enum class ViolationKind { kShape, kNonFinite, kNotSymmetric, kNotPsd, kKernel, kSparsity };

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

/// Checks the four gossip-matrix conditions for `w` against `edges`.
/// Reports every violation found; never throws.
std::vector<Violation> validate_gossip_matrix(const Matrix& w, const EdgeSet& edges, std::size_t m);
std::vector<Violation> validate_gossip_matrix(const GossipMatrix& g,
                                            const TopologySequence& topology, std::uint64_t t);

/// Per-round mixing matrices for a topology, memoized per distinct edge set.
///
/// Thread-safe; returned entries are immutable and shared.
class MixingSchedule {
 public:
  struct Entry {
    GossipMatrix gossip;
    MixingMatrix mixing;
  };

  explicit MixingSchedule(TopologySequence topology);

  const TopologySequence& topology() const noexcept { return topology_; }
  std::size_t node_count() const noexcept { return topology_.node_count(); }

  std::shared_ptr<const Entry> at(std::uint64_t t) const;

  /// Same quantity as chi_of, sharing this schedule's cache.
  double chi(std::uint64_t horizon) const;

  std::size_t cached_entries() const;

 private:
  // The cache holds two M×M matrices per distinct graph and is dropped
  // wholesale once full.
  static constexpr std::size_t kMinCacheEntries = 4096;
  static constexpr std::size_t kCacheBudgetDoubles = std::size_t{1} << 24;

  TopologySequence topology_;
  mutable std::mutex mutex_;
  mutable std::shared_ptr<const Entry> static_entry_;
  mutable std::map<EdgeSet, std::shared_ptr<const Entry>> cache_;
  std::size_t max_cache_entries_ = kMinCacheEntries;
  mutable std::uint64_t chi_rounds_ = 0;
  mutable double chi_prefix_ = 1.0;
};

}  // namespace tvsaddle
