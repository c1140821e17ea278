#include "tvsaddle/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "tvsaddle/errors.hpp"

namespace tvsaddle {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kSpectralTol = 1e-10;

}  // namespace

Matrix laplacian_matrix(const EdgeSet& edges, std::size_t m) {
  Matrix l(m, m);
  for (const auto& [u, v] : edges) {
    if (u >= m || v >= m || u == v) throw ValidationError("laplacian_matrix: invalid edge");
    l(u, v) -= 1.0;
    l(v, u) -= 1.0;
    l(u, u) += 1.0;
    l(v, v) += 1.0;
  }
  return l;
}

GossipMatrix gossip_matrix_from(const EdgeSet& edges, std::size_t m, std::uint64_t round) {
  if (m < 2) throw ValidationError("gossip matrix needs at least two nodes");
  if (!is_connected(edges, m)) {
    throw ValidationError("graph at round " + std::to_string(round) +
                          " is disconnected; chi would be infinite");
  }
  GossipMatrix g{laplacian_matrix(edges, m)};
  const Vector ev = sym_eigvals(g.w);
  g.lambda_max = ev.front();
  g.lambda_min_nonzero = ev[m - 2];
  g.round = round;
  return g;
}

GossipMatrix laplacian_of(const TopologySequence& topology, std::uint64_t t) {
  return gossip_matrix_from(topology.edges_at(t), topology.node_count(), t);
}

MixingMatrix mixing_of(const GossipMatrix& g) {
  if (!(g.lambda_max > 0.0)) throw ValidationError("mixing_of: lambda_max must be positive");
  const std::size_t m = g.w.rows();
  MixingMatrix out{Matrix::identity(m), g.round};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out.wt(i, j) -= g.w(i, j) / g.lambda_max;
  return out;
}

double rho_of(double chi) {
  if (!(chi >= 1.0)) throw ValidationError("rho_of: chi must be >= 1");
  return 1.0 - 1.0 / chi;
}

double chi_of(const TopologySequence& topology, std::uint64_t horizon) {
  return MixingSchedule(topology).chi(horizon);
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kShape: return "shape";
    case ViolationKind::kNonFinite: return "non_finite";
    case ViolationKind::kNotSymmetric: return "not_symmetric";
    case ViolationKind::kNotPsd: return "not_psd";
    case ViolationKind::kKernel: return "kernel";
    case ViolationKind::kSparsity: return "sparsity";
  }
  return "unknown";
}

std::vector<Violation> validate_gossip_matrix(const Matrix& w, const EdgeSet& edges, std::size_t m) {
  std::vector<Violation> out;
  if (w.rows() != m || w.cols() != m || m == 0) {
    out.push_back({ViolationKind::kShape, "expected an MxM matrix with M=" + std::to_string(m)});
    return out;
  }
  if (!w.all_finite()) {
    out.push_back({ViolationKind::kNonFinite, "matrix has non-finite entries"});
    return out;
  }

  const bool symmetric = is_symmetric(w, kSymmetryTol);
  if (!symmetric) out.push_back({ViolationKind::kNotSymmetric, "W != W^T"});

  if (symmetric) {
    const Vector ev = sym_eigvals(w);
    if (ev.back() < -kSpectralTol) {
      std::ostringstream msg;
      msg << "smallest eigenvalue " << ev.back() << " < 0";
      out.push_back({ViolationKind::kNotPsd, msg.str()});
    }
    if (m >= 2 && ev[m - 2] <= kSpectralTol) {
      std::ostringstream msg;
      msg << "kernel is larger than the constants (second-smallest eigenvalue " << ev[m - 2]
          << ")";
      out.push_back({ViolationKind::kKernel, msg.str()});
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    double row_sum = 0.0;
    for (double v : w.row(i)) row_sum += v;
    if (std::abs(row_sum) > kSpectralTol) {
      std::ostringstream msg;
      msg << "W*1 != 0 (row " << i << " sums to " << row_sum << ")";
      out.push_back({ViolationKind::kKernel, msg.str()});
      break;
    }
  }

  std::set<Edge> allowed(edges.begin(), edges.end());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j || w(i, j) == 0.0) continue;
      if (!allowed.count({std::min(i, j), std::max(i, j)})) {
        out.push_back({ViolationKind::kSparsity, "W(" + std::to_string(i) + "," +
                                                     std::to_string(j) +
                                                     ") != 0 but the edge is absent"});
        i = m;  // one report is enough
        break;
      }
    }
  return out;
}

std::vector<Violation> validate_gossip_matrix(const GossipMatrix& g,
                                            const TopologySequence& topology, std::uint64_t t) {
  return validate_gossip_matrix(g.w, topology.edges_at(t), topology.node_count());
}

MixingSchedule::MixingSchedule(TopologySequence topology) : topology_(std::move(topology)) {
  const std::size_t m = std::max<std::size_t>(topology_.node_count(), 1);
  max_cache_entries_ = std::max(kMinCacheEntries, kCacheBudgetDoubles / (2 * m * m));
}

std::shared_ptr<const MixingSchedule::Entry> MixingSchedule::at(std::uint64_t t) const {
  if (topology_.is_static()) {
    std::lock_guard lock(mutex_);
    if (!static_entry_) {
      GossipMatrix g = laplacian_of(topology_, 0);
      MixingMatrix w = mixing_of(g);
      static_entry_ = std::make_shared<const Entry>(Entry{std::move(g), std::move(w)});
    }
    return static_entry_;
  }

  EdgeSet edges = topology_.edges_at(t);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(edges); it != cache_.end()) return it->second;
  }
  GossipMatrix g = gossip_matrix_from(edges, topology_.node_count(), t);
  MixingMatrix w = mixing_of(g);
  auto entry = std::make_shared<const Entry>(Entry{std::move(g), std::move(w)});
  std::lock_guard lock(mutex_);
  if (cache_.size() >= max_cache_entries_) cache_.clear();
  return cache_.emplace(std::move(edges), std::move(entry)).first->second;
}

double MixingSchedule::chi(std::uint64_t horizon) const {
  if (horizon < 1) throw ValidationError("chi_of: horizon must be >= 1");
  std::uint64_t rounds = horizon;
  if (topology_.is_static()) {
    rounds = 1;
  } else if (topology_.kind() == TopologyKind::kRotatingStar) {
    rounds = std::min<std::uint64_t>(horizon, topology_.node_count() * topology_.period());
  }
  // Prefix maxima are extended incrementally; the auto-H fixed point asks
  // for a growing sequence of horizons.
  std::uint64_t start = 0;
  double chi = 1.0;
  {
    std::lock_guard lock(mutex_);
    if (rounds >= chi_rounds_) {
      start = chi_rounds_;
      chi = chi_prefix_;
    }
  }
  for (std::uint64_t t = start; t < rounds; ++t) chi = std::max(chi, at(t)->gossip.chi());
  std::lock_guard lock(mutex_);
  if (rounds > chi_rounds_) {
    chi_rounds_ = rounds;
    chi_prefix_ = chi;
  }
  return chi;
}

std::size_t MixingSchedule::cached_entries() const {
  std::lock_guard lock(mutex_);
  return cache_.size() + (static_entry_ ? 1 : 0);
}

}  // namespace tvsaddle
