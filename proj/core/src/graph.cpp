#include "tvsaddle/graph.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include "tvsaddle/errors.hpp"

namespace tvsaddle {

const char* to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::kRing: return "ring";
    case TopologyKind::kPath: return "path";
    case TopologyKind::kComplete: return "complete";
    case TopologyKind::kStar: return "star";
    case TopologyKind::kRotatingStar: return "rotating_star";
    case TopologyKind::kRandom: return "random";
  }
  return "unknown";
}

namespace {

void normalize(EdgeSet& edges) {
  for (auto& [u, v] : edges)
    if (u > v) std::swap(u, v);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

// Round-local SplitMix64 stream keyed by (seed, t). Cheap to construct, so
// every round can be regenerated independently and reproducibly.
class RoundRng {
 public:
  RoundRng(std::uint64_t seed, std::uint64_t t) : state_(seed ^ (t * 0xd1b54a32d192ed03ULL)) {
    (*this)();
  }
  std::uint64_t operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

double unit_uniform(RoundRng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

EdgeSet random_round(std::size_t m, double p, std::uint64_t seed, std::uint64_t t) {
  RoundRng rng(seed, t);
  EdgeSet edges;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (unit_uniform(rng) < p) edges.emplace_back(i, j);
  if (is_connected(edges, m)) return edges;

  std::vector<std::size_t> perm(m);
  for (std::size_t i = 0; i < m; ++i) perm[i] = i;
  for (std::size_t i = m; i-- > 1;) std::swap(perm[i], perm[rng() % (i + 1)]);
  for (std::size_t i = 1; i < m; ++i) edges.emplace_back(perm[i], perm[rng() % i]);
  normalize(edges);
  return edges;
}

}  // namespace

EdgeSet star_edges(std::size_t m, std::size_t center) {
  EdgeSet edges;
  for (std::size_t i = 0; i < m; ++i)
    if (i != center) edges.emplace_back(std::min(i, center), std::max(i, center));
  std::sort(edges.begin(), edges.end());
  return edges;
}

bool TopologySequence::is_static() const noexcept {
  return kind_ != TopologyKind::kRotatingStar && kind_ != TopologyKind::kRandom;
}

EdgeSet TopologySequence::edges_at(std::uint64_t t) const {
  const std::size_t m = node_count_;
  EdgeSet edges;
  switch (kind_) {
    case TopologyKind::kPath:
      for (std::size_t i = 0; i + 1 < m; ++i) edges.emplace_back(i, i + 1);
      break;
    case TopologyKind::kRing:
      for (std::size_t i = 0; i + 1 < m; ++i) edges.emplace_back(i, i + 1);
      edges.emplace_back(0, m - 1);
      normalize(edges);
      break;
    case TopologyKind::kComplete:
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) edges.emplace_back(i, j);
      break;
    case TopologyKind::kStar:
      edges = star_edges(m, 0);
      break;
    case TopologyKind::kRotatingStar:
      edges = star_edges(m, static_cast<std::size_t>((t / period_) % m));
      break;
    case TopologyKind::kRandom:
      edges = random_round(m, edge_prob_, seed_, t);
      break;
  }
  return edges;
}

std::string TopologySequence::describe() const {
  std::ostringstream out;
  out << to_string(kind_);
  if (kind_ == TopologyKind::kRotatingStar) out << ":period=" << period_;
  if (kind_ == TopologyKind::kRandom) out << ":p=" << edge_prob_ << ",seed=" << seed_;
  return out.str();
}

TopologySequence make_static(TopologyKind kind, std::size_t m) {
  std::size_t min_nodes = 2;
  switch (kind) {
    case TopologyKind::kRing: min_nodes = 3; break;
    case TopologyKind::kPath:
    case TopologyKind::kComplete:
    case TopologyKind::kStar: break;
    default: throw ValidationError("make_static: not a static topology kind");
  }
  if (m < min_nodes) {
    throw ValidationError(std::string("make_static: ") + to_string(kind) + " requires M >= " +
                          std::to_string(min_nodes) + ", got " + std::to_string(m));
  }
  return TopologySequence(kind, m);
}

TopologySequence make_rotating_star(std::size_t m, std::size_t period) {
  if (m < 2) throw ValidationError("make_rotating_star: M must be >= 2");
  if (period < 1) throw ValidationError("make_rotating_star: period must be >= 1");
  TopologySequence seq(TopologyKind::kRotatingStar, m);
  seq.period_ = period;
  return seq;
}

TopologySequence make_random_connected(std::size_t m, double edge_prob, std::uint64_t seed) {
  if (m < 2) throw ValidationError("make_random_connected: M must be >= 2");
  if (!(edge_prob > 0.0 && edge_prob <= 1.0))
    throw ValidationError("make_random_connected: edge_prob must lie in (0, 1]");
  TopologySequence seq(TopologyKind::kRandom, m);
  seq.edge_prob_ = edge_prob;
  seq.seed_ = seed;
  return seq;
}

bool is_connected(const EdgeSet& edges, std::size_t m) {
  std::vector<std::vector<std::size_t>> adj(m);
  for (const auto& [u, v] : edges) {
    if (u >= m || v >= m) {
      throw ValidationError("is_connected: edge (" + std::to_string(u) + "," + std::to_string(v) +
                            ") out of range for M=" + std::to_string(m));
    }
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  if (m == 0) return false;
  std::vector<bool> seen(m, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        frontier.push(v);
      }
  }
  return reached == m;
}

}  // namespace tvsaddle
