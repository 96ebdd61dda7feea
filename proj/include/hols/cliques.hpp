// Copyright 2026 The HOLS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// k-clique listing over a degeneracy-oriented DAG (kClist style).
//
// Edges are oriented from the endpoint peeled earlier to the one peeled
// later, so every vertex has at most `degeneracy` out-neighbors and each
// clique is reached exactly once, from its earliest-peeled vertex.

#pragma once

#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <thread>
#include <vector>

#include "hols/common.hpp"
#include "hols/graph.hpp"

namespace hols {

inline constexpr std::size_t kDefaultMaxCliqueSize = 8;

struct CoreOrdering {
  // Vertices in peeling order.
  std::vector<VertexId> order;
  // position[v] = index of v in `order`.
  std::vector<VertexId> position;
  std::size_t degeneracy = 0;
};

// Repeatedly removes a vertex of minimum remaining degree, breaking ties
// by the lowest vertex id.
inline CoreOrdering core_ordering(const Graph& g) {
  const std::size_t n = g.num_vertices();
  CoreOrdering result;
  result.order.reserve(n);
  result.position.assign(n, 0);
  std::vector<std::size_t> remaining(n);
  std::set<std::pair<std::size_t, VertexId>> queue;
  for (VertexId v = 0; v < n; ++v) {
    remaining[v] = g.unweighted_degree(v);
    queue.emplace(remaining[v], v);
  }
  std::vector<bool> removed(n, false);
  while (!queue.empty()) {
    const auto [deg, v] = *queue.begin();
    queue.erase(queue.begin());
    result.degeneracy = std::max(result.degeneracy, deg);
    result.position[v] = static_cast<VertexId>(result.order.size());
    result.order.push_back(v);
    removed[v] = true;
    for (auto u : g.neighbors(v)) {
      if (removed[u]) continue;
      queue.erase({remaining[u], u});
      queue.emplace(--remaining[u], u);
    }
  }
  return result;
}

struct CliqueOccurrence {
  std::vector<VertexId> vertices;  // strictly increasing
  double weight = 1.0;

  friend auto operator<=>(const CliqueOccurrence&, const CliqueOccurrence&) = default;
};

struct EnumerationOptions {
  // Worker count for the root-vertex loop; 0 picks the hardware concurrency.
  // With more than one worker the visitor must tolerate concurrent calls.
  std::size_t threads = 1;
  std::size_t max_clique_size = kDefaultMaxCliqueSize;
};

inline void validate_clique_size(std::size_t k, std::size_t cap) {
  if (k < 2) throw ValidationError(detail::concat("clique size must be >= 2, got ", k));
  if (k > cap) {
    throw ValidationError(detail::concat("clique size ", k, " exceeds the cap of ", cap));
  }
}

// Out-neighborhoods of the degeneracy DAG. Lists are sorted by vertex id.
class CliqueDag {
 public:
  explicit CliqueDag(const Graph& g) : graph_(&g), ordering_(core_ordering(g)) {
    const std::size_t n = g.num_vertices();
    offsets_.assign(n + 1, 0);
    for (VertexId u = 0; u < n; ++u) {
      for (auto v : g.neighbors(u)) {
        if (ordering_.position[v] > ordering_.position[u]) ++offsets_[u + 1];
      }
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    targets_.resize(offsets_.back());
    for (VertexId u = 0; u < n; ++u) {
      auto cursor = offsets_[u];
      for (auto v : g.neighbors(u)) {
        if (ordering_.position[v] > ordering_.position[u]) targets_[cursor++] = v;
      }
    }
  }

  const Graph& graph() const { return *graph_; }
  const CoreOrdering& ordering() const { return ordering_; }
  std::size_t num_vertices() const { return offsets_.size() - 1; }

  std::span<const VertexId> out(VertexId u) const {
    return {targets_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }

 private:
  const Graph* graph_;
  CoreOrdering ordering_;
  std::vector<std::size_t> offsets_;
  std::vector<VertexId> targets_;
};

// Per-worker buffers for the recursive listing: one candidate set per depth.
class CliqueScratch {
 public:
  explicit CliqueScratch(std::size_t k) : levels_(k), members_(k), sorted_(k) {}

  std::vector<VertexId>& level(std::size_t depth) { return levels_[depth]; }
  std::vector<VertexId>& members() { return members_; }
  std::vector<VertexId>& sorted() { return sorted_; }

 private:
  std::vector<std::vector<VertexId>> levels_;
  std::vector<VertexId> members_;
  std::vector<VertexId> sorted_;
};

namespace detail {

inline double clique_weight(const Graph& g, std::span<const VertexId> vertices) {
  if (g.unit_weights()) return 1.0;
  double w = 1.0;
  for (std::size_t a = 0; a < vertices.size(); ++a) {
    for (std::size_t b = a + 1; b < vertices.size(); ++b) {
      w *= *g.edge_weight(vertices[a], vertices[b]);
    }
  }
  return w;
}

template <typename Visitor>
std::uint64_t list_from(const CliqueDag& dag, std::size_t k, std::size_t depth,
                        CliqueScratch& scratch, Visitor& visit) {
  auto& cand = scratch.level(depth);
  auto& members = scratch.members();
  std::uint64_t count = 0;
  if (depth + 1 == k) {
    for (auto v : cand) {
      members[depth] = v;
      auto& sorted = scratch.sorted();
      std::copy(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k), sorted.begin());
      std::sort(sorted.begin(), sorted.end());
      visit(std::span<const VertexId>(sorted), clique_weight(dag.graph(), sorted));
      ++count;
    }
    return count;
  }
  auto& next = scratch.level(depth + 1);
  const std::size_t still_needed = k - depth - 1;
  for (auto v : cand) {
    const auto out = dag.out(v);
    if (out.size() < still_needed) continue;
    next.clear();
    std::set_intersection(cand.begin(), cand.end(), out.begin(), out.end(),
                          std::back_inserter(next));
    if (next.size() < still_needed) continue;
    members[depth] = v;
    count += list_from(dag, k, depth + 1, scratch, visit);
  }
  return count;
}

}  // namespace detail

// Lists every k-clique whose earliest-peeled vertex is `root`. The visitor
// receives the clique's vertices in increasing id order and its weight
// (product of the pairwise edge weights).
template <typename Visitor>
std::uint64_t enumerate_cliques_from(const CliqueDag& dag, VertexId root, std::size_t k,
                                     CliqueScratch& scratch, Visitor&& visit) {
  const auto out = dag.out(root);
  if (out.size() + 1 < k) return 0;
  scratch.members()[0] = root;
  auto& first = scratch.level(1);
  first.assign(out.begin(), out.end());
  return detail::list_from(dag, k, 1, scratch, visit);
}

// Streams each k-clique of the DAG's graph to `visit` exactly once.
template <typename Visitor>
std::uint64_t enumerate_cliques(const CliqueDag& dag, std::size_t k, Visitor&& visit,
                                const EnumerationOptions& options = {}) {
  validate_clique_size(k, options.max_clique_size);
  const std::size_t n = dag.num_vertices();
  const std::size_t workers = std::min<std::size_t>(detail::resolve_threads(options.threads),
                                                    std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    CliqueScratch scratch(k);
    std::uint64_t total = 0;
    for (VertexId root = 0; root < n; ++root) {
      total += enumerate_cliques_from(dag, root, k, scratch, visit);
    }
    return total;
  }
  std::atomic<std::size_t> next_root{0};
  std::atomic<std::uint64_t> total{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        CliqueScratch scratch(k);
        std::uint64_t local = 0;
        for (auto root = next_root.fetch_add(1); root < n; root = next_root.fetch_add(1)) {
          local += enumerate_cliques_from(dag, static_cast<VertexId>(root), k, scratch, visit);
        }
        total += local;
      });
    }
  }
  return total.load();
}

template <typename Visitor>
std::uint64_t enumerate_cliques(const Graph& g, std::size_t k, Visitor&& visit,
                                const EnumerationOptions& options = {}) {
  validate_clique_size(k, options.max_clique_size);
  const CliqueDag dag(g);
  return enumerate_cliques(dag, k, std::forward<Visitor>(visit), options);
}

inline std::uint64_t count_cliques(const Graph& g, std::size_t k,
                                   const EnumerationOptions& options = {}) {
  return enumerate_cliques(g, k, [](std::span<const VertexId>, double) {}, options);
}

inline constexpr std::size_t kBruteForceMaxVertices = 64;

// Exhaustive subset test; the reference the fast listing is checked against.
// Output is in lexicographic order of vertex tuples.
inline std::vector<CliqueOccurrence> brute_force_cliques(const Graph& g, std::size_t k) {
  if (k < 2) throw ValidationError(detail::concat("clique size must be >= 2, got ", k));
  const std::size_t n = g.num_vertices();
  if (n > kBruteForceMaxVertices) {
    throw CapacityError(detail::concat("brute-force clique listing refuses N=", n, " > ",
                                       kBruteForceMaxVertices));
  }
  std::vector<CliqueOccurrence> out;
  if (k > n) return out;
  std::vector<std::uint64_t> adj(n, 0);
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (const auto& e : g.edge_list()) {
    adj[e.u] |= std::uint64_t{1} << e.v;
    adj[e.v] |= std::uint64_t{1} << e.u;
    w[e.u][e.v] = w[e.v][e.u] = e.weight;
  }
  std::vector<VertexId> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = static_cast<VertexId>(i);
  while (true) {
    bool clique = true;
    for (std::size_t a = 0; a < k && clique; ++a) {
      for (std::size_t b = a + 1; b < k && clique; ++b) {
        clique = (adj[pick[a]] >> pick[b]) & 1u;
      }
    }
    if (clique) {
      double weight = 1.0;
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) weight *= w[pick[a]][pick[b]];
      }
      out.push_back({pick, weight});
    }
    // Next k-combination in lexicographic order.
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

// Writes one clique per line: vertex ids then the weight.
inline void write_clique(std::ostream& out, std::span<const VertexId> vertices, double weight,
                         const VertexIdMap& ids) {
  for (auto v : vertices) out << ids.to_external(v) << ' ';
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", weight);
  out << buf << '\n';
}

}  // namespace hols
