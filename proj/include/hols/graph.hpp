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

#pragma once

#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hols/common.hpp"

namespace hols {

struct WeightedEdge {
  VertexId u;
  VertexId v;
  double weight = 1.0;
};

// Undirected weighted graph in compressed adjacency form.
//
// Invariants (established by from_edges, never broken afterwards):
//  * adjacency is symmetric with identical weights in both directions
//  * no self-loops and no duplicate neighbors
//  * each neighbor list is sorted by vertex id
class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  // Builds a graph on vertices 0..num_vertices-1. Self-loops are dropped,
  // reciprocal and repeated entries are merged keeping the maximum weight.
  static Graph from_edges(std::size_t num_vertices, std::span<const WeightedEdge> edges) {
    std::vector<std::pair<std::uint64_t, double>> keyed;
    keyed.reserve(edges.size());
    for (const auto& e : edges) {
      if (e.u >= num_vertices || e.v >= num_vertices) {
        throw ValidationError(detail::concat("edge (", e.u, ", ", e.v,
                                             ") references a vertex >= ", num_vertices));
      }
      if (!std::isfinite(e.weight) || e.weight < 0.0) {
        throw ValidationError(detail::concat("edge (", e.u, ", ", e.v,
                                             ") has invalid weight ", e.weight));
      }
      if (e.u == e.v) continue;
      const auto lo = std::min(e.u, e.v);
      const auto hi = std::max(e.u, e.v);
      keyed.emplace_back((std::uint64_t{lo} << 32) | hi, e.weight);
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<WeightedEdge> unique;
    unique.reserve(keyed.size());
    for (const auto& [key, w] : keyed) {
      const auto lo = static_cast<VertexId>(key >> 32);
      const auto hi = static_cast<VertexId>(key & 0xffffffffu);
      if (!unique.empty() && unique.back().u == lo && unique.back().v == hi) {
        unique.back().weight = std::max(unique.back().weight, w);
      } else {
        unique.push_back({lo, hi, w});
      }
    }

    Graph g;
    g.offsets_.assign(num_vertices + 1, 0);
    for (const auto& e : unique) {
      ++g.offsets_[e.u + 1];
      ++g.offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < num_vertices; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.targets_.resize(g.offsets_.back());
    g.weights_.resize(g.offsets_.back());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& e : unique) {
      g.targets_[cursor[e.u]] = e.v;
      g.weights_[cursor[e.u]++] = e.weight;
      g.targets_[cursor[e.v]] = e.u;
      g.weights_[cursor[e.v]++] = e.weight;
    }
    for (std::size_t i = 0; i < num_vertices; ++i) g.sort_row(i);
    g.num_edges_ = unique.size();
    g.unit_weights_ = std::all_of(unique.begin(), unique.end(),
                                  [](const WeightedEdge& e) { return e.weight == 1.0; });
    return g;
  }

  std::size_t num_vertices() const { return offsets_.size() - 1; }
  std::size_t num_edges() const { return num_edges_; }
  bool unit_weights() const { return unit_weights_; }

  std::span<const VertexId> neighbors(VertexId v) const {
    return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::span<const double> weights(VertexId v) const {
    return {weights_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t unweighted_degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

  // Weighted degree (sum of incident edge weights).
  double degree(VertexId v) const {
    if (v >= num_vertices()) {
      throw ValidationError(detail::concat("vertex ", v, " out of range (N=", num_vertices(), ")"));
    }
    double sum = 0.0;
    for (double w : weights(v)) sum += w;
    return sum;
  }

  std::optional<double> edge_weight(VertexId u, VertexId v) const {
    const auto nb = neighbors(u);
    const auto it = std::lower_bound(nb.begin(), nb.end(), v);
    if (it == nb.end() || *it != v) return std::nullopt;
    return weights_[offsets_[u] + static_cast<std::size_t>(it - nb.begin())];
  }
  bool has_edge(VertexId u, VertexId v) const { return edge_weight(u, v).has_value(); }

  // Each undirected edge once, with u < v, in lexicographic order.
  std::vector<WeightedEdge> edge_list() const {
    std::vector<WeightedEdge> out;
    out.reserve(num_edges_);
    for (VertexId u = 0; u < num_vertices(); ++u) {
      const auto nb = neighbors(u);
      const auto wt = weights(u);
      for (std::size_t i = 0; i < nb.size(); ++i) {
        if (nb[i] > u) out.push_back({u, nb[i], wt[i]});
      }
    }
    return out;
  }

  std::span<const std::size_t> offsets() const { return offsets_; }
  std::span<const VertexId> targets() const { return targets_; }
  std::span<const double> edge_weights() const { return weights_; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.offsets_ == b.offsets_ && a.targets_ == b.targets_ && a.weights_ == b.weights_;
  }

 private:
  void sort_row(std::size_t v) {
    const auto begin = offsets_[v];
    const auto end = offsets_[v + 1];
    std::vector<std::pair<VertexId, double>> row;
    row.reserve(end - begin);
    for (auto i = begin; i < end; ++i) row.emplace_back(targets_[i], weights_[i]);
    std::sort(row.begin(), row.end());
    for (auto i = begin; i < end; ++i) {
      targets_[i] = row[i - begin].first;
      weights_[i] = row[i - begin].second;
    }
  }

  std::vector<std::size_t> offsets_;
  std::vector<VertexId> targets_;
  std::vector<double> weights_;
  std::size_t num_edges_ = 0;
  bool unit_weights_ = true;
};

// Bijection between arbitrary external ids and contiguous internal ids.
// Internal ids are assigned in ascending external-id order, so sorting by
// either id yields the same sequence.
class VertexIdMap {
 public:
  VertexIdMap() = default;
  explicit VertexIdMap(std::vector<std::uint64_t> sorted_external)
      : external_(std::move(sorted_external)) {
    internal_.reserve(external_.size());
    for (std::size_t i = 0; i < external_.size(); ++i) {
      internal_.emplace(external_[i], static_cast<VertexId>(i));
    }
  }

  static VertexIdMap identity(std::size_t n) {
    std::vector<std::uint64_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    return VertexIdMap(std::move(ids));
  }

  std::size_t size() const { return external_.size(); }
  std::optional<VertexId> to_internal(std::uint64_t external) const {
    const auto it = internal_.find(external);
    if (it == internal_.end()) return std::nullopt;
    return it->second;
  }
  std::uint64_t to_external(VertexId internal) const { return external_.at(internal); }

 private:
  std::vector<std::uint64_t> external_;
  std::unordered_map<std::uint64_t, VertexId> internal_;
};

// Class assignment over all N vertices; a vertex may be unlabeled.
class LabelAssignment {
 public:
  static constexpr ClassId kUnlabeled = static_cast<ClassId>(-1);

  LabelAssignment() = default;
  LabelAssignment(std::size_t num_vertices, std::size_t num_classes)
      : num_classes_(num_classes), labels_(num_vertices, kUnlabeled) {}

  std::size_t num_vertices() const { return labels_.size(); }
  std::size_t num_classes() const { return num_classes_; }

  void set(VertexId v, ClassId c) {
    if (v >= labels_.size()) {
      throw ValidationError(detail::concat("vertex ", v, " out of range"));
    }
    if (c >= num_classes_) {
      throw ValidationError(detail::concat("class ", c, " out of range (C=", num_classes_, ")"));
    }
    labels_[v] = c;
  }
  void clear(VertexId v) { labels_.at(v) = kUnlabeled; }

  std::optional<ClassId> get(VertexId v) const {
    const auto c = labels_.at(v);
    if (c == kUnlabeled) return std::nullopt;
    return c;
  }
  bool is_labeled(VertexId v) const { return labels_.at(v) != kUnlabeled; }

  std::size_t num_labeled() const {
    return static_cast<std::size_t>(
        std::count_if(labels_.begin(), labels_.end(), [](ClassId c) { return c != kUnlabeled; }));
  }
  bool is_total() const { return num_labeled() == labels_.size(); }

  std::optional<VertexId> first_unlabeled() const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] == kUnlabeled) return static_cast<VertexId>(i);
    }
    return std::nullopt;
  }

  std::vector<std::size_t> class_sizes() const {
    std::vector<std::size_t> sizes(num_classes_, 0);
    for (auto c : labels_) {
      if (c != kUnlabeled) ++sizes[c];
    }
    return sizes;
  }

  // Copy that keeps only the listed vertices labeled.
  LabelAssignment restricted_to(std::span<const VertexId> keep) const {
    LabelAssignment out(labels_.size(), num_classes_);
    for (auto v : keep) out.labels_.at(v) = labels_.at(v);
    return out;
  }

  std::span<const ClassId> raw() const { return labels_; }

  friend bool operator==(const LabelAssignment&, const LabelAssignment&) = default;

 private:
  std::size_t num_classes_ = 0;
  std::vector<ClassId> labels_;
};

struct EdgeListOptions {
  // Read a third column as the edge weight; otherwise extra columns are ignored.
  bool weighted = false;
};

struct LabelFileOptions {
  std::optional<std::size_t> num_classes;
  // External class ids start at 1.
  bool one_based = false;
};

struct LoadedGraph {
  Graph graph;
  VertexIdMap ids;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const auto start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline bool is_blank_or_comment(std::string_view line) {
  for (char ch : line) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    return ch == '#';
  }
  return true;
}

inline std::uint64_t parse_id(std::string_view tok, std::size_t line_no, const char* what) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line_no, concat("invalid ", what, " '", tok, "'"));
  }
  return value;
}

inline double parse_weight(std::string_view tok, std::size_t line_no) {
  // std::from_chars for double is unavailable in some libstdc++ builds.
  const std::string copy(tok);
  char* end = nullptr;
  const double value = std::strtod(copy.c_str(), &end);
  if (end != copy.c_str() + copy.size()) {
    throw ParseError(line_no, concat("invalid weight '", tok, "'"));
  }
  return value;
}

}  // namespace detail

// Reads `u v` / `u v w` lines. A vertex that only occurs in a self-loop line
// still becomes an (isolated) vertex.
inline LoadedGraph load_edge_list(std::istream& in, const EdgeListOptions& options = {}) {
  struct RawEdge {
    std::uint64_t u, v;
    double w;
  };
  std::vector<RawEdge> raw;
  std::vector<std::uint64_t> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) continue;
    const auto tokens = detail::split_ws(line);
    if (tokens.size() < 2) throw ParseError(line_no, "expected 'u v [w]'");
    if (options.weighted && tokens.size() > 3) throw ParseError(line_no, "expected 'u v [w]'");
    RawEdge e{detail::parse_id(tokens[0], line_no, "vertex id"),
              detail::parse_id(tokens[1], line_no, "vertex id"), 1.0};
    if (options.weighted && tokens.size() == 3) {
      e.w = detail::parse_weight(tokens[2], line_no);
      if (!std::isfinite(e.w) || e.w < 0.0) {
        throw ValidationError(detail::concat("line ", line_no, ": weight must be finite and >= 0, got ",
                                             tokens[2]));
      }
    }
    ids.push_back(e.u);
    ids.push_back(e.v);
    raw.push_back(e);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() > std::numeric_limits<VertexId>::max()) {
    throw CapacityError("too many vertices for 32-bit ids");
  }
  VertexIdMap map(std::move(ids));
  std::vector<WeightedEdge> edges;
  edges.reserve(raw.size());
  for (const auto& e : raw) edges.push_back({*map.to_internal(e.u), *map.to_internal(e.v), e.w});
  auto g = Graph::from_edges(map.size(), edges);
  return {std::move(g), std::move(map)};
}

// Reads `vertex_id class_id` lines. Vertex ids must already be known.
inline LabelAssignment load_labels(std::istream& in, const VertexIdMap& map,
                                   const LabelFileOptions& options = {}) {
  std::vector<std::pair<VertexId, std::uint64_t>> entries;
  std::uint64_t max_class = 0;
  bool any = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) continue;
    const auto tokens = detail::split_ws(line);
    if (tokens.size() != 2) throw ParseError(line_no, "expected 'vertex_id class_id'");
    const auto ext = detail::parse_id(tokens[0], line_no, "vertex id");
    auto cls = detail::parse_id(tokens[1], line_no, "class id");
    if (options.one_based) {
      if (cls == 0) throw ParseError(line_no, "class id 0 in a 1-based label file");
      --cls;
    }
    const auto internal = map.to_internal(ext);
    if (!internal) {
      throw ValidationError(detail::concat("line ", line_no, ": unknown vertex id ", ext));
    }
    entries.emplace_back(*internal, cls);
    max_class = any ? std::max(max_class, cls) : cls;
    any = true;
  }
  const std::size_t num_classes =
      options.num_classes ? *options.num_classes : (any ? max_class + 1 : 0);
  if (any && max_class >= num_classes) {
    throw ValidationError(detail::concat("class id ", max_class, " exceeds declared class count ",
                                         num_classes));
  }
  LabelAssignment labels(map.size(), num_classes);
  for (const auto& [v, c] : entries) {
    const auto existing = labels.get(v);
    if (existing && *existing != c) {
      throw ValidationError(detail::concat("vertex ", map.to_external(v),
                                           " has conflicting classes ", *existing, " and ", c));
    }
    labels.set(v, static_cast<ClassId>(c));
  }
  return labels;
}

// Inverse of load_edge_list. Isolated vertices are written as self-loop
// lines, which the loader keeps as vertices but drops as edges.
inline void write_edge_list(std::ostream& out, const Graph& g, const VertexIdMap& ids,
                            bool with_weights) {
  char buf[64];
  for (VertexId u = 0; u < g.num_vertices(); ++u) {
    if (g.unweighted_degree(u) == 0) {
      out << ids.to_external(u) << ' ' << ids.to_external(u) << '\n';
    }
  }
  for (const auto& e : g.edge_list()) {
    out << ids.to_external(e.u) << ' ' << ids.to_external(e.v);
    if (with_weights) {
      std::snprintf(buf, sizeof buf, "%.17g", e.weight);
      out << ' ' << buf;
    }
    out << '\n';
  }
}

// FNV-1a over the adjacency arrays; identifies a graph for cache keys.
inline std::uint64_t graph_digest(const Graph& g) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(g.num_vertices());
  for (auto o : g.offsets()) mix(o);
  for (auto t : g.targets()) mix(t);
  for (double w : g.edge_weights()) mix(std::bit_cast<std::uint64_t>(w));
  return h;
}

}  // namespace hols
