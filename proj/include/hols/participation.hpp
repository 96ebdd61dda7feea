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

#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "hols/cliques.hpp"
#include "hols/common.hpp"
#include "hols/graph.hpp"

namespace hols {

// Symmetric sparse matrix in CSR form with sorted column indices.
class SparseSymmetricMatrix {
 public:
  SparseSymmetricMatrix() : offsets_(1, 0) {}

  // Zero-valued matrix sharing the adjacency pattern of `g`.
  static SparseSymmetricMatrix with_pattern_of(const Graph& g) {
    SparseSymmetricMatrix m;
    m.offsets_.assign(g.offsets().begin(), g.offsets().end());
    m.cols_.assign(g.targets().begin(), g.targets().end());
    m.vals_.assign(m.cols_.size(), 0.0);
    return m;
  }

  // Adjacency of `g` with its edge weights.
  static SparseSymmetricMatrix adjacency_of(const Graph& g) {
    auto m = with_pattern_of(g);
    m.vals_.assign(g.edge_weights().begin(), g.edge_weights().end());
    return m;
  }

  std::size_t dimension() const { return offsets_.size() - 1; }
  std::size_t stored_entries() const { return cols_.size(); }

  std::span<const VertexId> row_columns(std::size_t r) const {
    return {cols_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {vals_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
  }
  std::span<double> row_values(std::size_t r) {
    return {vals_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
  }

  // Stored value or 0 when (r, c) is outside the pattern.
  double at(std::size_t r, VertexId c) const {
    const auto cols = row_columns(r);
    const auto it = std::lower_bound(cols.begin(), cols.end(), c);
    if (it == cols.end() || *it != c) return 0.0;
    return vals_[offsets_[r] + static_cast<std::size_t>(it - cols.begin())];
  }

  // Adds to an entry already in the pattern.
  void add_existing(std::size_t r, VertexId c, double delta) {
    const auto cols = row_columns(r);
    const auto it = std::lower_bound(cols.begin(), cols.end(), c);
    if (it == cols.end() || *it != c) {
      throw ValidationError(detail::concat("entry (", r, ", ", c, ") outside sparsity pattern"));
    }
    vals_[offsets_[r] + static_cast<std::size_t>(it - cols.begin())] += delta;
  }

  double row_sum(std::size_t r) const {
    double s = 0.0;
    for (double v : row_values(r)) s += v;
    return s;
  }

  double total() const {
    double s = 0.0;
    for (double v : vals_) s += v;
    return s;
  }

  std::size_t nonzeros() const {
    return static_cast<std::size_t>(
        std::count_if(vals_.begin(), vals_.end(), [](double v) { return v != 0.0; }));
  }

  // Drops stored zeros.
  SparseSymmetricMatrix pruned() const {
    SparseSymmetricMatrix m;
    m.offsets_.assign(offsets_.size(), 0);
    for (std::size_t r = 0; r < dimension(); ++r) {
      const auto cols = row_columns(r);
      const auto vals = row_values(r);
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (vals[i] != 0.0) {
          m.cols_.push_back(cols[i]);
          m.vals_.push_back(vals[i]);
        }
      }
      m.offsets_[r + 1] = m.cols_.size();
    }
    return m;
  }

  // Builds from upper-triangle triples (i < j), mirrored. Triples must be
  // sorted by (i, j) and unique.
  static SparseSymmetricMatrix from_upper_triples(std::size_t n,
                                                  std::span<const std::tuple<VertexId, VertexId, double>> triples) {
    std::vector<WeightedEdge> edges;
    edges.reserve(triples.size());
    for (const auto& [i, j, w] : triples) {
      if (i >= j || j >= n) {
        throw ValidationError(detail::concat("invalid triple (", i, ", ", j, ") for N=", n));
      }
      edges.push_back({i, j, w});
    }
    const auto g = Graph::from_edges(n, edges);
    return adjacency_of(g);
  }

  std::vector<std::tuple<VertexId, VertexId, double>> upper_triples() const {
    std::vector<std::tuple<VertexId, VertexId, double>> out;
    for (std::size_t r = 0; r < dimension(); ++r) {
      const auto cols = row_columns(r);
      const auto vals = row_values(r);
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] > r) out.emplace_back(static_cast<VertexId>(r), cols[i], vals[i]);
      }
    }
    return out;
  }

  // Sum of scaled matrices over the union of their patterns.
  static SparseSymmetricMatrix weighted_sum(std::span<const SparseSymmetricMatrix* const> parts,
                                            std::span<const double> scales) {
    const std::size_t n = parts.empty() ? 0 : parts.front()->dimension();
    SparseSymmetricMatrix m;
    m.offsets_.assign(n + 1, 0);
    std::vector<std::pair<VertexId, double>> row;
    for (std::size_t r = 0; r < n; ++r) {
      row.clear();
      for (std::size_t p = 0; p < parts.size(); ++p) {
        const auto cols = parts[p]->row_columns(r);
        const auto vals = parts[p]->row_values(r);
        for (std::size_t i = 0; i < cols.size(); ++i) row.emplace_back(cols[i], scales[p] * vals[i]);
      }
      std::stable_sort(row.begin(), row.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t i = 0; i < row.size();) {
        const auto c = row[i].first;
        double v = 0.0;
        for (; i < row.size() && row[i].first == c; ++i) v += row[i].second;
        m.cols_.push_back(c);
        m.vals_.push_back(v);
      }
      m.offsets_[r + 1] = m.cols_.size();
    }
    return m;
  }

  friend bool operator==(const SparseSymmetricMatrix&, const SparseSymmetricMatrix&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<VertexId> cols_;
  std::vector<double> vals_;

  friend class PropagationOperator;
};

// Motif set K with importance weights. Only cliques are supported.
class MotifPlan {
 public:
  static constexpr double kSumTolerance = 1e-12;

  MotifPlan() = default;
  MotifPlan(std::vector<std::size_t> clique_sizes, std::vector<double> alphas)
      : clique_sizes_(std::move(clique_sizes)), alphas_(std::move(alphas)) {
    validate();
  }

  static MotifPlan edges_only() { return MotifPlan({2}, {1.0}); }

  // {K2: 1 - a, K3: a}; a == 0 collapses to edges only.
  static MotifPlan edges_and_triangles(double triangle_weight) {
    if (triangle_weight == 0.0) return edges_only();
    return MotifPlan({2, 3}, {1.0 - triangle_weight, triangle_weight});
  }

  // Drops zero-weight motifs before validating, so grid points such as
  // {K2: 0.7, K3: 0.3, K4: 0} are expressible.
  static MotifPlan from_weights(std::span<const std::size_t> sizes, std::span<const double> alphas) {
    if (sizes.size() != alphas.size()) {
      throw ValidationError(detail::concat("motif plan has ", sizes.size(), " clique sizes but ",
                                           alphas.size(), " weights"));
    }
    std::vector<std::size_t> ks;
    std::vector<double> as;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if (alphas[i] == 0.0) continue;
      ks.push_back(sizes[i]);
      as.push_back(alphas[i]);
    }
    return MotifPlan(std::move(ks), std::move(as));
  }

  std::span<const std::size_t> clique_sizes() const { return clique_sizes_; }
  std::span<const double> alphas() const { return alphas_; }
  std::size_t size() const { return clique_sizes_.size(); }

  double alpha_for(std::size_t k) const {
    for (std::size_t i = 0; i < clique_sizes_.size(); ++i) {
      if (clique_sizes_[i] == k) return alphas_[i];
    }
    return 0.0;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < clique_sizes_.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%sK%zu:%.6g", i ? "," : "", clique_sizes_[i], alphas_[i]);
      s += buf;
    }
    return s;
  }

  friend bool operator==(const MotifPlan&, const MotifPlan&) = default;

 private:
  void validate() const {
    if (clique_sizes_.empty()) throw ValidationError("motif plan is empty");
    if (clique_sizes_.size() != alphas_.size()) {
      throw ValidationError("motif plan sizes and weights are not aligned");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < clique_sizes_.size(); ++i) {
      if (clique_sizes_[i] < 2) {
        throw ValidationError(detail::concat("clique size must be >= 2, got ", clique_sizes_[i]));
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (clique_sizes_[j] == clique_sizes_[i]) {
          throw ValidationError(detail::concat("clique size ", clique_sizes_[i], " listed twice"));
        }
      }
      // A single-motif plan carries weight exactly 1.
      if (!(alphas_[i] > 0.0) || alphas_[i] > 1.0) {
        throw ValidationError(detail::concat("motif weight ", alphas_[i], " outside (0, 1]"));
      }
      sum += alphas_[i];
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw ValidationError(detail::concat("motif weights sum to ", sum, ", expected 1"));
    }
  }

  std::vector<std::size_t> clique_sizes_;
  std::vector<double> alphas_;
};

// E^k for one clique size; entry (i, j) totals the weights of the k-cliques
// containing both i and j. The diagonal is never stored.
struct ParticipationMatrix {
  std::size_t clique_size = 0;
  SparseSymmetricMatrix entries;
  std::uint64_t occurrences = 0;
};

inline constexpr std::size_t kParticipationBlock = 4096;

// Accumulation is grouped by DAG root: each root's cliques are reduced to a
// sorted list of per-pair partial sums, and the partials are folded into the
// matrix in root order. Sequential and parallel builds therefore perform the
// same floating-point additions in the same order.
inline ParticipationMatrix build_participation(const Graph& g, std::size_t k,
                                               const EnumerationOptions& options = {}) {
  validate_clique_size(k, options.max_clique_size);
  ParticipationMatrix result;
  result.clique_size = k;
  if (k == 2) {
    result.entries = SparseSymmetricMatrix::adjacency_of(g);
    result.occurrences = g.num_edges();
    return result;
  }
  result.entries = SparseSymmetricMatrix::with_pattern_of(g);
  const CliqueDag dag(g);
  const std::size_t n = g.num_vertices();

  using Partial = std::vector<std::tuple<VertexId, VertexId, double>>;
  auto collect = [&](VertexId root, CliqueScratch& scratch, Partial& out) -> std::uint64_t {
    out.clear();
    const auto count = enumerate_cliques_from(
        dag, root, k, scratch, [&](std::span<const VertexId> vs, double w) {
          for (std::size_t a = 0; a < vs.size(); ++a) {
            for (std::size_t b = a + 1; b < vs.size(); ++b) out.emplace_back(vs[a], vs[b], w);
          }
        });
    std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
      return std::tie(std::get<0>(x), std::get<1>(x)) < std::tie(std::get<0>(y), std::get<1>(y));
    });
    std::size_t write = 0;
    for (std::size_t i = 0; i < out.size();) {
      auto [a, b, sum] = out[i];
      for (++i; i < out.size() && std::get<0>(out[i]) == a && std::get<1>(out[i]) == b; ++i) {
        sum += std::get<2>(out[i]);
      }
      out[write++] = {a, b, sum};
    }
    out.resize(write);
    return count;
  };
  auto fold = [&](const Partial& partial) {
    for (const auto& [a, b, w] : partial) {
      result.entries.add_existing(a, b, w);
      result.entries.add_existing(b, a, w);
    }
  };

  const std::size_t workers = detail::resolve_threads(options.threads);
  if (workers <= 1) {
    CliqueScratch scratch(k);
    Partial partial;
    for (VertexId root = 0; root < n; ++root) {
      result.occurrences += collect(root, scratch, partial);
      fold(partial);
    }
    return result;
  }

  std::vector<Partial> partials(std::min(kParticipationBlock, n));
  for (std::size_t block = 0; block < n; block += kParticipationBlock) {
    const std::size_t end = std::min(n, block + kParticipationBlock);
    std::atomic<std::size_t> next{block};
    std::atomic<std::uint64_t> count{0};
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          CliqueScratch scratch(k);
          std::uint64_t local = 0;
          for (auto r = next.fetch_add(1); r < end; r = next.fetch_add(1)) {
            local += collect(static_cast<VertexId>(r), scratch, partials[r - block]);
          }
          count += local;
        });
      }
    }
    result.occurrences += count.load();
    for (std::size_t r = block; r < end; ++r) fold(partials[r - block]);
  }
  return result;
}

// Builds one participation matrix per motif of the plan, in plan order.
inline std::vector<ParticipationMatrix> build_participations(const Graph& g, const MotifPlan& plan,
                                                             const EnumerationOptions& options = {}) {
  std::vector<ParticipationMatrix> parts;
  parts.reserve(plan.size());
  for (auto k : plan.clique_sizes()) parts.push_back(build_participation(g, k, options));
  return parts;
}

// Holds W' = sum_k alpha_k E^k, its degrees d', and S = D'^-1/2 W' D'^-1/2.
// Rows and columns of zero-degree vertices are zero in S.
class PropagationOperator {
 public:
  PropagationOperator() = default;

  static PropagationOperator from_reweighted(SparseSymmetricMatrix reweighted) {
    PropagationOperator op;
    op.reweighted_ = reweighted.pruned();
    const std::size_t n = op.reweighted_.dimension();
    op.degree_.assign(n, 0.0);
    op.inv_sqrt_degree_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = op.reweighted_.row_sum(i);
      op.degree_[i] = d;
      if (d > 0.0) op.inv_sqrt_degree_[i] = 1.0 / std::sqrt(d);
    }
    op.normalized_ = op.reweighted_;
    for (std::size_t i = 0; i < n; ++i) {
      const auto cols = op.normalized_.row_columns(i);
      auto vals = op.normalized_.row_values(i);
      for (std::size_t e = 0; e < cols.size(); ++e) {
        vals[e] = vals[e] * op.inv_sqrt_degree_[i] * op.inv_sqrt_degree_[cols[e]];
      }
    }
    return op;
  }

  std::size_t dimension() const { return degree_.size(); }
  const SparseSymmetricMatrix& reweighted() const { return reweighted_; }
  const SparseSymmetricMatrix& normalized() const { return normalized_; }
  std::span<const double> degrees() const { return degree_; }

  std::size_t isolated_count() const {
    return static_cast<std::size_t>(std::count(degree_.begin(), degree_.end(), 0.0));
  }

  // out = S * x
  void apply(const DenseMatrix& x, DenseMatrix& out) const {
    check_shape(x);
    out = DenseMatrix(x.rows(), x.cols());
    multiply(normalized_, x, out, nullptr);
  }
  DenseMatrix apply(const DenseMatrix& x) const {
    DenseMatrix out;
    apply(x, out);
    return out;
  }

  // out = D'^-1 W' x (random-walk operator of the label-propagation baseline).
  void apply_random_walk(const DenseMatrix& x, DenseMatrix& out) const {
    check_shape(x);
    out = DenseMatrix(x.rows(), x.cols());
    multiply(reweighted_, x, out, &degree_);
  }

 private:
  void check_shape(const DenseMatrix& x) const {
    if (x.rows() != dimension()) {
      throw ValidationError(detail::concat("operator has dimension ", dimension(),
                                           " but the score matrix has ", x.rows(), " rows"));
    }
  }

  static void multiply(const SparseSymmetricMatrix& m, const DenseMatrix& x, DenseMatrix& out,
                       const std::vector<double>* row_divisor) {
    const std::size_t c = x.cols();
    for (std::size_t i = 0; i < m.dimension(); ++i) {
      auto dst = out.row(i);
      const auto cols = m.row_columns(i);
      const auto vals = m.row_values(i);
      for (std::size_t e = 0; e < cols.size(); ++e) {
        const auto src = x.row(cols[e]);
        for (std::size_t j = 0; j < c; ++j) dst[j] += vals[e] * src[j];
      }
      if (row_divisor != nullptr) {
        const double d = (*row_divisor)[i];
        for (std::size_t j = 0; j < c; ++j) dst[j] = d > 0.0 ? dst[j] / d : 0.0;
      }
    }
  }

  SparseSymmetricMatrix reweighted_;
  SparseSymmetricMatrix normalized_;
  std::vector<double> degree_;
  std::vector<double> inv_sqrt_degree_;
};

// W' = sum_k alpha_k E^k, then normalization.
inline PropagationOperator combine(std::span<const ParticipationMatrix> parts, const MotifPlan& plan) {
  if (parts.size() != plan.size()) {
    throw ValidationError(detail::concat("plan has ", plan.size(), " motifs but ", parts.size(),
                                         " participation matrices were given"));
  }
  std::vector<const SparseSymmetricMatrix*> mats;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].clique_size != plan.clique_sizes()[i]) {
      throw ValidationError(detail::concat("participation matrix ", i, " is for K",
                                           parts[i].clique_size, " but the plan expects K",
                                           plan.clique_sizes()[i]));
    }
    if (parts[i].entries.dimension() != parts.front().entries.dimension()) {
      throw ValidationError("participation matrices have different dimensions");
    }
    mats.push_back(&parts[i].entries);
  }
  return PropagationOperator::from_reweighted(
      SparseSymmetricMatrix::weighted_sum(mats, plan.alphas()));
}

// Picks the matrices a plan needs out of a pool keyed by clique size.
inline PropagationOperator combine_from_pool(std::span<const ParticipationMatrix> pool,
                                             const MotifPlan& plan) {
  std::vector<const SparseSymmetricMatrix*> mats;
  for (auto k : plan.clique_sizes()) {
    const auto it = std::find_if(pool.begin(), pool.end(),
                                 [k](const ParticipationMatrix& p) { return p.clique_size == k; });
    if (it == pool.end()) throw ValidationError(detail::concat("no participation matrix for K", k));
    if (it->entries.dimension() != pool.front().entries.dimension()) {
      throw ValidationError("participation matrices have different dimensions");
    }
    mats.push_back(&it->entries);
  }
  return PropagationOperator::from_reweighted(
      SparseSymmetricMatrix::weighted_sum(mats, plan.alphas()));
}

inline DenseMatrix operator_apply(const PropagationOperator& op, const DenseMatrix& x) {
  return op.apply(x);
}

// ---------------------------------------------------------------------------
// Binary cache of W'.
//
// Layout (all integers u64 little-endian, reals IEEE-754 binary64 LE):
//   magic "HOLSW1\0\0", graph digest, motif count m, m x (clique size, alpha),
//   N, entry count E, E x (i, j, w') with i < j sorted by (i, j).

inline constexpr std::array<char, 8> kCacheMagic = {'H', 'O', 'L', 'S', 'W', '1', '\0', '\0'};

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b, 8);
}

inline std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw ParseError(0, "truncated cache file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return v;
}

}  // namespace detail

inline void save_reweighted_cache(std::ostream& out, std::uint64_t digest, const MotifPlan& plan,
                                  const SparseSymmetricMatrix& reweighted) {
  out.write(kCacheMagic.data(), kCacheMagic.size());
  detail::put_u64(out, digest);
  detail::put_u64(out, plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    detail::put_u64(out, plan.clique_sizes()[i]);
    detail::put_u64(out, std::bit_cast<std::uint64_t>(plan.alphas()[i]));
  }
  const auto triples = reweighted.upper_triples();
  detail::put_u64(out, reweighted.dimension());
  detail::put_u64(out, triples.size());
  for (const auto& [i, j, w] : triples) {
    detail::put_u64(out, i);
    detail::put_u64(out, j);
    detail::put_u64(out, std::bit_cast<std::uint64_t>(w));
  }
}

// Returns W' when the cache matches (digest, plan); nullopt on a key mismatch.
inline std::optional<SparseSymmetricMatrix> load_reweighted_cache(std::istream& in,
                                                                  std::uint64_t digest,
                                                                  const MotifPlan& plan) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kCacheMagic) {
    throw ParseError(0, "not a reweighted-adjacency cache file");
  }
  if (detail::get_u64(in) != digest) return std::nullopt;
  const auto m = detail::get_u64(in);
  if (m != plan.size()) return std::nullopt;
  for (std::size_t i = 0; i < m; ++i) {
    const auto k = detail::get_u64(in);
    const auto a = std::bit_cast<double>(detail::get_u64(in));
    if (k != plan.clique_sizes()[i] || a != plan.alphas()[i]) return std::nullopt;
  }
  const auto n = detail::get_u64(in);
  const auto count = detail::get_u64(in);
  std::vector<std::tuple<VertexId, VertexId, double>> triples;
  triples.reserve(count);
  for (std::uint64_t e = 0; e < count; ++e) {
    const auto i = static_cast<VertexId>(detail::get_u64(in));
    const auto j = static_cast<VertexId>(detail::get_u64(in));
    const auto w = std::bit_cast<double>(detail::get_u64(in));
    triples.emplace_back(i, j, w);
  }
  return SparseSymmetricMatrix::from_upper_triples(n, triples);
}

}  // namespace hols
