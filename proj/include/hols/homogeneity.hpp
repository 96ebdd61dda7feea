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

// Label configurations of k-cliques and the label-shuffle null model.
//
// A configuration is the multiset of class multiplicities inside a clique,
// e.g. a triangle with classes (a, a, b) has configuration "2-1".
// Configurations are ordered from most homogeneous ("k") to least
// ("1-1-...-1"), which is descending lexicographic order of the parts.

#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hols/cliques.hpp"
#include "hols/common.hpp"
#include "hols/graph.hpp"
#include "hols/random.hpp"

namespace hols {

struct LabelConfiguration {
  // Class multiplicities, sorted descending; all >= 1.
  std::vector<std::uint32_t> parts;

  std::size_t clique_size() const {
    std::size_t s = 0;
    for (auto p : parts) s += p;
    return s;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) s += '-';
      s += std::to_string(parts[i]);
    }
    return s;
  }

  friend bool operator==(const LabelConfiguration&, const LabelConfiguration&) = default;
};

// Most homogeneous first.
struct MoreHomogeneousFirst {
  bool operator()(const LabelConfiguration& a, const LabelConfiguration& b) const {
    return a.parts > b.parts;
  }
};

inline LabelConfiguration configuration_of(std::span<const ClassId> classes) {
  std::vector<ClassId> sorted(classes.begin(), classes.end());
  std::sort(sorted.begin(), sorted.end());
  LabelConfiguration cfg;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    cfg.parts.push_back(static_cast<std::uint32_t>(j - i));
    i = j;
  }
  std::sort(cfg.parts.begin(), cfg.parts.end(), std::greater<>());
  return cfg;
}

// Integer partitions of k, most homogeneous first.
inline std::vector<LabelConfiguration> partitions_of(std::size_t k) {
  std::vector<LabelConfiguration> out;
  std::vector<std::uint32_t> current;
  auto rec = [&](auto&& self, std::size_t remaining, std::size_t max_part) -> void {
    if (remaining == 0) {
      out.push_back({current});
      return;
    }
    for (std::size_t p = std::min(remaining, max_part); p >= 1; --p) {
      current.push_back(static_cast<std::uint32_t>(p));
      self(self, remaining - p, p);
      current.pop_back();
    }
  };
  if (k > 0) rec(rec, k, k);
  return out;
}

// Configurations a k-clique can show when there are `num_classes` classes.
inline std::vector<LabelConfiguration> possible_configurations(std::size_t k,
                                                               std::size_t num_classes) {
  auto all = partitions_of(k);
  std::erase_if(all, [&](const LabelConfiguration& c) { return c.parts.size() > num_classes; });
  return all;
}

inline LabelConfiguration most_homogeneous_configuration(std::size_t k) {
  return {{static_cast<std::uint32_t>(k)}};
}

inline LabelConfiguration least_homogeneous_configuration(std::size_t k, std::size_t num_classes) {
  const auto possible = possible_configurations(k, num_classes);
  if (possible.empty()) throw ValidationError("no configuration is possible");
  return possible.back();
}

struct ConfigDistribution {
  std::size_t clique_size = 0;
  std::map<LabelConfiguration, std::uint64_t, MoreHomogeneousFirst> counts;
  std::uint64_t total = 0;

  std::uint64_t count(const LabelConfiguration& c) const {
    const auto it = counts.find(c);
    return it == counts.end() ? 0 : it->second;
  }
  double probability(const LabelConfiguration& c) const {
    return total == 0 ? 0.0 : static_cast<double>(count(c)) / static_cast<double>(total);
  }
};

struct HomogeneityOptions {
  EnumerationOptions enumeration;
};

namespace detail {

// Counts configurations of the cliques under one or more label vectors.
// Safe under a parallel enumeration: partition slots are atomics.
class ConfigurationTally {
 public:
  explicit ConfigurationTally(std::size_t k)
      : k_(k), partitions_(partitions_of(k)), counts_(partitions_.size()) {
    if (k > kMaxClique) throw CapacityError(concat("configuration tally supports k <= ", kMaxClique));
  }

  void add(std::span<const VertexId> vertices, std::span<const ClassId> labels) {
    std::array<ClassId, kMaxClique> classes{};
    for (std::size_t i = 0; i < vertices.size(); ++i) classes[i] = labels[vertices[i]];
    const auto cfg = configuration_of(std::span<const ClassId>(classes.data(), vertices.size()));
    for (std::size_t p = 0; p < partitions_.size(); ++p) {
      if (partitions_[p] == cfg) {
        counts_[p].fetch_add(1, std::memory_order_relaxed);
        return;
      }
    }
  }

  ConfigDistribution finish() const {
    ConfigDistribution d;
    d.clique_size = k_;
    for (std::size_t p = 0; p < partitions_.size(); ++p) {
      const auto c = counts_[p].load();
      if (c > 0) d.counts.emplace(partitions_[p], c);
      d.total += c;
    }
    return d;
  }

 private:
  static constexpr std::size_t kMaxClique = 32;

  std::size_t k_;
  std::vector<LabelConfiguration> partitions_;
  std::vector<std::atomic<std::uint64_t>> counts_;
};

inline void require_total(const LabelAssignment& labels, std::size_t n) {
  if (labels.num_vertices() != n) {
    throw ValidationError(concat("label assignment covers ", labels.num_vertices(),
                                 " vertices, graph has ", n));
  }
  if (const auto v = labels.first_unlabeled()) {
    throw ValidationError(concat("vertex ", *v, " is unlabeled; homogeneity needs total labels"));
  }
}

}  // namespace detail

inline ConfigDistribution observed_distribution(const Graph& g, const LabelAssignment& labels,
                                                std::size_t k,
                                                const HomogeneityOptions& options = {}) {
  detail::require_total(labels, g.num_vertices());
  detail::ConfigurationTally tally(k);
  const auto raw = labels.raw();
  enumerate_cliques(
      g, k, [&](std::span<const VertexId> vs, double) { tally.add(vs, raw); }, options.enumeration);
  return tally.finish();
}

inline constexpr std::size_t kDefaultShuffleReps = 20;
inline constexpr std::uint64_t kDefaultShuffleSeed = 20200420;

// Null model: each repetition permutes the whole label vector uniformly at
// random (stream derived from (seed, rep)), so the label histogram is kept
// exactly. Counts are pooled over repetitions; one enumeration pass serves
// all repetitions.
inline ConfigDistribution shuffled_distribution(const Graph& g, const LabelAssignment& labels,
                                                std::size_t k, std::size_t reps, std::uint64_t seed,
                                                const HomogeneityOptions& options = {}) {
  detail::require_total(labels, g.num_vertices());
  if (reps < 1) throw ValidationError("shuffle repetitions must be >= 1");
  const auto raw = labels.raw();
  std::vector<std::vector<ClassId>> shuffled(reps, std::vector<ClassId>(raw.begin(), raw.end()));
  for (std::size_t r = 0; r < reps; ++r) {
    auto rng = make_stream(seed, {r});
    shuffle_in_place(std::span<ClassId>(shuffled[r]), rng);
  }
  detail::ConfigurationTally tally(k);
  enumerate_cliques(
      g, k,
      [&](std::span<const VertexId> vs, double) {
        for (const auto& perm : shuffled) tally.add(vs, perm);
      },
      options.enumeration);
  return tally.finish();
}

struct HomogeneityRow {
  LabelConfiguration configuration;
  std::uint64_t observed_count = 0;
  double observed_prob = 0.0;
  double null_prob = 0.0;
  // observed / null; +inf when the null never shows the configuration;
  // nullopt ("absent") when it was never observed.
  std::optional<double> ratio;
};

struct HomogeneityReport {
  std::size_t clique_size = 0;
  std::vector<HomogeneityRow> rows;

  const HomogeneityRow* find(const LabelConfiguration& c) const {
    for (const auto& r : rows) {
      if (r.configuration == c) return &r;
    }
    return nullptr;
  }
};

inline HomogeneityReport homogeneity_report(const ConfigDistribution& observed,
                                            const ConfigDistribution& null_model) {
  if (observed.clique_size != null_model.clique_size) {
    throw ValidationError(detail::concat("cannot compare k=", observed.clique_size, " with k=",
                                         null_model.clique_size));
  }
  std::map<LabelConfiguration, int, MoreHomogeneousFirst> keys;
  for (const auto& [c, n] : observed.counts) keys.emplace(c, 0);
  for (const auto& [c, n] : null_model.counts) keys.emplace(c, 0);
  HomogeneityReport report;
  report.clique_size = observed.clique_size;
  for (const auto& [c, unused] : keys) {
    HomogeneityRow row;
    row.configuration = c;
    row.observed_count = observed.count(c);
    row.observed_prob = observed.probability(c);
    row.null_prob = null_model.probability(c);
    if (row.observed_count > 0) {
      row.ratio = row.null_prob > 0.0 ? row.observed_prob / row.null_prob
                                      : std::numeric_limits<double>::infinity();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

inline void write_report_csv(std::ostream& out, const HomogeneityReport& report) {
  out << "configuration,observed_count,observed_prob,null_prob,ratio\n";
  char buf[128];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, ",%llu,%.12g,%.12g,",
                  static_cast<unsigned long long>(r.observed_count), r.observed_prob, r.null_prob);
    out << r.configuration.to_string() << buf;
    if (!r.ratio) {
      out << "absent";
    } else if (std::isinf(*r.ratio)) {
      out << "inf";
    } else {
      std::snprintf(buf, sizeof buf, "%.12g", *r.ratio);
      out << buf;
    }
    out << '\n';
  }
}

struct HomogeneityMetadata {
  std::uint64_t graph_digest = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::size_t num_classes = 0;
};

inline nlohmann::ordered_json to_json(const HomogeneityReport& report,
                                      const ConfigDistribution& observed,
                                      const ConfigDistribution& null_model,
                                      const HomogeneityMetadata& meta) {
  char digest[32];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(meta.graph_digest));
  nlohmann::ordered_json j;
  j["graph_digest"] = digest;
  j["k"] = report.clique_size;
  j["num_classes"] = meta.num_classes;
  j["reps"] = meta.reps;
  j["seed"] = meta.seed;
  j["observed_total"] = observed.total;
  j["null_total"] = null_model.total;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row["configuration"] = r.configuration.to_string();
    row["observed_count"] = r.observed_count;
    row["null_count"] = null_model.count(r.configuration);
    row["observed_prob"] = r.observed_prob;
    row["null_prob"] = r.null_prob;
    if (!r.ratio) {
      row["ratio"] = "absent";
    } else if (std::isinf(*r.ratio)) {
      row["ratio"] = "inf";
    } else {
      row["ratio"] = *r.ratio;
    }
    j["rows"].push_back(std::move(row));
  }
  return j;
}

}  // namespace hols
