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

#include <map>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "hols/homogeneity.hpp"
#include "support/oracles.hpp"

namespace hols {
namespace {

LabelConfiguration cfg(std::vector<std::uint32_t> parts) { return {std::move(parts)}; }

TEST(Configuration, FromClassList) {
  const std::vector<ClassId> aab = {4, 4, 1};
  EXPECT_EQ(configuration_of(aab), cfg({2, 1}));
  const std::vector<ClassId> abc = {0, 2, 1};
  EXPECT_EQ(configuration_of(abc).to_string(), "1-1-1");
  const std::vector<ClassId> aaaa = {3, 3, 3, 3};
  EXPECT_EQ(configuration_of(aaaa).to_string(), "4");
}

TEST(Configuration, PartitionsMostHomogeneousFirst) {
  std::vector<std::string> names;
  for (const auto& p : partitions_of(4)) names.push_back(p.to_string());
  EXPECT_EQ(names, (std::vector<std::string>{"4", "3-1", "2-2", "2-1-1", "1-1-1-1"}));
  EXPECT_EQ(partitions_of(3).size(), 3u);
  EXPECT_EQ(partitions_of(6).size(), 11u);
}

TEST(Configuration, PossibleUnderClassCount) {
  EXPECT_EQ(possible_configurations(3, 2).size(), 2u);
  EXPECT_EQ(least_homogeneous_configuration(3, 2), cfg({2, 1}));
  EXPECT_EQ(least_homogeneous_configuration(3, 7), cfg({1, 1, 1}));
  EXPECT_EQ(least_homogeneous_configuration(2, 2), cfg({1, 1}));
  EXPECT_EQ(most_homogeneous_configuration(4), cfg({4}));
}

std::map<std::string, std::uint64_t> oracle_counts(const Graph& g, const LabelAssignment& l, std::size_t k) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& [vs, w] : testing::subset_cliques(g, k)) {
    std::map<ClassId, std::uint32_t> mult;
    for (auto v : vs) ++mult[*l.get(v)];
    std::vector<std::uint32_t> parts;
    for (const auto& [c, m] : mult) parts.push_back(m);
    std::sort(parts.rbegin(), parts.rend());
    ++counts[cfg(parts).to_string()];
  }
  return counts;
}

TEST(Observed, MatchesSubsetOracle) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto g = testing::erdos_renyi(20, 0.5, 70 + s);
    const auto l = testing::random_total_labels(20, 3, s);
    for (std::size_t k = 2; k <= 4; ++k) {
      const auto d = observed_distribution(g, l, k);
      std::map<std::string, std::uint64_t> got;
      for (const auto& [c, n] : d.counts) got[c.to_string()] = n;
      EXPECT_EQ(got, oracle_counts(g, l, k));
      EXPECT_EQ(d.total, count_cliques(g, k));
    }
  }
}

TEST(Observed, RequiresTotalLabels) {
  const auto g = testing::hub_toy();
  try {
    observed_distribution(g, testing::hub_toy_seeds(), 3);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("vertex 0"), std::string::npos);
  }
}

TEST(Shuffled, PoolsRepetitionsAndKeepsMarginals) {
  const auto g = testing::erdos_renyi(30, 0.4, 5);
  const auto l = testing::random_total_labels(30, 2, 5);
  const auto d = shuffled_distribution(g, l, 3, 7, 99);
  EXPECT_EQ(d.total, 7 * count_cliques(g, 3));
  EXPECT_THROW(shuffled_distribution(g, l, 3, 0, 99), ValidationError);
}

TEST(Shuffled, DeterministicAndThreadIndependent) {
  const auto g = testing::erdos_renyi(60, 0.3, 6);
  const auto l = testing::random_total_labels(60, 3, 6);
  const auto a = shuffled_distribution(g, l, 3, 5, 1234);
  const auto b = shuffled_distribution(g, l, 3, 5, 1234, {{4, kDefaultMaxCliqueSize}});
  EXPECT_EQ(a.counts, b.counts);
  const auto c = shuffled_distribution(g, l, 3, 5, 1235);
  EXPECT_NE(a.counts, c.counts);
}

TEST(Shuffled, SingleRepIsOnePermutationOfTheLabels) {
  // Pairing each clique with the permuted label vector must reproduce the
  // observed tally of that permuted vector.
  const auto g = testing::erdos_renyi(25, 0.4, 8);
  const auto l = testing::random_total_labels(25, 2, 8);
  std::vector<ClassId> perm(l.raw().begin(), l.raw().end());
  auto rng = make_stream(42, {0});
  shuffle_in_place(std::span<ClassId>(perm), rng);
  LabelAssignment permuted(25, 2);
  for (VertexId v = 0; v < 25; ++v) permuted.set(v, perm[v]);
  EXPECT_EQ(shuffled_distribution(g, l, 3, 1, 42).counts, observed_distribution(g, permuted, 3).counts);
  EXPECT_EQ(permuted.class_sizes(), l.class_sizes());
}

TEST(Report, MonochromaticGraphHasUnitRatio) {
  const auto g = testing::erdos_renyi(20, 0.5, 1);
  LabelAssignment l(20, 1);
  for (VertexId v = 0; v < 20; ++v) l.set(v, 0);
  const auto r = homogeneity_report(observed_distribution(g, l, 3), shuffled_distribution(g, l, 3, 3, 1));
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].configuration.to_string(), "3");
  EXPECT_DOUBLE_EQ(*r.rows[0].ratio, 1.0);
}

TEST(Report, InfiniteAndAbsentRatios) {
  ConfigDistribution obs{3, {}, 0};
  obs.counts[cfg({3})] = 4;
  obs.total = 4;
  ConfigDistribution null_model{3, {}, 0};
  null_model.counts[cfg({2, 1})] = 10;
  null_model.total = 10;
  const auto r = homogeneity_report(obs, null_model);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].configuration, cfg({3}));
  EXPECT_TRUE(std::isinf(*r.rows[0].ratio));
  EXPECT_FALSE(r.rows[1].ratio.has_value());
  std::ostringstream csv;
  write_report_csv(csv, r);
  EXPECT_EQ(csv.str(),
            "configuration,observed_count,observed_prob,null_prob,ratio\n"
            "3,4,1,0,inf\n"
            "2-1,0,0,1,absent\n");
  ConfigDistribution other{4, {}, 0};
  EXPECT_THROW(homogeneity_report(obs, other), ValidationError);
}

TEST(Report, JsonCarriesMetadata) {
  const auto g = testing::hub_toy();
  LabelAssignment l(8, 2);
  for (VertexId v = 0; v < 8; ++v) l.set(v, v < 4 ? 0 : 1);
  const auto obs = observed_distribution(g, l, 2);
  const auto nul = shuffled_distribution(g, l, 2, 4, 3);
  const auto j = to_json(homogeneity_report(obs, nul), obs, nul, {graph_digest(g), 4, 3, 2});
  EXPECT_EQ(j["k"], 2);
  EXPECT_EQ(j["reps"], 4);
  EXPECT_EQ(j["observed_total"], 10);
  EXPECT_EQ(j["null_total"], 40);
  EXPECT_EQ(j["rows"][0]["configuration"], "2");
  EXPECT_EQ(j["rows"][0]["observed_count"], 6);
}

}  // namespace
}  // namespace hols
