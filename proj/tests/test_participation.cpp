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

#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "hols/participation.hpp"
#include "support/oracles.hpp"

namespace hols {
namespace {

void expect_matches_dense(const SparseSymmetricMatrix& m, const testing::Dense& d, double tol) {
  ASSERT_EQ(m.dimension(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      EXPECT_NEAR(m.at(i, static_cast<VertexId>(j)), d[i][j], tol) << i << "," << j;
    }
  }
}

TEST(Participation, EdgeMatrixIsAdjacency) {
  const auto g = testing::erdos_renyi(25, 0.3, 3, true);
  const auto e2 = build_participation(g, 2);
  expect_matches_dense(e2.entries, testing::dense_adjacency(g), 0.0);
  EXPECT_EQ(e2.occurrences, g.num_edges());
}

TEST(Participation, HubToyTriangleCounts) {
  const auto g = testing::hub_toy();
  const auto e3 = build_participation(g, 3);
  EXPECT_EQ(e3.occurrences, 4u);
  for (VertexId v : {1u, 2u, 3u}) EXPECT_EQ(e3.entries.at(0, v), 2.0);
  EXPECT_EQ(e3.entries.at(1, 2), 2.0);
  EXPECT_EQ(e3.entries.at(1, 3), 2.0);
  EXPECT_EQ(e3.entries.at(2, 3), 2.0);
  for (VertexId p = 4; p < 8; ++p) EXPECT_EQ(e3.entries.at(0, p), 0.0);
  EXPECT_EQ(e3.entries.at(0, 0), 0.0);
}

TEST(Participation, MatchesSubsetOracle) {
  for (std::uint64_t s = 0; s < 8; ++s) {
    const auto g = testing::erdos_renyi(20, 0.45, 40 + s, s % 2 == 1);
    for (std::size_t k = 3; k <= 5; ++k) {
      expect_matches_dense(build_participation(g, k).entries, testing::participation(g, k), 1e-12);
    }
  }
}

TEST(Participation, TotalIsPairsTimesCliqueWeight) {
  const auto g = testing::erdos_renyi(30, 0.4, 9, true);
  for (std::size_t k = 2; k <= 5; ++k) {
    double weight = 0.0;
    for (const auto& o : brute_force_cliques(g, k)) weight += o.weight;
    const double pairs = static_cast<double>(k * (k - 1) / 2);
    EXPECT_NEAR(build_participation(g, k).entries.total(), 2.0 * pairs * weight, 1e-9 * (1 + weight));
  }
}

TEST(Participation, PatternStaysInsideEdgeSet) {
  const auto g = testing::erdos_renyi(40, 0.3, 21);
  const auto e4 = build_participation(g, 4).entries;
  for (std::size_t i = 0; i < e4.dimension(); ++i) {
    for (auto j : e4.row_columns(i)) EXPECT_TRUE(g.has_edge(static_cast<VertexId>(i), j));
  }
  EXPECT_LE(e4.pruned().nonzeros(), 2 * g.num_edges());
}

TEST(Participation, ParallelBuildIsBitwiseIdentical) {
  const auto g = testing::erdos_renyi(120, 0.2, 5, true);
  for (std::size_t k = 3; k <= 4; ++k) {
    const auto seq = build_participation(g, k, {1, kDefaultMaxCliqueSize});
    const auto par = build_participation(g, k, {4, kDefaultMaxCliqueSize});
    EXPECT_TRUE(seq.entries == par.entries);
    EXPECT_EQ(seq.occurrences, par.occurrences);
  }
}

TEST(Participation, AddOutsidePatternThrows) {
  auto m = SparseSymmetricMatrix::with_pattern_of(testing::hub_toy());
  EXPECT_THROW(m.add_existing(4, 5, 1.0), ValidationError);
  m.add_existing(0, 4, 1.5);
  EXPECT_EQ(m.at(0, 4), 1.5);
}

TEST(Participation, UpperTriplesRoundTrip) {
  const auto g = testing::erdos_renyi(30, 0.3, 8, true);
  const auto e3 = build_participation(g, 3).entries.pruned();
  const auto back = SparseSymmetricMatrix::from_upper_triples(e3.dimension(), e3.upper_triples());
  EXPECT_TRUE(back == e3);
}

TEST(MotifPlan, Validation) {
  EXPECT_NO_THROW(MotifPlan({2}, {1.0}));
  EXPECT_NO_THROW(MotifPlan({2, 3}, {0.3, 0.7}));
  EXPECT_THROW(MotifPlan({}, {}), ValidationError);
  EXPECT_THROW(MotifPlan({2, 3}, {0.5}), ValidationError);
  EXPECT_THROW(MotifPlan({2, 2}, {0.5, 0.5}), ValidationError);
  EXPECT_THROW(MotifPlan({1, 2}, {0.5, 0.5}), ValidationError);
  EXPECT_THROW(MotifPlan({2, 3}, {0.0, 1.0}), ValidationError);
  EXPECT_THROW(MotifPlan({2, 3}, {0.5, 0.6}), ValidationError);
  EXPECT_THROW(MotifPlan({2, 3}, {-0.5, 1.5}), ValidationError);
}

TEST(MotifPlan, FactoriesAndFormatting) {
  EXPECT_EQ(MotifPlan::edges_and_triangles(0.0), MotifPlan::edges_only());
  EXPECT_EQ(MotifPlan::edges_and_triangles(0.3).to_string(), "K2:0.7,K3:0.3");
  const std::vector<std::size_t> ks = {2, 3, 4};
  const std::vector<double> as = {0.6, 0.4, 0.0};
  const auto p = MotifPlan::from_weights(ks, as);
  EXPECT_EQ(p.size(), 2u);
  EXPECT_EQ(p.alpha_for(4), 0.0);
  EXPECT_EQ(p.alpha_for(3), 0.4);
}

TEST(Operator, EdgesOnlyPlanGivesSymmetricNormalizedAdjacency) {
  const auto g = testing::erdos_renyi(30, 0.2, 17, true);
  const auto op = testing::operator_for(g, MotifPlan::edges_only());
  expect_matches_dense(op.normalized(), testing::normalized(testing::dense_adjacency(g)), 1e-15);
}

TEST(Operator, ReweightedIsAlphaCombination) {
  const auto g = testing::erdos_renyi(25, 0.4, 33);
  const auto plan = MotifPlan({2, 3, 4}, {0.5, 0.3, 0.2});
  const auto op = testing::operator_for(g, plan);
  const auto w = testing::dense_adjacency(g);
  const auto e3 = testing::participation(g, 3);
  const auto e4 = testing::participation(g, 4);
  testing::Dense expect(w.size(), std::vector<double>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j) expect[i][j] = 0.5 * w[i][j] + 0.3 * e3[i][j] + 0.2 * e4[i][j];
  }
  expect_matches_dense(op.reweighted(), expect, 1e-12);
  expect_matches_dense(op.normalized(), testing::normalized(expect), 1e-12);
}

TEST(Operator, IsolatedVerticesHaveZeroRows) {
  const std::vector<WeightedEdge> edges = {{0, 1}};
  const auto g = Graph::from_edges(3, edges);
  const auto op = testing::operator_for(g, MotifPlan::edges_only());
  EXPECT_EQ(op.isolated_count(), 1u);
  DenseMatrix x(3, 1);
  x(0, 0) = 1;
  x(1, 0) = 2;
  x(2, 0) = 3;
  const auto y = op.apply(x);
  EXPECT_EQ(y(2, 0), 0.0);
  EXPECT_DOUBLE_EQ(y(0, 0), 2.0);
  DenseMatrix rw;
  op.apply_random_walk(x, rw);
  EXPECT_EQ(rw(2, 0), 0.0);
  EXPECT_DOUBLE_EQ(rw(1, 0), 1.0);
}

TEST(Operator, TriangleFreeVerticesBecomeIsolatedUnderPureTriangles) {
  const auto op = testing::operator_for(testing::hub_toy(), MotifPlan({3}, {1.0}));
  EXPECT_EQ(op.isolated_count(), 4u);
}

TEST(Operator, ShapeMismatchThrows) {
  const auto op = testing::operator_for(testing::hub_toy(), MotifPlan::edges_only());
  EXPECT_THROW(op.apply(DenseMatrix(3, 2)), ValidationError);
}

TEST(Operator, CombineChecksAlignment) {
  const auto g = testing::hub_toy();
  const auto parts = build_participations(g, MotifPlan({2, 3}, {0.5, 0.5}));
  EXPECT_THROW(combine(parts, MotifPlan::edges_only()), ValidationError);
  EXPECT_THROW(combine(parts, MotifPlan({3, 2}, {0.5, 0.5})), ValidationError);
  EXPECT_THROW(combine_from_pool(parts, MotifPlan({4}, {1.0})), ValidationError);
  EXPECT_TRUE(combine_from_pool(parts, MotifPlan({3, 2}, {0.5, 0.5})).reweighted() ==
              combine(parts, MotifPlan({2, 3}, {0.5, 0.5})).reweighted());
}

TEST(Cache, RoundTripAndKeyMismatch) {
  const auto g = testing::erdos_renyi(30, 0.3, 2, true);
  const auto plan = MotifPlan({2, 3}, {0.6, 0.4});
  const auto op = testing::operator_for(g, plan);
  std::stringstream buf;
  save_reweighted_cache(buf, graph_digest(g), plan, op.reweighted());
  const auto bytes = buf.str();

  std::istringstream in(bytes);
  const auto loaded = load_reweighted_cache(in, graph_digest(g), plan);
  ASSERT_TRUE(loaded.has_value());
  EXPECT_TRUE(*loaded == op.reweighted());

  std::istringstream other_plan(bytes);
  EXPECT_FALSE(load_reweighted_cache(other_plan, graph_digest(g), MotifPlan({2, 3}, {0.5, 0.5})));
  std::istringstream other_graph(bytes);
  EXPECT_FALSE(load_reweighted_cache(other_graph, graph_digest(g) + 1, plan));

  std::istringstream garbage("not a cache at all");
  EXPECT_THROW(load_reweighted_cache(garbage, 0, plan), ParseError);
  std::istringstream truncated(bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(load_reweighted_cache(truncated, graph_digest(g), plan), ParseError);
}

}  // namespace
}  // namespace hols
