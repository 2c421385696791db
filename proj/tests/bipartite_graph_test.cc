// Copyright 2026 The backdoor-mip Authors
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

#include "backdoor_mip/bipartite_graph.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "backdoor_mip/backdoor.h"
#include "backdoor_mip/gisp.h"
#include "backdoor_mip/lp_simplex.h"
#include "gtest/gtest.h"

namespace backdoor_mip {
namespace {

struct Fixture {
  MipInstance mip;
  LpSolution lp;
};

Fixture Gisp(uint64_t seed) {
  Fixture f;
  f.mip = *GenerateGisp({8, 0.5, 100.0, 50.0, seed}, "g");
  f.lp = SolveLp(f.mip);
  return f;
}

// A small instance with mixed senses and non-unit data.
Fixture Mixed() {
  Fixture f;
  MipInstance& mip = f.mip;
  mip.id = "m";
  mip.num_vars = 5;
  mip.objective = {3.0, -2.0, 8.0, 1.0, 0.5};
  mip.lower.assign(5, 0.0);
  mip.upper = {4.0, 4.0, 1.0, 1.0, 3.0};
  mip.integer_vars = {0, 1, 2, 3};
  mip.rows.push_back({{{0, 2.0}, {2, 1.0}, {4, -1.0}}, RowSense::kLessEqual, 6.5});
  mip.rows.push_back({{{1, 1.0}, {3, 3.0}}, RowSense::kGreaterEqual, 1.0});
  mip.rows.push_back({{{0, 1.0}, {1, 1.0}, {4, 1.0}}, RowSense::kEqual, 4.0});
  mip.rows.push_back({{{2, -4.0}, {3, 1.0}}, RowSense::kLessEqual, 0.5});
  f.lp = SolveLp(mip);
  return f;
}

TEST(EncodeTest, BackdoorColumn) {
  Fixture f = Gisp(1);
  absl::StatusOr<BipartiteGraph> graph = Encode(f.mip, f.lp, {"g", {4}, 0});
  ASSERT_TRUE(graph.ok());
  for (int i = 0; i < graph->num_vars(); ++i) {
    EXPECT_EQ(graph->var_features(i, kVarBackdoor), i == 4 ? 1.0 : 0.0);
  }
}

TEST(EncodeTest, ShapesAndEdgeCount) {
  for (Fixture f : {Gisp(2), Mixed()}) {
    ASSERT_EQ(f.lp.status, LpStatus::kOptimal);
    BipartiteGraph graph = *Encode(f.mip, f.lp, {f.mip.id, {0}, 0});
    EXPECT_EQ(graph.num_vars(), f.mip.num_vars);
    EXPECT_EQ(graph.num_cons(), f.mip.num_rows());
    EXPECT_EQ(graph.var_features.cols(), 7);
    EXPECT_EQ(graph.cons_features.cols(), 5);
    EXPECT_EQ(static_cast<int64_t>(graph.edges.size()), f.mip.num_nonzeros());
    EXPECT_EQ(graph.feature_schema_version, kFeatureSchemaVersion);
  }
}

TEST(EncodeTest, SenseOneHot) {
  Fixture f = Mixed();
  BipartiteGraph graph = *Encode(f.mip, f.lp, {"m", {1}, 0});
  auto sense = [&](int r) {
    return std::vector<double>{graph.cons_features(r, kConsLessEqual),
                               graph.cons_features(r, kConsGreaterEqual),
                               graph.cons_features(r, kConsEqual)};
  };
  EXPECT_EQ(sense(0), (std::vector<double>{1, 0, 0}));
  EXPECT_EQ(sense(1), (std::vector<double>{0, 1, 0}));
  EXPECT_EQ(sense(2), (std::vector<double>{0, 0, 1}));
}

TEST(EncodeTest, NormalizationAndRanges) {
  Fixture f = Mixed();
  BipartiteGraph graph = *Encode(f.mip, f.lp, {"m", {1}, 0});
  for (int i = 0; i < graph.num_vars(); ++i) {
    EXPECT_DOUBLE_EQ(graph.var_features(i, kVarObjective), f.mip.objective[i] / 8.0);
    EXPECT_DOUBLE_EQ(graph.var_features(i, kVarFractionality), Fractionality(f.lp.x[i]));
    const double one_hot = graph.var_features(i, kVarBasic) + graph.var_features(i, kVarAtLower) +
                           graph.var_features(i, kVarAtUpper);
    EXPECT_EQ(one_hot, 1.0);
  }
  double max_dual = 0.0;
  for (double d : f.lp.duals) max_dual = std::max(max_dual, std::abs(d));
  for (int r = 0; r < graph.num_cons(); ++r) {
    EXPECT_DOUBLE_EQ(graph.cons_features(r, kConsRhs), f.mip.rows[r].rhs / 6.5);
    if (max_dual > 0) {
      EXPECT_DOUBLE_EQ(graph.cons_features(r, kConsDual), f.lp.duals[r] / max_dual);
    }
  }
  for (const GraphEdge& e : graph.edges) EXPECT_LE(std::abs(e.coef), 1.0);
  for (double v : graph.var_features.values()) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_LE(std::abs(v), 1.0);
  }
  for (double v : graph.cons_features.values()) EXPECT_LE(std::abs(v), 1.0);
}

TEST(EncodeTest, ZeroQuantitiesNormalizeByOne) {
  Fixture f = Gisp(3);
  MipInstance zero = f.mip;
  std::fill(zero.objective.begin(), zero.objective.end(), 0.0);
  LpSolution lp = SolveLp(zero);
  BipartiteGraph graph = *Encode(zero, lp, {"g", {0}, 0});
  for (int i = 0; i < graph.num_vars(); ++i) EXPECT_EQ(graph.var_features(i, kVarObjective), 0.0);
  for (int r = 0; r < graph.num_cons(); ++r) EXPECT_EQ(graph.cons_features(r, kConsDual), 0.0);
}

TEST(EncodeTest, Deterministic) {
  Fixture f = Gisp(4);
  EXPECT_EQ(*Encode(f.mip, f.lp, {"g", {2}, 0}), *Encode(f.mip, f.lp, {"g", {2}, 0}));
}

TEST(EncodeTest, PermutationGivesIsomorphicGraph) {
  Fixture f = Mixed();
  const std::vector<int> perm = {3, 0, 4, 1, 2};  // new index of old var j
  MipInstance permuted = f.mip;
  LpSolution lp = f.lp;
  for (int j = 0; j < 5; ++j) {
    permuted.objective[perm[j]] = f.mip.objective[j];
    permuted.lower[perm[j]] = f.mip.lower[j];
    permuted.upper[perm[j]] = f.mip.upper[j];
    lp.x[perm[j]] = f.lp.x[j];
    lp.basis[perm[j]] = f.lp.basis[j];
  }
  permuted.integer_vars.clear();
  for (int j : f.mip.integer_vars) permuted.integer_vars.push_back(perm[j]);
  std::sort(permuted.integer_vars.begin(), permuted.integer_vars.end());
  for (LinearRow& row : permuted.rows) {
    for (Coefficient& c : row.coeffs) c.var = perm[c.var];
  }
  BipartiteGraph a = *Encode(f.mip, f.lp, {"m", {1}, 0});
  BipartiteGraph b = *Encode(permuted, lp, {"m", {perm[1]}, 0});
  for (int j = 0; j < 5; ++j) {
    for (int c = 0; c < kNumVarFeatures; ++c) {
      EXPECT_EQ(a.var_features(j, c), b.var_features(perm[j], c));
    }
  }
  EXPECT_EQ(a.cons_features, b.cons_features);
  ASSERT_EQ(a.edges.size(), b.edges.size());
  for (size_t e = 0; e < a.edges.size(); ++e) {
    EXPECT_EQ(perm[a.edges[e].var], b.edges[e].var);
    EXPECT_EQ(a.edges[e].cons, b.edges[e].cons);
    EXPECT_EQ(a.edges[e].coef, b.edges[e].coef);
  }
}

TEST(EncodeTest, Errors) {
  Fixture f = Gisp(5);
  EXPECT_EQ(Encode(f.mip, f.lp, {"other", {0}, 0}).status().code(),
            absl::StatusCode::kInvalidArgument);
  LpSolution bad = f.lp;
  bad.status = LpStatus::kInfeasible;
  EXPECT_EQ(Encode(f.mip, bad, {"g", {0}, 0}).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_FALSE(Encode(f.mip, f.lp, {"g", {f.mip.num_vars}, 0}).ok());
}

TEST(EncodeTest, SetBackdoorFlagsReplacesColumn) {
  Fixture f = Gisp(6);
  BipartiteGraph graph = *Encode(f.mip, f.lp, {"g", {0, 1}, 0});
  SetBackdoorFlags(graph, std::vector<int>{3});
  EXPECT_EQ(graph, *Encode(f.mip, f.lp, {"g", {3}, 0}));
}

TEST(EncodeTest, JsonDump) {
  Fixture f = Gisp(7);
  const std::string json = GraphToJson(*Encode(f.mip, f.lp, {"g", {0}, 0}));
  EXPECT_NE(json.find("\"var_features\""), std::string::npos);
  EXPECT_NE(json.find("\"edges\""), std::string::npos);
}

}  // namespace
}  // namespace backdoor_mip
