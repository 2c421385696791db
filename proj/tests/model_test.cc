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

#include "backdoor_mip/model.h"

#include <cmath>

#include "backdoor_mip/losses.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_graphs.h"

namespace backdoor_mip {
namespace {

using ::testing::HasSubstr;
using testing_util::CheckGradients;
using testing_util::PermuteGraph;
using testing_util::RandomGraph;
using testing_util::RandomParams;
using testing_util::TensorCheck;

// One head of width one: z = W h with W = [[1]].
struct TinyGat {
  Hyperparams hyper{.hidden = 1, .heads = 1, .rounds = 1};
  GatParams layer;

  explicit TinyGat(double a_src, double a_dst, double a_edge) {
    layer.weight = Matrix(1, 1, 1.0);
    layer.attention = Matrix(1, 3);
    layer.attention(0, 0) = a_src;
    layer.attention(0, 1) = a_dst;
    layer.attention(0, 2) = a_edge;
    layer.project_weight = Matrix(1, 1, 1.0);
    layer.project_bias = Matrix(1, 1);
    layer.self_weight = Matrix(1, 1);
  }

  // Sources feed destination 0 through edges 0..k-1.
  std::vector<double> Alpha(const std::vector<double>& sources, double dst_value,
                            const std::vector<double>& coefs, Matrix* out = nullptr) {
    Matrix src(static_cast<int>(sources.size()), 1);
    for (size_t i = 0; i < sources.size(); ++i) src(static_cast<int>(i), 0) = sources[i];
    Matrix dst(1, 1, dst_value);
    std::vector<int> edge_src(sources.size());
    std::vector<int> edge_dst(sources.size(), 0);
    std::vector<int> dst_edges(sources.size());
    for (size_t e = 0; e < sources.size(); ++e) edge_src[e] = dst_edges[e] = static_cast<int>(e);
    std::vector<int> offsets = {0, static_cast<int>(sources.size())};
    GatCache cache;
    Matrix result;
    GatForward(layer, hyper, src, dst, edge_src, edge_dst, coefs, offsets, dst_edges, cache, result);
    if (out != nullptr) *out = result;
    return cache.alpha;
  }
};

TEST(GatLayerTest, SingleEdgeHasUnitWeight) {
  for (double a : {-3.0, 0.0, 5.0}) {
    TinyGat gat(a, 2 * a, -a);
    EXPECT_EQ(gat.Alpha({0.7}, -1.3, {0.4}), std::vector<double>{1.0});
  }
}

TEST(GatLayerTest, SymmetricEdgesSplitEvenly) {
  TinyGat gat(1.3, -0.4, 2.0);
  EXPECT_EQ(gat.Alpha({0.9, 0.9}, 0.2, {0.5, 0.5}), (std::vector<double>{0.5, 0.5}));
}

TEST(GatLayerTest, ShiftingAllLogitsLeavesWeightsUnchanged) {
  // a = [1, 1, 0] keeps every raw logit positive, so raising the destination
  // state by 10 adds exactly 10 to each logit.
  TinyGat gat(1.0, 1.0, 0.0);
  std::vector<double> base = gat.Alpha({1.0, 2.0, 3.0}, 1.0, {0, 0, 0});
  std::vector<double> shifted = gat.Alpha({1.0, 2.0, 3.0}, 11.0, {0, 0, 0});
  ASSERT_EQ(base.size(), 3u);
  for (int e = 0; e < 3; ++e) EXPECT_NEAR(base[e], shifted[e], 1e-15);
}

TEST(GatLayerTest, LeakyLogitsAndOutputByHand) {
  TinyGat gat(1.0, 0.0, 1.0);
  // Raw logits -1 and 2 become -0.2 and 2 after LeakyReLU(0.2).
  Matrix out;
  std::vector<double> alpha = gat.Alpha({-0.5, 1.5}, 0.0, {-0.5, 0.5}, &out);
  const double w0 = std::exp(-0.2), w1 = std::exp(2.0);
  EXPECT_NEAR(alpha[0], w0 / (w0 + w1), 1e-15);
  EXPECT_NEAR(alpha[1], w1 / (w0 + w1), 1e-15);
  const double aggregate = alpha[0] * -0.5 + alpha[1] * 1.5;
  EXPECT_NEAR(out(0, 0), aggregate, 1e-15);  // ELU is the identity above zero
}

TEST(GatLayerTest, IsolatedDestinationUsesSelfTransform) {
  TinyGat gat(1.0, 1.0, 1.0);
  gat.layer.self_weight(0, 0) = 3.0;
  gat.layer.project_bias(0, 0) = 0.25;
  Matrix src(1, 1, 9.0);
  Matrix dst(2, 1);
  dst(0, 0) = 1.0;
  dst(1, 0) = -2.0;
  std::vector<int> edge_src = {0}, edge_dst = {0}, dst_edges = {0};
  std::vector<double> coef = {1.0};
  std::vector<int> offsets = {0, 1, 1};
  GatCache cache;
  Matrix out;
  GatForward(gat.layer, gat.hyper, src, dst, edge_src, edge_dst, coef, offsets, dst_edges, cache, out);
  EXPECT_DOUBLE_EQ(out(1, 0), 0.25 + 3.0 * -2.0);
  EXPECT_DOUBLE_EQ(out(0, 0), 9.0 + 0.25 + 3.0);
}

TEST(AttentionPoolTest, SingleNodeWithZeroGate) {
  ModelParams params = RandomParams(Hyperparams{.hidden = 3}, 5);
  params.gate_weight.Fill(0.0);
  params.gate_bias.Fill(0.0);
  Matrix node(1, 3);
  node(0, 0) = 0.3;
  node(0, 1) = -1.0;
  node(0, 2) = 2.0;
  std::vector<double> pooled = *AttentionPool(params, node);
  for (int c = 0; c < 3; ++c) {
    double t = params.transform_bias(0, c);
    for (int a = 0; a < 3; ++a) t += node(0, a) * params.transform_weight(a, c);
    EXPECT_NEAR(pooled[c], 0.5 * std::tanh(t), 1e-15);
  }
}

TEST(AttentionPoolTest, ZeroStatesAndBiasesGiveZero) {
  ModelParams params = InitParams(Hyperparams{}, 3);
  params.transform_bias.Fill(0.0);
  std::vector<double> pooled = *AttentionPool(params, Matrix(6, 32));
  EXPECT_EQ(pooled, std::vector<double>(32, 0.0));
}

TEST(AttentionPoolTest, NodeOrderDoesNotMatter) {
  ModelParams params = RandomParams(Hyperparams{}, 8);
  Rng rng(1);
  Matrix nodes(9, 32);
  for (double& v : nodes.values()) v = rng.Normal();
  Matrix reversed(9, 32);
  for (int r = 0; r < 9; ++r) {
    for (int c = 0; c < 32; ++c) reversed(8 - r, c) = nodes(r, c);
  }
  std::vector<double> a = *AttentionPool(params, nodes);
  std::vector<double> b = *AttentionPool(params, reversed);
  for (int c = 0; c < 32; ++c) EXPECT_NEAR(a[c], b[c], 1e-12);
}

TEST(AttentionPoolTest, EmptyGraphIsAnError) {
  EXPECT_EQ(AttentionPool(InitParams(Hyperparams{}, 1), Matrix(0, 32)).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(ForwardTest, PermutationInvariant) {
  Rng rng(21);
  ModelParams params = RandomParams(Hyperparams{}, 4);
  for (int trial = 0; trial < 10; ++trial) {
    BipartiteGraph graph = RandomGraph(rng, 3 + static_cast<int>(rng.Below(8)),
                                       2 + static_cast<int>(rng.Below(6)), trial % 2 == 0);
    BipartiteGraph permuted = PermuteGraph(graph, rng);
    EXPECT_NEAR(*Score(params, graph), *Score(params, permuted), 1e-9);
  }
}

TEST(ForwardTest, ZeroParamsReturnOutputBias) {
  Rng rng(2);
  ModelParams params = ZeroParams(Hyperparams{});
  params.out_bias(0, 0) = 0.375;
  EXPECT_EQ(*Score(params, RandomGraph(rng, 5, 4)), 0.375);
}

TEST(ForwardTest, RepeatableBitForBit) {
  Rng rng(3);
  ModelParams params = RandomParams(Hyperparams{}, 6);
  BipartiteGraph graph = RandomGraph(rng, 12, 7);
  const double first = *Score(params, graph);
  for (int k = 0; k < 5; ++k) EXPECT_EQ(*Score(params, graph), first);
}

TEST(ForwardTest, SchemaMismatch) {
  Rng rng(4);
  BipartiteGraph graph = RandomGraph(rng, 4, 3);
  graph.feature_schema_version = kFeatureSchemaVersion + 1;
  EXPECT_EQ(Score(InitParams(Hyperparams{}, 1), graph).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(BackwardTest, MatchesCentralDifferencesOnEveryTensor) {
  Rng rng(77);
  const Hyperparams small{.hidden = 4, .heads = 2, .rounds = 2};
  for (int trial = 0; trial < 4; ++trial) {
    ModelParams params = RandomParams(small, 100 + trial);
    BipartiteGraph graph = RandomGraph(rng, 3, 2, /*allow_isolated=*/trial == 3);
    for (const TensorCheck& check : CheckGradients(params, graph, 1e-4, 0, rng)) {
      EXPECT_LT(check.relative_error, 1e-4) << check.name << " trial " << trial;
    }
  }
}

TEST(BackwardTest, DefaultSizeSampledEntries) {
  Rng rng(78);
  ModelParams params = RandomParams(Hyperparams{}, 7);
  BipartiteGraph graph = RandomGraph(rng, 6, 4);
  for (const TensorCheck& check : CheckGradients(params, graph, 1e-4, 12, rng)) {
    EXPECT_LT(check.relative_error, 1e-4) << check.name;
  }
}

TEST(BackwardTest, AccumulatesScaledGradient) {
  Rng rng(5);
  ModelParams params = RandomParams(Hyperparams{.hidden = 4, .heads = 2}, 9);
  PreparedGraph graph = Prepare(RandomGraph(rng, 5, 3));
  ForwardCache cache;
  Forward(params, graph, cache);
  ModelParams once = ZeroParams(params.hyper);
  Backward(params, graph, cache, 1.0, once);
  ModelParams scaled = ZeroParams(params.hyper);
  Backward(params, graph, cache, -2.0, scaled);
  AddScaled(scaled, once, 2.0);
  for (const auto& [name, tensor] : scaled.Tensors()) {
    for (double v : tensor->values()) EXPECT_NEAR(v, 0.0, 1e-12) << name;
  }
}

TEST(ModelFileTest, RoundTripIsExact) {
  ModelParams params = RandomParams(Hyperparams{.hidden = 8, .heads = 2, .rounds = 1}, 12);
  absl::StatusOr<ModelParams> read = ReadModel(WriteModel(params));
  ASSERT_TRUE(read.ok()) << read.status();
  EXPECT_EQ(*read, params);
  EXPECT_EQ(WriteModel(*read), WriteModel(params));
}

TEST(ModelFileTest, VersionAndSchemaChecks) {
  std::string text = WriteModel(InitParams(Hyperparams{.hidden = 2, .heads = 1, .rounds = 1}, 1));
  std::string wrong_version = text;
  wrong_version.replace(wrong_version.find("\"schema_version\":1"), 18, "\"schema_version\":2");
  absl::StatusOr<ModelParams> read = ReadModel(wrong_version);
  EXPECT_EQ(read.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_THAT(std::string(read.status().message()), HasSubstr("version"));

  std::string wrong_schema = text;
  wrong_schema.replace(wrong_schema.find("\"feature_schema_version\":1"), 26,
                       "\"feature_schema_version\":7");
  EXPECT_EQ(ReadModel(wrong_schema).status().code(), absl::StatusCode::kFailedPrecondition);

  EXPECT_EQ(ReadModel("[1, 2]").status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(ReadModel(text.substr(0, text.size() / 2)).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(InitParamsTest, SeededAndBounded) {
  EXPECT_EQ(InitParams(Hyperparams{}, 5), InitParams(Hyperparams{}, 5));
  EXPECT_NE(InitParams(Hyperparams{}, 5), InitParams(Hyperparams{}, 6));
  ModelParams params = InitParams(Hyperparams{}, 5);
  const double limit = std::sqrt(6.0 / (7 + 32));
  for (double v : params.embed_var_weight.values()) EXPECT_LE(std::abs(v), limit);
}

}  // namespace
}  // namespace backdoor_mip
