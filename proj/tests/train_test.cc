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

#include "backdoor_mip/train.h"

#include <omp.h>

#include <cmath>
#include <limits>

#include "backdoor_mip/losses.h"
#include "gtest/gtest.h"
#include "test_graphs.h"

namespace backdoor_mip {
namespace {

using testing_util::RandomGraph;
using testing_util::RandomParams;

const Hyperparams kSmall{.hidden = 8, .heads = 2, .rounds = 2};

std::vector<PreparedGraph> Graphs(int count, uint64_t seed) {
  Rng rng(seed);
  std::vector<PreparedGraph> graphs;
  for (int g = 0; g < count; ++g) {
    graphs.push_back(Prepare(RandomGraph(rng, 4 + static_cast<int>(rng.Below(6)),
                                         3 + static_cast<int>(rng.Below(4)))));
  }
  return graphs;
}

std::vector<const PreparedGraph*> Pointers(const std::vector<PreparedGraph>& graphs) {
  std::vector<const PreparedGraph*> out;
  for (const PreparedGraph& g : graphs) out.push_back(&g);
  return out;
}

RankingDataset SmallRanking() {
  RankingDataset data;
  data.graphs = Graphs(8, 11);
  // A fixed target order: graph g is "faster" than graph g + 1.
  for (int g = 0; g < 8; ++g) {
    for (int k = g + 1; k < 8; ++k) data.pairs.push_back({g, k, -1, g / 4});
  }
  return data;
}

TEST(BatchGradientTest, ParallelMatchesSerialBitForBit) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  std::vector<PreparedGraph> graphs = Graphs(9, 2);
  ModelParams params = RandomParams(kSmall, 3);
  LossSpec ranking;
  for (int g = 0; g + 1 < 9; ++g) ranking.pairs.push_back({g, g + 1, g % 2 == 0 ? 1 : -1, 0});
  LossSpec bce;
  bce.kind = LossSpec::Kind::kBinaryCrossEntropy;
  for (int g = 0; g < 9; ++g) bce.labels.push_back(g % 3 == 0 ? 1.0 : 0.0);
  for (const LossSpec* loss : {&ranking, &bce}) {
    absl::StatusOr<BatchGradient> parallel =
        ComputeBatchGradient(params, Pointers(graphs), *loss, Execution::kParallel);
    absl::StatusOr<BatchGradient> serial =
        ComputeBatchGradient(params, Pointers(graphs), *loss, Execution::kSerial);
    ASSERT_TRUE(parallel.ok() && serial.ok());
    EXPECT_EQ(parallel->loss, serial->loss);
    EXPECT_EQ(parallel->outputs, serial->outputs);
    EXPECT_EQ(parallel->grads, serial->grads);
  }
  omp_set_num_threads(saved);
}

TEST(BatchGradientTest, MatchesFiniteDifferencesOfTheBatchLoss) {
  std::vector<PreparedGraph> graphs = Graphs(3, 4);
  ModelParams params = RandomParams(Hyperparams{.hidden = 4, .heads = 2, .rounds = 1}, 5);
  LossSpec bce;
  bce.kind = LossSpec::Kind::kBinaryCrossEntropy;
  bce.labels = {1.0, 0.0, 1.0};
  BatchGradient base = *ComputeBatchGradient(params, Pointers(graphs), bce);
  auto batch_loss = [&](const ModelParams& p) {
    double total = 0.0;
    for (const PreparedGraph& g : graphs) {
      ForwardCache cache;
      total += BceWithLogits(Forward(p, g, cache), bce.labels[&g - graphs.data()]);
    }
    return total / 3.0;
  };
  EXPECT_NEAR(base.loss, batch_loss(params), 1e-14);
  ModelParams probe = params;
  auto probe_tensors = probe.Tensors();
  auto grad_tensors = base.grads.Tensors();
  for (size_t t = 0; t < probe_tensors.size(); ++t) {
    std::vector<double>& values = probe_tensors[t].second->values();
    for (size_t i = 0; i < values.size(); i += 3) {
      const double saved = values[i];
      values[i] = saved + 1e-5;
      const double plus = batch_loss(probe);
      values[i] = saved - 1e-5;
      const double minus = batch_loss(probe);
      values[i] = saved;
      const double numeric = (plus - minus) / 2e-5;
      const double analytic = grad_tensors[t].second->values()[i];
      EXPECT_NEAR(analytic, numeric, 1e-6 * std::max(1.0, std::abs(numeric)))
          << probe_tensors[t].first << "[" << i << "]";
    }
  }
}

TEST(BatchGradientTest, SatisfiedMarginGivesZeroGradient) {
  std::vector<PreparedGraph> graphs = Graphs(2, 6);
  ModelParams params = RandomParams(kSmall, 7);
  const std::vector<double> scores = ScoreAll(params, graphs);
  LossSpec loss;
  loss.margin = 0.1;
  // Label the pair so that the hinge is inactive by a wide gap.
  ASSERT_GT(std::abs(scores[0] - scores[1]), 0.0);
  loss.pairs.push_back({0, 1, scores[0] > scores[1] ? 1 : -1, 0});
  loss.margin = std::abs(scores[0] - scores[1]) / 2;
  BatchGradient result = *ComputeBatchGradient(params, Pointers(graphs), loss);
  EXPECT_EQ(result.loss, 0.0);
  EXPECT_EQ(result.grads, ZeroParams(kSmall));
}

TEST(BatchGradientTest, NonFiniteOutputAborts) {
  std::vector<PreparedGraph> graphs = Graphs(2, 8);
  ModelParams params = RandomParams(kSmall, 9);
  params.out_bias(0, 0) = std::numeric_limits<double>::quiet_NaN();
  LossSpec loss;
  loss.pairs.push_back({0, 1, 1, 0});
  absl::StatusOr<BatchGradient> result = ComputeBatchGradient(params, Pointers(graphs), loss);
  EXPECT_EQ(result.status().code(), absl::StatusCode::kInternal);
  EXPECT_NE(result.status().message().find("non-finite"), std::string::npos);
}

TEST(BatchGradientTest, SchemaMismatchAndBadIndices) {
  std::vector<PreparedGraph> graphs = Graphs(2, 10);
  ModelParams params = RandomParams(kSmall, 1);
  LossSpec loss;
  loss.pairs.push_back({0, 2, 1, 0});
  EXPECT_EQ(ComputeBatchGradient(params, Pointers(graphs), loss).status().code(),
            absl::StatusCode::kInvalidArgument);
  graphs[1].graph.feature_schema_version = kFeatureSchemaVersion + 1;
  loss.pairs = {{0, 1, 1, 0}};
  EXPECT_EQ(ComputeBatchGradient(params, Pointers(graphs), loss).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(AdamTest, FirstStepMovesEachParameterByTheLearningRate) {
  ModelParams params = ZeroParams(Hyperparams{.hidden = 2, .heads = 1, .rounds = 1});
  ModelParams grads = params;
  grads.out_bias(0, 0) = 3.0;
  grads.out_weight(0, 0) = -0.01;
  AdamOptimizer adam(params, 0.1, AdamConfig{});
  adam.Step(params, grads);
  EXPECT_NEAR(params.out_bias(0, 0), -0.1, 1e-9);
  EXPECT_NEAR(params.out_weight(0, 0), 0.1, 1e-6);
  EXPECT_EQ(params.out_weight(1, 0), 0.0);
}

TEST(ClipGradientNormTest, RescalesOnlyAboveTheLimit) {
  ModelParams grads = ZeroParams(Hyperparams{.hidden = 2, .heads = 1, .rounds = 1});
  grads.out_bias(0, 0) = 3.0;
  grads.out_weight(1, 0) = -4.0;
  EXPECT_DOUBLE_EQ(ClipGradientNorm(grads, 10.0), 5.0);
  EXPECT_EQ(grads.out_bias(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(ClipGradientNorm(grads, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(grads.out_bias(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(grads.out_weight(1, 0), -0.8);
  EXPECT_EQ(grads.out_weight(0, 0), 0.0);
  grads.out_bias(0, 0) = 30.0;
  EXPECT_DOUBLE_EQ(ClipGradientNorm(grads, 0.0), std::hypot(30.0, 0.8));
  EXPECT_EQ(grads.out_bias(0, 0), 30.0);
}

TEST(TrainScorerTest, SameSeedSameParameters) {
  RankingDataset data = SmallRanking();
  TrainConfig config;
  config.hyper = kSmall;
  config.epochs = 3;
  config.batch_size = 5;
  config.seed = 42;
  TrainResult a = *TrainScorer(data, config);
  TrainResult b = *TrainScorer(data, config);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.loss_history, b.loss_history);
  EXPECT_EQ(a.loss_history.size(), 3u);
  config.seed = 43;
  EXPECT_NE(TrainScorer(data, config)->params, a.params);
}

TEST(TrainScorerTest, FitsASmallOrder) {
  RankingDataset data = SmallRanking();
  TrainConfig config;
  config.hyper = kSmall;
  config.epochs = 150;
  config.learning_rate = 3e-3;
  config.seed = 1;
  TrainResult result = *TrainScorer(data, config);
  EXPECT_LT(result.loss_history.back(), result.loss_history.front());
  EXPECT_EQ(PairwiseAccuracy(result.params, data), 1.0);
}

TEST(TrainScorerTest, Errors) {
  RankingDataset empty;
  EXPECT_FALSE(TrainScorer(empty, TrainConfig{}).ok());
  RankingDataset data = SmallRanking();
  data.graphs[3].graph.feature_schema_version = 99;
  EXPECT_EQ(TrainScorer(data, TrainConfig{.hyper = kSmall, .epochs = 1}).status().code(),
            absl::StatusCode::kFailedPrecondition);
  data = SmallRanking();
  EXPECT_EQ(TrainScorer(data, TrainConfig{.hyper = kSmall, .epochs = 1, .max_grad_norm = -1.0})
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(TrainClassifierTest, FitsSmallLabelsDeterministically) {
  ClassificationDataset data;
  data.graphs = Graphs(10, 12);
  for (int g = 0; g < 10; ++g) data.labels.push_back(g % 2);
  TrainConfig config;
  config.hyper = kSmall;
  config.epochs = 150;
  config.learning_rate = 3e-3;
  config.batch_size = 10;
  config.seed = 2;
  TrainResult a = *TrainClassifier(data, config);
  EXPECT_EQ(ClassificationAccuracy(a.params, data), 1.0);
  EXPECT_EQ(TrainClassifier(data, config)->params, a.params);
}

TEST(AccuracyTest, CountsStrictlyOrderedPairs) {
  RankingDataset data;
  data.graphs = Graphs(3, 13);
  ModelParams params = RandomParams(kSmall, 14);
  const std::vector<double> s = ScoreAll(params, data.graphs);
  data.pairs = {{0, 1, s[0] > s[1] ? 1 : -1, 0}, {1, 2, s[1] > s[2] ? -1 : 1, 0}, {0, 0, 1, 0}};
  EXPECT_DOUBLE_EQ(PairwiseAccuracy(params, data), 1.0 / 3.0);
}

}  // namespace
}  // namespace backdoor_mip
