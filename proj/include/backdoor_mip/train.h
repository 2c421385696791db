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

#ifndef BACKDOOR_MIP_TRAIN_H_
#define BACKDOOR_MIP_TRAIN_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "backdoor_mip/model.h"

namespace backdoor_mip {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  Hyperparams hyper;
  double margin = 0.1;
  double learning_rate = 1e-3;
  int epochs = 50;
  int batch_size = 32;
  uint64_t seed = 0;
  // Gradients whose global L2 norm exceeds this are rescaled to it before the
  // optimizer step; 0 disables clipping.
  double max_grad_norm = 1.0;
  AdamConfig adam;
};

// Rescales `grads` in place so their global L2 norm is at most `max_norm`
// (no-op when max_norm <= 0). Returns the norm before rescaling.
double ClipGradientNorm(ModelParams& grads, double max_norm);

class AdamOptimizer {
 public:
  AdamOptimizer(const ModelParams& like, double learning_rate, const AdamConfig& config);

  void Step(ModelParams& params, const ModelParams& grads);

 private:
  double learning_rate_;
  AdamConfig config_;
  ModelParams first_moment_;
  ModelParams second_moment_;
  int64_t step_ = 0;
};

// Indices refer to the owning dataset's graph list.
struct GraphPair {
  int first = 0;
  int second = 0;
  // -1 when `first` is faster.
  int label = 1;
  // Pairs sharing a group (instance) are batched together.
  int group = 0;
};

struct RankingDataset {
  std::vector<PreparedGraph> graphs;
  std::vector<GraphPair> pairs;
};

struct ClassificationDataset {
  std::vector<PreparedGraph> graphs;
  std::vector<int> labels;
};

// Loss over the outputs of a batch of graphs; indices refer to the batch.
struct LossSpec {
  enum class Kind { kMarginRanking, kBinaryCrossEntropy };
  Kind kind = Kind::kMarginRanking;
  double margin = 0.1;
  std::vector<GraphPair> pairs;   // kMarginRanking
  std::vector<double> labels;     // kBinaryCrossEntropy, one per graph
};

enum class Execution { kParallel, kSerial };

struct BatchGradient {
  // Mean over loss terms.
  double loss = 0.0;
  std::vector<double> outputs;
  ModelParams grads;
};

// Forward and backward over every graph of the batch. kParallel spreads
// graphs across OpenMP threads; per-graph gradients are then summed in batch
// order, so both modes give bit-identical results. Fails on a non-finite loss
// or a feature schema mismatch.
absl::StatusOr<BatchGradient> ComputeBatchGradient(const ModelParams& params,
                                                   std::span<const PreparedGraph* const> batch,
                                                   const LossSpec& loss,
                                                   Execution execution = Execution::kParallel);

std::vector<double> ScoreAll(const ModelParams& params, std::span<const PreparedGraph> graphs);

struct TrainResult {
  ModelParams params;
  // Mean training loss per epoch, measured before each step's update.
  std::vector<double> loss_history;
};

// Margin ranking training. Minibatches hold up to batch_size pairs from one
// group.
absl::StatusOr<TrainResult> TrainScorer(const RankingDataset& data, const TrainConfig& config);

absl::StatusOr<TrainResult> TrainClassifier(const ClassificationDataset& data,
                                            const TrainConfig& config);

// Fraction of pairs ordered as labeled: y * (s1 - s2) > 0.
double PairwiseAccuracy(const ModelParams& params, const RankingDataset& data);

// Fraction with (sigmoid(logit) > 0.5) == label.
double ClassificationAccuracy(const ModelParams& params, const ClassificationDataset& data);

}  // namespace backdoor_mip

#endif  // BACKDOOR_MIP_TRAIN_H_
