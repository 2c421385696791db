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

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "backdoor_mip/losses.h"
#include "backdoor_mip/random.h"

namespace backdoor_mip {
namespace {

absl::Status CheckSchema(const ModelParams& params, const PreparedGraph& graph) {
  if (graph.graph.feature_schema_version != params.feature_schema_version) {
    return absl::FailedPreconditionError(
        absl::StrCat("graph feature schema ", graph.graph.feature_schema_version,
                     " does not match model schema ", params.feature_schema_version));
  }
  return absl::OkStatus();
}

template <typename Body>
void ForEachGraph(int count, Execution execution, Body body) {
  if (execution == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (int g = 0; g < count; ++g) body(g);
  } else {
    for (int g = 0; g < count; ++g) body(g);
  }
}

template <typename T>
void Shuffle(std::vector<T>& items, Rng& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng.Below(i)]);
  }
}

}  // namespace

double ClipGradientNorm(ModelParams& grads, double max_norm) {
  double squared = 0.0;
  for (auto& [name, tensor] : grads.Tensors()) {
    for (double v : tensor->values()) squared += v * v;
  }
  const double norm = std::sqrt(squared);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& [name, tensor] : grads.Tensors()) {
      for (double& v : tensor->values()) v *= scale;
    }
  }
  return norm;
}

AdamOptimizer::AdamOptimizer(const ModelParams& like, double learning_rate,
                             const AdamConfig& config)
    : learning_rate_(learning_rate),
      config_(config),
      first_moment_(ZeroParams(like.hyper)),
      second_moment_(ZeroParams(like.hyper)) {}

void AdamOptimizer::Step(ModelParams& params, const ModelParams& grads) {
  ++step_;
  const double correction1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  auto p = params.Tensors();
  auto g = grads.Tensors();
  auto m = first_moment_.Tensors();
  auto v = second_moment_.Tensors();
  for (size_t t = 0; t < p.size(); ++t) {
    std::vector<double>& values = p[t].second->values();
    const std::vector<double>& grad = g[t].second->values();
    std::vector<double>& m1 = m[t].second->values();
    std::vector<double>& m2 = v[t].second->values();
    for (size_t i = 0; i < values.size(); ++i) {
      m1[i] = config_.beta1 * m1[i] + (1.0 - config_.beta1) * grad[i];
      m2[i] = config_.beta2 * m2[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
      const double m_hat = m1[i] / correction1;
      const double v_hat = m2[i] / correction2;
      values[i] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

absl::StatusOr<BatchGradient> ComputeBatchGradient(const ModelParams& params,
                                                   std::span<const PreparedGraph* const> batch,
                                                   const LossSpec& loss, Execution execution) {
  const int count = static_cast<int>(batch.size());
  for (const PreparedGraph* graph : batch) {
    if (absl::Status status = CheckSchema(params, *graph); !status.ok()) return status;
  }

  BatchGradient result;
  result.outputs.assign(count, 0.0);
  std::vector<ForwardCache> caches(count);
  ForEachGraph(count, execution, [&](int g) {
    result.outputs[g] = Forward(params, *batch[g], caches[g]);
  });
  for (int g = 0; g < count; ++g) {
    if (!std::isfinite(result.outputs[g])) {
      return absl::InternalError(
          absl::StrCat("non-finite network output ", result.outputs[g], " for batch graph ", g));
    }
  }

  std::vector<double> upstream(count, 0.0);
  double total = 0.0;
  size_t terms = 0;
  if (loss.kind == LossSpec::Kind::kMarginRanking) {
    for (const GraphPair& pair : loss.pairs) {
      if (pair.first < 0 || pair.first >= count || pair.second < 0 || pair.second >= count) {
        return absl::InvalidArgumentError("ranking pair refers outside the batch");
      }
      const PairLossGrad term = MarginRankingLossGrad(result.outputs[pair.first],
                                                      result.outputs[pair.second], pair.label,
                                                      loss.margin);
      total += term.loss;
      upstream[pair.first] += term.d_first;
      upstream[pair.second] += term.d_second;
    }
    terms = loss.pairs.size();
  } else {
    if (static_cast<int>(loss.labels.size()) != count) {
      return absl::InvalidArgumentError("classification batch needs one label per graph");
    }
    for (int g = 0; g < count; ++g) {
      total += BceWithLogits(result.outputs[g], loss.labels[g]);
      upstream[g] = BceWithLogitsGrad(result.outputs[g], loss.labels[g]);
    }
    terms = static_cast<size_t>(count);
  }
  if (terms == 0) return absl::InvalidArgumentError("empty loss");
  result.loss = total / static_cast<double>(terms);
  if (!std::isfinite(result.loss)) {
    return absl::InternalError(absl::StrCat("non-finite batch loss ", result.loss, " over ",
                                            terms, " terms"));
  }
  for (double& u : upstream) u /= static_cast<double>(terms);

  std::vector<ModelParams> per_graph(count);
  ForEachGraph(count, execution, [&](int g) {
    if (upstream[g] == 0.0) return;
    per_graph[g] = ZeroParams(params.hyper);
    Backward(params, *batch[g], caches[g], upstream[g], per_graph[g]);
  });
  result.grads = ZeroParams(params.hyper);
  for (int g = 0; g < count; ++g) {
    if (upstream[g] != 0.0) AddScaled(result.grads, per_graph[g], 1.0);
  }
  return result;
}

std::vector<double> ScoreAll(const ModelParams& params, std::span<const PreparedGraph> graphs) {
  const int count = static_cast<int>(graphs.size());
  std::vector<double> scores(count);
  ForEachGraph(count, Execution::kParallel, [&](int g) {
    ForwardCache cache;
    scores[g] = Forward(params, graphs[g], cache);
  });
  return scores;
}

absl::StatusOr<TrainResult> TrainScorer(const RankingDataset& data, const TrainConfig& config) {
  if (data.pairs.empty()) return absl::InvalidArgumentError("ranking dataset has no pairs");
  if (!(config.margin > 0.0)) return absl::InvalidArgumentError("margin must be positive");
  if (config.batch_size < 1) return absl::InvalidArgumentError("batch_size must be >= 1");
  if (!(config.max_grad_norm >= 0.0)) {
    return absl::InvalidArgumentError("max_grad_norm must be >= 0");
  }
  const int num_graphs = static_cast<int>(data.graphs.size());
  for (const GraphPair& pair : data.pairs) {
    if (pair.first < 0 || pair.first >= num_graphs || pair.second < 0 ||
        pair.second >= num_graphs || (pair.label != 1 && pair.label != -1)) {
      return absl::InvalidArgumentError("ranking pair is malformed");
    }
  }

  TrainResult result;
  result.params = InitParams(config.hyper, DeriveSeed(config.seed, 0));
  for (const PreparedGraph& graph : data.graphs) {
    if (absl::Status status = CheckSchema(result.params, graph); !status.ok()) return status;
  }
  AdamOptimizer optimizer(result.params, config.learning_rate, config.adam);
  Rng rng(DeriveSeed(config.seed, 1));

  std::map<int, std::vector<int>> by_group;
  for (int p = 0; p < static_cast<int>(data.pairs.size()); ++p) {
    by_group[data.pairs[p].group].push_back(p);
  }

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<std::vector<int>> batches;
    for (auto& [group, ids] : by_group) {
      std::vector<int> order = ids;
      Shuffle(order, rng);
      for (size_t start = 0; start < order.size(); start += config.batch_size) {
        const size_t stop = std::min(order.size(), start + config.batch_size);
        batches.emplace_back(order.begin() + start, order.begin() + stop);
      }
    }
    Shuffle(batches, rng);

    double epoch_loss = 0.0;
    for (const std::vector<int>& batch_pairs : batches) {
      std::vector<int> members;
      for (int p : batch_pairs) {
        members.push_back(data.pairs[p].first);
        members.push_back(data.pairs[p].second);
      }
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()), members.end());
      std::vector<const PreparedGraph*> graphs;
      for (int g : members) graphs.push_back(&data.graphs[g]);
      auto local = [&members](int g) {
        return static_cast<int>(std::lower_bound(members.begin(), members.end(), g) -
                                members.begin());
      };
      LossSpec spec;
      spec.kind = LossSpec::Kind::kMarginRanking;
      spec.margin = config.margin;
      for (int p : batch_pairs) {
        const GraphPair& pair = data.pairs[p];
        spec.pairs.push_back({local(pair.first), local(pair.second), pair.label, pair.group});
      }
      absl::StatusOr<BatchGradient> gradient = ComputeBatchGradient(result.params, graphs, spec);
      if (!gradient.ok()) {
        return absl::Status(gradient.status().code(),
                            absl::StrCat("epoch ", epoch, ": ", gradient.status().message()));
      }
      epoch_loss += gradient->loss * static_cast<double>(batch_pairs.size());
      ClipGradientNorm(gradient->grads, config.max_grad_norm);
      optimizer.Step(result.params, gradient->grads);
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(data.pairs.size()));
  }
  return result;
}

absl::StatusOr<TrainResult> TrainClassifier(const ClassificationDataset& data,
                                            const TrainConfig& config) {
  if (data.graphs.empty()) return absl::InvalidArgumentError("classification dataset is empty");
  if (data.labels.size() != data.graphs.size()) {
    return absl::InvalidArgumentError("classification dataset needs one label per graph");
  }
  if (config.batch_size < 1) return absl::InvalidArgumentError("batch_size must be >= 1");
  if (!(config.max_grad_norm >= 0.0)) {
    return absl::InvalidArgumentError("max_grad_norm must be >= 0");
  }

  TrainResult result;
  result.params = InitParams(config.hyper, DeriveSeed(config.seed, 0));
  for (const PreparedGraph& graph : data.graphs) {
    if (absl::Status status = CheckSchema(result.params, graph); !status.ok()) return status;
  }
  AdamOptimizer optimizer(result.params, config.learning_rate, config.adam);
  Rng rng(DeriveSeed(config.seed, 1));

  const int count = static_cast<int>(data.graphs.size());
  std::vector<int> order(count);
  for (int g = 0; g < count; ++g) order[g] = g;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Shuffle(order, rng);
    double epoch_loss = 0.0;
    for (int start = 0; start < count; start += config.batch_size) {
      const int stop = std::min(count, start + config.batch_size);
      std::vector<const PreparedGraph*> graphs;
      LossSpec spec;
      spec.kind = LossSpec::Kind::kBinaryCrossEntropy;
      for (int k = start; k < stop; ++k) {
        graphs.push_back(&data.graphs[order[k]]);
        spec.labels.push_back(static_cast<double>(data.labels[order[k]]));
      }
      absl::StatusOr<BatchGradient> gradient = ComputeBatchGradient(result.params, graphs, spec);
      if (!gradient.ok()) {
        return absl::Status(gradient.status().code(),
                            absl::StrCat("epoch ", epoch, ": ", gradient.status().message()));
      }
      epoch_loss += gradient->loss * (stop - start);
      ClipGradientNorm(gradient->grads, config.max_grad_norm);
      optimizer.Step(result.params, gradient->grads);
    }
    result.loss_history.push_back(epoch_loss / count);
  }
  return result;
}

double PairwiseAccuracy(const ModelParams& params, const RankingDataset& data) {
  if (data.pairs.empty()) return 0.0;
  const std::vector<double> scores = ScoreAll(params, data.graphs);
  int correct = 0;
  for (const GraphPair& pair : data.pairs) {
    if (pair.label * (scores[pair.first] - scores[pair.second]) > 0.0) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.pairs.size());
}

double ClassificationAccuracy(const ModelParams& params, const ClassificationDataset& data) {
  if (data.graphs.empty()) return 0.0;
  const std::vector<double> logits = ScoreAll(params, data.graphs);
  int correct = 0;
  for (size_t g = 0; g < logits.size(); ++g) {
    if ((Sigmoid(logits[g]) > 0.5 ? 1 : 0) == data.labels[g]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(logits.size());
}

}  // namespace backdoor_mip
