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

// Random bipartite graphs and a finite-difference gradient oracle shared by
// the model tests and the acceptance binary.

#ifndef BACKDOOR_MIP_TESTS_TEST_GRAPHS_H_
#define BACKDOOR_MIP_TESTS_TEST_GRAPHS_H_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "backdoor_mip/bipartite_graph.h"
#include "backdoor_mip/model.h"
#include "backdoor_mip/random.h"

namespace backdoor_mip::testing_util {

// Features in [-1, 1] with proper one-hot blocks. Every node gets at least
// one edge unless `allow_isolated` is set.
inline BipartiteGraph RandomGraph(Rng& rng, int num_vars, int num_cons, bool allow_isolated = false) {
  BipartiteGraph graph;
  graph.var_features = Matrix(num_vars, kNumVarFeatures);
  for (int i = 0; i < num_vars; ++i) {
    graph.var_features(i, kVarObjective) = 2 * rng.Uniform() - 1;
    graph.var_features(i, kVarLpValue) = rng.Uniform();
    graph.var_features(i, kVarFractionality) = 0.5 * rng.Uniform();
    graph.var_features(i, kVarBasic + static_cast<int>(rng.Below(3))) = 1.0;
    graph.var_features(i, kVarBackdoor) = rng.Uniform() < 0.3 ? 1.0 : 0.0;
  }
  graph.cons_features = Matrix(num_cons, kNumConsFeatures);
  for (int r = 0; r < num_cons; ++r) {
    graph.cons_features(r, kConsRhs) = 2 * rng.Uniform() - 1;
    graph.cons_features(r, kConsDual) = 2 * rng.Uniform() - 1;
    graph.cons_features(r, kConsLessEqual + static_cast<int>(rng.Below(3))) = 1.0;
  }
  std::vector<std::vector<bool>> used(num_vars, std::vector<bool>(num_cons, false));
  auto add = [&](int i, int r) {
    if (used[i][r]) return;
    used[i][r] = true;
    graph.edges.push_back({i, r, 2 * rng.Uniform() - 1});
  };
  for (int i = 0; i < num_vars; ++i) {
    for (int r = 0; r < num_cons; ++r) {
      if (rng.Uniform() < 0.4) add(i, r);
    }
  }
  if (!allow_isolated) {
    for (int i = 0; i < num_vars; ++i) add(i, static_cast<int>(rng.Below(num_cons)));
    for (int r = 0; r < num_cons; ++r) add(static_cast<int>(rng.Below(num_vars)), r);
  }
  std::sort(graph.edges.begin(), graph.edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
    return a.cons != b.cons ? a.cons < b.cons : a.var < b.var;
  });
  return graph;
}

inline std::vector<int> RandomPermutation(Rng& rng, int n) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.Below(i + 1)]);
  return perm;
}

// Relabels variables and constraints (old index k goes to perm[k]) and
// shuffles the edge list.
inline BipartiteGraph PermuteGraph(const BipartiteGraph& graph, Rng& rng) {
  const std::vector<int> var_perm = RandomPermutation(rng, graph.num_vars());
  const std::vector<int> cons_perm = RandomPermutation(rng, graph.num_cons());
  BipartiteGraph out = graph;
  for (int i = 0; i < graph.num_vars(); ++i) {
    for (int c = 0; c < kNumVarFeatures; ++c) {
      out.var_features(var_perm[i], c) = graph.var_features(i, c);
    }
  }
  for (int r = 0; r < graph.num_cons(); ++r) {
    for (int c = 0; c < kNumConsFeatures; ++c) {
      out.cons_features(cons_perm[r], c) = graph.cons_features(r, c);
    }
  }
  const std::vector<int> edge_perm = RandomPermutation(rng, static_cast<int>(graph.edges.size()));
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    const GraphEdge& old = graph.edges[e];
    out.edges[edge_perm[e]] = {var_perm[old.var], cons_perm[old.cons], old.coef};
  }
  return out;
}

struct TensorCheck {
  std::string name;
  // ||analytic - numeric|| / max(||analytic||, ||numeric||), 0 when both vanish.
  double relative_error = 0.0;
  int entries_checked = 0;
};

// Central differences of the network output with step `step`. At most
// `max_entries` entries per tensor are perturbed (all when <= 0), picked by
// `rng` without replacement.
inline std::vector<TensorCheck> CheckGradients(const ModelParams& params, const BipartiteGraph& graph,
                                               double step, int max_entries, Rng& rng) {
  const PreparedGraph prepared = Prepare(graph);
  ForwardCache cache;
  Forward(params, prepared, cache);
  ModelParams analytic = ZeroParams(params.hyper);
  Backward(params, prepared, cache, 1.0, analytic);

  ModelParams probe = params;
  auto probe_tensors = probe.Tensors();
  auto analytic_tensors = analytic.Tensors();
  std::vector<TensorCheck> checks;
  for (size_t t = 0; t < probe_tensors.size(); ++t) {
    std::vector<double>& values = probe_tensors[t].second->values();
    const std::vector<double>& grads = analytic_tensors[t].second->values();
    std::vector<int> entries(values.size());
    std::iota(entries.begin(), entries.end(), 0);
    if (max_entries > 0 && static_cast<int>(entries.size()) > max_entries) {
      for (int k = 0; k < max_entries; ++k) {
        std::swap(entries[k], entries[k + rng.Below(entries.size() - k)]);
      }
      entries.resize(max_entries);
    }
    double diff2 = 0.0, analytic2 = 0.0, numeric2 = 0.0;
    for (int idx : entries) {
      const double saved = values[idx];
      ForwardCache scratch;
      values[idx] = saved + step;
      const double plus = Forward(probe, prepared, scratch);
      values[idx] = saved - step;
      const double minus = Forward(probe, prepared, scratch);
      values[idx] = saved;
      const double numeric = (plus - minus) / (2 * step);
      diff2 += (grads[idx] - numeric) * (grads[idx] - numeric);
      analytic2 += grads[idx] * grads[idx];
      numeric2 += numeric * numeric;
    }
    TensorCheck check;
    check.name = probe_tensors[t].first;
    check.entries_checked = static_cast<int>(entries.size());
    const double scale = std::sqrt(std::max(analytic2, numeric2));
    check.relative_error = scale > 0.0 ? std::sqrt(diff2) / scale : 0.0;
    checks.push_back(check);
  }
  return checks;
}

// Parameters with small random biases so that no tensor's gradient vanishes
// identically (Glorot init leaves biases at zero, which is fine for training
// but hides bias bugs from a gradient check).
inline ModelParams RandomParams(const Hyperparams& hyper, uint64_t seed) {
  ModelParams params = InitParams(hyper, seed);
  Rng rng(DeriveSeed(seed, 99));
  for (auto& [name, tensor] : params.Tensors()) {
    if (name.find("bias") == std::string::npos) continue;
    for (double& v : tensor->values()) v = 0.5 * (2 * rng.Uniform() - 1);
  }
  return params;
}

}  // namespace backdoor_mip::testing_util

#endif  // BACKDOOR_MIP_TESTS_TEST_GRAPHS_H_
