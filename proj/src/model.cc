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

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "backdoor_mip/kernels.h"
#include "backdoor_mip/random.h"
#include "json.hpp"

namespace backdoor_mip {
namespace {

double Elu(double x) { return x > 0.0 ? x : std::expm1(x); }
double EluGrad(double x) { return x > 0.0 ? 1.0 : std::exp(x); }

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void AddColumnSums(const Matrix& d, Matrix& bias) {
  for (int r = 0; r < d.rows(); ++r) {
    for (int c = 0; c < d.cols(); ++c) bias(0, c) += d(r, c);
  }
}

GatParams ZeroGat(int h, int heads) {
  return GatParams{Matrix(h, heads * h), Matrix(heads, 2 * h + 1), Matrix(heads * h, h),
                   Matrix(1, h), Matrix(h, h)};
}

void GlorotFill(Matrix& m, int fan_in, int fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (double& v : m.values()) v = (2.0 * rng.Uniform() - 1.0) * limit;
}

void GatBackward(const GatParams& layer, const Hyperparams& hyper, const Matrix& src,
                 const Matrix& dst, std::span<const int> edge_src, std::span<const int> edge_dst,
                 std::span<const double> edge_coef, std::span<const int> dst_offsets,
                 std::span<const int> dst_edges, const GatCache& cache, const Matrix& d_out,
                 Matrix& d_src, Matrix& d_dst, GatParams& grads) {
  const int h = hyper.hidden;
  const int num_heads = hyper.heads;
  const int width = h * num_heads;
  const int num_dst = dst.rows();
  (void)edge_dst;

  kernels::AddMatMulTransA(cache.heads, d_out, grads.project_weight);
  AddColumnSums(d_out, grads.project_bias);
  kernels::AddMatMulTransA(dst, d_out, grads.self_weight);
  kernels::AddMatMulTransB(d_out, layer.self_weight, d_dst);

  Matrix d_agg(num_dst, width);
  kernels::AddMatMulTransB(d_out, layer.project_weight, d_agg);
  for (int j = 0; j < num_dst; ++j) {
    for (int c = 0; c < width; ++c) d_agg(j, c) *= EluGrad(cache.aggregated(j, c));
  }

  Matrix d_zs(src.rows(), width);
  Matrix d_zd(num_dst, width);
  std::vector<double> d_alpha;
  for (int j = 0; j < num_dst; ++j) {
    const int begin = dst_offsets[j];
    const int end = dst_offsets[j + 1];
    if (begin == end) continue;
    d_alpha.assign(end - begin, 0.0);
    for (int k = 0; k < num_heads; ++k) {
      const int off = k * h;
      double weighted = 0.0;
      for (int p = begin; p < end; ++p) {
        const int e = dst_edges[p];
        const int i = edge_src[e];
        const double alpha = cache.alpha[static_cast<size_t>(e) * num_heads + k];
        double dot = 0.0;
        for (int c = 0; c < h; ++c) {
          dot += d_agg(j, off + c) * cache.z_src(i, off + c);
          d_zs(i, off + c) += alpha * d_agg(j, off + c);
        }
        d_alpha[p - begin] = dot;
        weighted += alpha * dot;
      }
      for (int p = begin; p < end; ++p) {
        const int e = dst_edges[p];
        const int i = edge_src[e];
        const size_t slot = static_cast<size_t>(e) * num_heads + k;
        const double d_logit = cache.alpha[slot] * (d_alpha[p - begin] - weighted);
        const double d_raw = d_logit * (cache.raw[slot] > 0.0 ? 1.0 : hyper.leaky_slope);
        if (d_raw == 0.0) continue;
        for (int c = 0; c < h; ++c) {
          grads.attention(k, c) += d_raw * cache.z_src(i, off + c);
          d_zs(i, off + c) += d_raw * layer.attention(k, c);
          grads.attention(k, h + c) += d_raw * cache.z_dst(j, off + c);
          d_zd(j, off + c) += d_raw * layer.attention(k, h + c);
        }
        grads.attention(k, 2 * h) += d_raw * edge_coef[e];
      }
    }
  }
  kernels::AddMatMulTransA(src, d_zs, grads.weight);
  kernels::AddMatMulTransA(dst, d_zd, grads.weight);
  kernels::AddMatMulTransB(d_zs, layer.weight, d_src);
  kernels::AddMatMulTransB(d_zd, layer.weight, d_dst);
}

void PoolForward(const ModelParams& params, const Matrix& nodes, std::vector<double>& gate,
                 Matrix& transform, std::vector<double>& pooled) {
  Matrix gate_pre;
  kernels::Affine(nodes, params.gate_weight, &params.gate_bias, gate_pre);
  kernels::Affine(nodes, params.transform_weight, &params.transform_bias, transform);
  const int h = params.hyper.hidden;
  gate.resize(nodes.rows());
  pooled.assign(h, 0.0);
  for (int v = 0; v < nodes.rows(); ++v) {
    gate[v] = Sigmoid(gate_pre(v, 0));
    for (int c = 0; c < h; ++c) {
      transform(v, c) = std::tanh(transform(v, c));
      pooled[c] += gate[v] * transform(v, c);
    }
  }
}

}  // namespace

std::vector<std::pair<std::string, Matrix*>> ModelParams::Tensors() {
  std::vector<std::pair<std::string, Matrix*>> tensors = {
      {"embed_var.weight", &embed_var_weight},
      {"embed_var.bias", &embed_var_bias},
      {"embed_cons.weight", &embed_cons_weight},
      {"embed_cons.bias", &embed_cons_bias},
  };
  auto add_gat = [&tensors](const std::string& prefix, GatParams& layer) {
    tensors.emplace_back(prefix + ".weight", &layer.weight);
    tensors.emplace_back(prefix + ".attention", &layer.attention);
    tensors.emplace_back(prefix + ".project_weight", &layer.project_weight);
    tensors.emplace_back(prefix + ".project_bias", &layer.project_bias);
    tensors.emplace_back(prefix + ".self_weight", &layer.self_weight);
  };
  for (size_t l = 0; l < cons_from_var.size(); ++l) {
    add_gat(absl::StrCat("round", l, ".cons_from_var"), cons_from_var[l]);
    add_gat(absl::StrCat("round", l, ".var_from_cons"), var_from_cons[l]);
  }
  tensors.emplace_back("pool.gate_weight", &gate_weight);
  tensors.emplace_back("pool.gate_bias", &gate_bias);
  tensors.emplace_back("pool.transform_weight", &transform_weight);
  tensors.emplace_back("pool.transform_bias", &transform_bias);
  tensors.emplace_back("head.hidden_weight", &hidden_weight);
  tensors.emplace_back("head.hidden_bias", &hidden_bias);
  tensors.emplace_back("head.out_weight", &out_weight);
  tensors.emplace_back("head.out_bias", &out_bias);
  return tensors;
}

std::vector<std::pair<std::string, const Matrix*>> ModelParams::Tensors() const {
  std::vector<std::pair<std::string, const Matrix*>> result;
  for (auto& [name, tensor] : const_cast<ModelParams*>(this)->Tensors()) {
    result.emplace_back(name, tensor);
  }
  return result;
}

size_t ModelParams::NumParameters() const {
  size_t count = 0;
  for (const auto& [name, tensor] : Tensors()) count += tensor->size();
  return count;
}

ModelParams ZeroParams(const Hyperparams& hyper) {
  const int h = hyper.hidden;
  ModelParams params;
  params.hyper = hyper;
  params.embed_var_weight = Matrix(kNumVarFeatures, h);
  params.embed_var_bias = Matrix(1, h);
  params.embed_cons_weight = Matrix(kNumConsFeatures, h);
  params.embed_cons_bias = Matrix(1, h);
  for (int l = 0; l < hyper.rounds; ++l) {
    params.cons_from_var.push_back(ZeroGat(h, hyper.heads));
    params.var_from_cons.push_back(ZeroGat(h, hyper.heads));
  }
  params.gate_weight = Matrix(h, 1);
  params.gate_bias = Matrix(1, 1);
  params.transform_weight = Matrix(h, h);
  params.transform_bias = Matrix(1, h);
  params.hidden_weight = Matrix(h, h);
  params.hidden_bias = Matrix(1, h);
  params.out_weight = Matrix(h, 1);
  params.out_bias = Matrix(1, 1);
  return params;
}

ModelParams InitParams(const Hyperparams& hyper, uint64_t seed) {
  ModelParams params = ZeroParams(hyper);
  Rng rng(seed);
  for (auto& [name, tensor] : params.Tensors()) {
    if (tensor->rows() == 1 && name.find("bias") != std::string::npos) continue;
    if (name.ends_with(".attention")) {
      GlorotFill(*tensor, tensor->cols(), 1, rng);
    } else {
      GlorotFill(*tensor, tensor->rows(), tensor->cols(), rng);
    }
  }
  // Pooling sums over every node. A closed gate at the start keeps the pooled
  // vector near unit scale on graphs with a few hundred nodes.
  params.gate_bias(0, 0) = kInitialGateBias;
  return params;
}

void AddScaled(ModelParams& a, const ModelParams& b, double scale) {
  auto target = a.Tensors();
  auto source = b.Tensors();
  for (size_t t = 0; t < target.size(); ++t) {
    std::vector<double>& dst = target[t].second->values();
    const std::vector<double>& src = source[t].second->values();
    for (size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
  }
}

PreparedGraph Prepare(BipartiteGraph graph) {
  PreparedGraph prepared;
  const int num_edges = static_cast<int>(graph.edges.size());
  const int n = graph.num_vars();
  const int m = graph.num_cons();
  prepared.edge_var.resize(num_edges);
  prepared.edge_cons.resize(num_edges);
  prepared.edge_coef.resize(num_edges);
  prepared.cons_offsets.assign(m + 1, 0);
  prepared.var_offsets.assign(n + 1, 0);
  for (int e = 0; e < num_edges; ++e) {
    prepared.edge_var[e] = graph.edges[e].var;
    prepared.edge_cons[e] = graph.edges[e].cons;
    prepared.edge_coef[e] = graph.edges[e].coef;
    ++prepared.cons_offsets[graph.edges[e].cons + 1];
    ++prepared.var_offsets[graph.edges[e].var + 1];
  }
  for (int j = 0; j < m; ++j) prepared.cons_offsets[j + 1] += prepared.cons_offsets[j];
  for (int i = 0; i < n; ++i) prepared.var_offsets[i + 1] += prepared.var_offsets[i];
  prepared.cons_edges.resize(num_edges);
  prepared.var_edges.resize(num_edges);
  std::vector<int> cons_fill(prepared.cons_offsets.begin(), prepared.cons_offsets.end() - 1);
  std::vector<int> var_fill(prepared.var_offsets.begin(), prepared.var_offsets.end() - 1);
  for (int e = 0; e < num_edges; ++e) {
    prepared.cons_edges[cons_fill[graph.edges[e].cons]++] = e;
    prepared.var_edges[var_fill[graph.edges[e].var]++] = e;
  }
  prepared.graph = std::move(graph);
  return prepared;
}

void GatForward(const GatParams& layer, const Hyperparams& hyper, const Matrix& src,
                const Matrix& dst, std::span<const int> edge_src, std::span<const int> edge_dst,
                std::span<const double> edge_coef, std::span<const int> dst_offsets,
                std::span<const int> dst_edges, GatCache& cache, Matrix& out) {
  const int h = hyper.hidden;
  const int num_heads = hyper.heads;
  const int width = h * num_heads;
  const int num_src = src.rows();
  const int num_dst = dst.rows();
  const size_t num_edges = edge_src.size();

  kernels::Affine(src, layer.weight, nullptr, cache.z_src);
  kernels::Affine(dst, layer.weight, nullptr, cache.z_dst);

  std::vector<double> src_score(static_cast<size_t>(num_src) * num_heads, 0.0);
  std::vector<double> dst_score(static_cast<size_t>(num_dst) * num_heads, 0.0);
  for (int k = 0; k < num_heads; ++k) {
    const int off = k * h;
    for (int i = 0; i < num_src; ++i) {
      double s = 0.0;
      for (int c = 0; c < h; ++c) s += layer.attention(k, c) * cache.z_src(i, off + c);
      src_score[static_cast<size_t>(i) * num_heads + k] = s;
    }
    for (int j = 0; j < num_dst; ++j) {
      double s = 0.0;
      for (int c = 0; c < h; ++c) s += layer.attention(k, h + c) * cache.z_dst(j, off + c);
      dst_score[static_cast<size_t>(j) * num_heads + k] = s;
    }
  }
  cache.raw.assign(num_edges * num_heads, 0.0);
  cache.alpha.assign(num_edges * num_heads, 0.0);
  for (size_t e = 0; e < num_edges; ++e) {
    for (int k = 0; k < num_heads; ++k) {
      cache.raw[e * num_heads + k] = src_score[static_cast<size_t>(edge_src[e]) * num_heads + k] +
                                     dst_score[static_cast<size_t>(edge_dst[e]) * num_heads + k] +
                                     layer.attention(k, 2 * h) * edge_coef[e];
    }
  }

  cache.aggregated = Matrix(num_dst, width);
  for (int j = 0; j < num_dst; ++j) {
    const int begin = dst_offsets[j];
    const int end = dst_offsets[j + 1];
    if (begin == end) continue;
    for (int k = 0; k < num_heads; ++k) {
      const int off = k * h;
      auto logit = [&](int e) {
        const double raw = cache.raw[static_cast<size_t>(e) * num_heads + k];
        return raw > 0.0 ? raw : hyper.leaky_slope * raw;
      };
      double max_logit = -kInfinity;
      for (int p = begin; p < end; ++p) max_logit = std::max(max_logit, logit(dst_edges[p]));
      double total = 0.0;
      for (int p = begin; p < end; ++p) {
        const int e = dst_edges[p];
        const double w = std::exp(logit(e) - max_logit);
        cache.alpha[static_cast<size_t>(e) * num_heads + k] = w;
        total += w;
      }
      for (int p = begin; p < end; ++p) {
        const int e = dst_edges[p];
        double& alpha = cache.alpha[static_cast<size_t>(e) * num_heads + k];
        alpha /= total;
        const int i = edge_src[e];
        for (int c = 0; c < h; ++c) cache.aggregated(j, off + c) += alpha * cache.z_src(i, off + c);
      }
    }
  }
  cache.heads = Matrix(num_dst, width);
  for (size_t t = 0; t < cache.heads.size(); ++t) {
    cache.heads.values()[t] = Elu(cache.aggregated.values()[t]);
  }

  kernels::Affine(cache.heads, layer.project_weight, &layer.project_bias, out);
  Matrix self;
  kernels::Affine(dst, layer.self_weight, nullptr, self);
  for (size_t t = 0; t < out.size(); ++t) out.values()[t] += self.values()[t];
}

double Forward(const ModelParams& params, const PreparedGraph& prepared, ForwardCache& cache) {
  const Hyperparams& hyper = params.hyper;
  const BipartiteGraph& graph = prepared.graph;
  const int rounds = hyper.rounds;
  const int h = hyper.hidden;
  const int n = graph.num_vars();
  const int m = graph.num_cons();

  cache.var_states.resize(rounds + 1);
  cache.cons_states.resize(rounds + 1);
  cache.cons_layers.resize(rounds);
  cache.var_layers.resize(rounds);

  kernels::Affine(graph.var_features, params.embed_var_weight, &params.embed_var_bias,
                  cache.var_embed_pre);
  kernels::Affine(graph.cons_features, params.embed_cons_weight, &params.embed_cons_bias,
                  cache.cons_embed_pre);
  cache.var_states[0] = cache.var_embed_pre;
  for (double& v : cache.var_states[0].values()) v = Elu(v);
  cache.cons_states[0] = cache.cons_embed_pre;
  for (double& v : cache.cons_states[0].values()) v = Elu(v);

  for (int l = 0; l < rounds; ++l) {
    GatForward(params.cons_from_var[l], hyper, cache.var_states[l], cache.cons_states[l],
               prepared.edge_var, prepared.edge_cons, prepared.edge_coef, prepared.cons_offsets,
               prepared.cons_edges, cache.cons_layers[l], cache.cons_states[l + 1]);
    GatForward(params.var_from_cons[l], hyper, cache.cons_states[l + 1], cache.var_states[l],
               prepared.edge_cons, prepared.edge_var, prepared.edge_coef, prepared.var_offsets,
               prepared.var_edges, cache.var_layers[l], cache.var_states[l + 1]);
  }

  cache.nodes = Matrix(n + m, h);
  std::copy(cache.var_states[rounds].values().begin(), cache.var_states[rounds].values().end(),
            cache.nodes.values().begin());
  std::copy(cache.cons_states[rounds].values().begin(), cache.cons_states[rounds].values().end(),
            cache.nodes.values().begin() + static_cast<ptrdiff_t>(n) * h);
  PoolForward(params, cache.nodes, cache.gate, cache.transform, cache.pooled);

  cache.hidden_pre.assign(h, 0.0);
  cache.hidden.assign(h, 0.0);
  for (int c = 0; c < h; ++c) cache.hidden_pre[c] = params.hidden_bias(0, c);
  for (int a = 0; a < h; ++a) {
    for (int c = 0; c < h; ++c) cache.hidden_pre[c] += cache.pooled[a] * params.hidden_weight(a, c);
  }
  double output = params.out_bias(0, 0);
  for (int c = 0; c < h; ++c) {
    cache.hidden[c] = Elu(cache.hidden_pre[c]);
    output += cache.hidden[c] * params.out_weight(c, 0);
  }
  cache.output = output;
  return output;
}

void Backward(const ModelParams& params, const PreparedGraph& prepared, const ForwardCache& cache,
              double d_output, ModelParams& grads) {
  const Hyperparams& hyper = params.hyper;
  const BipartiteGraph& graph = prepared.graph;
  const int rounds = hyper.rounds;
  const int h = hyper.hidden;
  const int n = graph.num_vars();
  const int m = graph.num_cons();

  // Head.
  grads.out_bias(0, 0) += d_output;
  std::vector<double> d_hidden_pre(h);
  for (int c = 0; c < h; ++c) {
    grads.out_weight(c, 0) += d_output * cache.hidden[c];
    d_hidden_pre[c] = d_output * params.out_weight(c, 0) * EluGrad(cache.hidden_pre[c]);
  }
  std::vector<double> d_pooled(h, 0.0);
  for (int a = 0; a < h; ++a) {
    for (int c = 0; c < h; ++c) {
      grads.hidden_weight(a, c) += cache.pooled[a] * d_hidden_pre[c];
      d_pooled[a] += params.hidden_weight(a, c) * d_hidden_pre[c];
    }
  }
  for (int c = 0; c < h; ++c) grads.hidden_bias(0, c) += d_hidden_pre[c];

  // Pooling.
  const int num_nodes = n + m;
  Matrix d_gate_pre(num_nodes, 1);
  Matrix d_transform_pre(num_nodes, h);
  for (int v = 0; v < num_nodes; ++v) {
    double d_gate = 0.0;
    for (int c = 0; c < h; ++c) {
      const double t = cache.transform(v, c);
      d_gate += d_pooled[c] * t;
      d_transform_pre(v, c) = cache.gate[v] * d_pooled[c] * (1.0 - t * t);
    }
    d_gate_pre(v, 0) = d_gate * cache.gate[v] * (1.0 - cache.gate[v]);
  }
  kernels::AddMatMulTransA(cache.nodes, d_gate_pre, grads.gate_weight);
  AddColumnSums(d_gate_pre, grads.gate_bias);
  kernels::AddMatMulTransA(cache.nodes, d_transform_pre, grads.transform_weight);
  AddColumnSums(d_transform_pre, grads.transform_bias);
  Matrix d_nodes(num_nodes, h);
  kernels::AddMatMulTransB(d_gate_pre, params.gate_weight, d_nodes);
  kernels::AddMatMulTransB(d_transform_pre, params.transform_weight, d_nodes);

  Matrix d_var(n, h);
  Matrix d_cons(m, h);
  std::copy(d_nodes.values().begin(), d_nodes.values().begin() + static_cast<ptrdiff_t>(n) * h,
            d_var.values().begin());
  std::copy(d_nodes.values().begin() + static_cast<ptrdiff_t>(n) * h, d_nodes.values().end(),
            d_cons.values().begin());

  // Message passing rounds, last to first.
  for (int l = rounds - 1; l >= 0; --l) {
    Matrix d_var_prev(n, h);
    GatBackward(params.var_from_cons[l], hyper, cache.cons_states[l + 1], cache.var_states[l],
                prepared.edge_cons, prepared.edge_var, prepared.edge_coef, prepared.var_offsets,
                prepared.var_edges, cache.var_layers[l], d_var, d_cons, d_var_prev,
                grads.var_from_cons[l]);
    Matrix d_cons_prev(m, h);
    GatBackward(params.cons_from_var[l], hyper, cache.var_states[l], cache.cons_states[l],
                prepared.edge_var, prepared.edge_cons, prepared.edge_coef, prepared.cons_offsets,
                prepared.cons_edges, cache.cons_layers[l], d_cons, d_var_prev, d_cons_prev,
                grads.cons_from_var[l]);
    d_var = std::move(d_var_prev);
    d_cons = std::move(d_cons_prev);
  }

  // Embeddings.
  for (size_t t = 0; t < d_var.size(); ++t) d_var.values()[t] *= EluGrad(cache.var_embed_pre.values()[t]);
  for (size_t t = 0; t < d_cons.size(); ++t) d_cons.values()[t] *= EluGrad(cache.cons_embed_pre.values()[t]);
  kernels::AddMatMulTransA(graph.var_features, d_var, grads.embed_var_weight);
  AddColumnSums(d_var, grads.embed_var_bias);
  kernels::AddMatMulTransA(graph.cons_features, d_cons, grads.embed_cons_weight);
  AddColumnSums(d_cons, grads.embed_cons_bias);
}

absl::StatusOr<double> Score(const ModelParams& params, const BipartiteGraph& graph) {
  if (graph.feature_schema_version != params.feature_schema_version) {
    return absl::FailedPreconditionError(
        absl::StrCat("graph feature schema ", graph.feature_schema_version,
                     " does not match model schema ", params.feature_schema_version));
  }
  PreparedGraph prepared = Prepare(graph);
  ForwardCache cache;
  return Forward(params, prepared, cache);
}

absl::StatusOr<std::vector<double>> AttentionPool(const ModelParams& params, const Matrix& nodes) {
  if (nodes.rows() == 0) return absl::InvalidArgumentError("attention pooling over an empty graph");
  if (nodes.cols() != params.hyper.hidden) {
    return absl::InvalidArgumentError("node state width does not match the model");
  }
  std::vector<double> gate;
  Matrix transform;
  std::vector<double> pooled;
  PoolForward(params, nodes, gate, transform, pooled);
  return pooled;
}

std::string WriteModel(const ModelParams& params) {
  nlohmann::json root;
  root["schema_version"] = kModelFormatVersion;
  root["hyperparams"] = {{"hidden", params.hyper.hidden},
                         {"heads", params.hyper.heads},
                         {"rounds", params.hyper.rounds},
                         {"leaky_slope", params.hyper.leaky_slope},
                         {"feature_schema_version", params.feature_schema_version}};
  nlohmann::json tensors = nlohmann::json::object();
  for (const auto& [name, tensor] : params.Tensors()) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < tensor->rows(); ++r) {
      rows.push_back(std::vector<double>(tensor->row(r).begin(), tensor->row(r).end()));
    }
    tensors[name] = std::move(rows);
  }
  root["tensors"] = std::move(tensors);
  return root.dump() + "\n";
}

absl::StatusOr<ModelParams> ReadModel(std::string_view text) {
  nlohmann::json root = nlohmann::json::parse(text.begin(), text.end(), nullptr, false);
  if (root.is_discarded() || !root.is_object()) {
    return absl::InvalidArgumentError("model file: not a JSON object");
  }
  auto version = root.find("schema_version");
  if (version == root.end() || !version->is_number_integer()) {
    return absl::InvalidArgumentError("model file: missing schema_version");
  }
  if (version->get<int>() != kModelFormatVersion) {
    return absl::FailedPreconditionError(absl::StrCat("unsupported model format version ",
                                                      version->dump(), " (expected ",
                                                      kModelFormatVersion, ")"));
  }
  Hyperparams hyper;
  int feature_schema = 0;
  try {
    const auto& hp = root.at("hyperparams");
    hyper.hidden = hp.at("hidden").get<int>();
    hyper.heads = hp.at("heads").get<int>();
    hyper.rounds = hp.at("rounds").get<int>();
    hyper.leaky_slope = hp.at("leaky_slope").get<double>();
    feature_schema = hp.at("feature_schema_version").get<int>();
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("model file: bad hyperparams: ", e.what()));
  }
  if (feature_schema != kFeatureSchemaVersion) {
    return absl::FailedPreconditionError(absl::StrCat("model feature schema ", feature_schema,
                                                      " does not match ", kFeatureSchemaVersion));
  }
  if (hyper.hidden <= 0 || hyper.heads <= 0 || hyper.rounds < 0) {
    return absl::InvalidArgumentError("model file: invalid hyperparams");
  }
  ModelParams params = ZeroParams(hyper);
  params.feature_schema_version = feature_schema;
  auto tensors = root.find("tensors");
  if (tensors == root.end() || !tensors->is_object()) {
    return absl::InvalidArgumentError("model file: missing tensors");
  }
  for (auto& [name, tensor] : params.Tensors()) {
    auto entry = tensors->find(name);
    if (entry == tensors->end() || !entry->is_array() ||
        static_cast<int>(entry->size()) != tensor->rows()) {
      return absl::InvalidArgumentError(absl::StrCat("model file: tensor ", name, " missing or misshapen"));
    }
    for (int r = 0; r < tensor->rows(); ++r) {
      const auto& row = (*entry)[r];
      if (!row.is_array() || static_cast<int>(row.size()) != tensor->cols()) {
        return absl::InvalidArgumentError(absl::StrCat("model file: tensor ", name, " row ", r, " misshapen"));
      }
      for (int c = 0; c < tensor->cols(); ++c) {
        if (!row[c].is_number()) {
          return absl::InvalidArgumentError(absl::StrCat("model file: tensor ", name, " has a non-number"));
        }
        (*tensor)(r, c) = row[c].get<double>();
      }
    }
  }
  return params;
}

}  // namespace backdoor_mip
