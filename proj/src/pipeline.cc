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

#include "backdoor_mip/pipeline.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "backdoor_mip/bipartite_graph.h"
#include "backdoor_mip/losses.h"
#include "backdoor_mip/random.h"
#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace backdoor_mip {
namespace {

using nlohmann::json;

constexpr int kReportFormatVersion = 1;
constexpr std::string_view kCandidatePrefix = "candidate:";

std::string_view MeasureName(PerformanceMeasure measure) {
  return measure == PerformanceMeasure::kNodeCount ? "nodes" : "seconds";
}

std::optional<PerformanceMeasure> MeasureFromName(std::string_view name) {
  if (name == "nodes") return PerformanceMeasure::kNodeCount;
  if (name == "seconds") return PerformanceMeasure::kWallSeconds;
  return std::nullopt;
}

absl::Status CheckModel(const ModelParams& params, std::string_view role) {
  if (params.feature_schema_version != kFeatureSchemaVersion) {
    return absl::FailedPreconditionError(
        absl::StrCat(std::string(role), " model uses feature schema ",
                     params.feature_schema_version, ", encoder produces ",
                     kFeatureSchemaVersion));
  }
  return absl::OkStatus();
}

absl::StatusOr<LpSolution> RootLp(const MipInstance& instance) {
  LpSolution lp = SolveLp(instance);
  if (lp.status != LpStatus::kOptimal) {
    return absl::FailedPreconditionError(absl::StrCat(
        "root LP of ", instance.id, " is ", std::string(LpStatusToString(lp.status))));
  }
  return lp;
}

absl::StatusOr<SolveRecord> RunTask(const SolveTask& task, const BnbConfig& config) {
  const InstanceData& data = *task.data;
  PriorityMap priorities = ZeroPriorities(data.instance.num_vars);
  if (task.candidate.has_value()) {
    const int k = *task.candidate;
    if (k < 0 || k >= static_cast<int>(data.candidates.size())) {
      return absl::InvalidArgumentError(
          absl::StrCat("candidate ", k, " out of range for ", data.instance.id));
    }
    absl::StatusOr<PriorityMap> mapped = PrioritiesFrom(data.candidates[k], data.instance.num_vars);
    if (!mapped.ok()) return mapped.status();
    priorities = *std::move(mapped);
  }
  absl::StatusOr<BnbResult> result = SolveMip(data.instance, priorities, config);
  if (!result.ok()) {
    return absl::Status(result.status().code(),
                        absl::StrCat(data.instance.id, " ", SettingName(task.candidate), ": ",
                                     result.status().message()));
  }
  SolveRecord record;
  record.instance_id = data.instance.id;
  record.setting = SettingName(task.candidate);
  record.seed = data.candidate_seed;
  record.status = result->status;
  record.objective = result->objective;
  record.measure = config.measure;
  record.measure_value = result->measure_value;
  record.node_count = result->node_count;
  return record;
}

const SolveRecord* FindRun(const RecordStore& store, const InstanceData& data,
                           std::optional<int> candidate) {
  return store.Find({data.instance.id, SettingName(candidate), data.candidate_seed});
}

}  // namespace

std::string SettingName(std::optional<int> candidate) {
  if (!candidate.has_value()) return std::string(kDefaultSetting);
  return absl::StrCat(std::string(kCandidatePrefix), *candidate);
}

absl::StatusOr<std::optional<int>> ParseSetting(std::string_view setting) {
  if (setting == kDefaultSetting) return std::optional<int>();
  if (setting.substr(0, kCandidatePrefix.size()) == kCandidatePrefix) {
    std::string_view digits = setting.substr(kCandidatePrefix.size());
    if (!digits.empty() && digits.size() <= 9 &&
        std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      return std::optional<int>(std::stoi(std::string(digits)));
    }
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown setting \"", std::string(setting), "\""));
}

std::string RecordToJson(const SolveRecord& record) {
  json j;
  j["instance"] = record.instance_id;
  j["setting"] = record.setting;
  j["seed"] = record.seed;
  j["status"] = std::string(BnbStatusToString(record.status));
  j["objective"] = record.objective.has_value() ? json(*record.objective) : json(nullptr);
  j["measure"] = std::string(MeasureName(record.measure));
  j["measure_value"] = record.measure_value;
  j["node_count"] = record.node_count;
  return j.dump();
}

absl::StatusOr<SolveRecord> RecordFromJson(std::string_view line) {
  json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("record is not a JSON object");
  }
  SolveRecord record;
  try {
    record.instance_id = j.at("instance").get<std::string>();
    record.setting = j.at("setting").get<std::string>();
    record.seed = j.at("seed").get<uint64_t>();
    const std::string status = j.at("status").get<std::string>();
    std::optional<BnbStatus> parsed = BnbStatusFromString(status);
    if (!parsed.has_value()) {
      return absl::InvalidArgumentError(absl::StrCat("unknown status \"", status, "\""));
    }
    record.status = *parsed;
    if (!j.at("objective").is_null()) record.objective = j.at("objective").get<double>();
    const std::string measure = j.at("measure").get<std::string>();
    std::optional<PerformanceMeasure> parsed_measure = MeasureFromName(measure);
    if (!parsed_measure.has_value()) {
      return absl::InvalidArgumentError(absl::StrCat("unknown measure \"", measure, "\""));
    }
    record.measure = *parsed_measure;
    record.measure_value = j.at("measure_value").get<double>();
    record.node_count = j.at("node_count").get<int64_t>();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed record: ", e.what()));
  }
  if (absl::StatusOr<std::optional<int>> setting = ParseSetting(record.setting); !setting.ok()) {
    return setting.status();
  }
  if (!(record.measure_value >= 0.0)) {
    return absl::InvalidArgumentError("record measure_value must be non-negative");
  }
  return record;
}

absl::StatusOr<RecordStore> RecordStore::Open(std::string path) {
  RecordStore store(std::move(path));
  std::ifstream in(store.path_);
  if (!in) return store;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    absl::StatusOr<SolveRecord> record = RecordFromJson(line);
    if (!record.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(store.path_, ":", line_number, ": ",
                                                     record.status().message()));
    }
    if (store.index_.count(record->key()) > 0) {
      return absl::InvalidArgumentError(
          absl::StrCat(store.path_, ":", line_number, ": duplicate record for ",
                       record->instance_id, " ", record->setting));
    }
    store.index_.emplace(record->key(), store.records_.size());
    store.records_.push_back(*std::move(record));
  }
  return store;
}

bool RecordStore::Contains(const SolveRecord::Key& key) const { return index_.count(key) > 0; }

const SolveRecord* RecordStore::Find(const SolveRecord::Key& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &records_[it->second];
}

absl::Status RecordStore::Append(std::span<const SolveRecord> records) {
  std::set<SolveRecord::Key> fresh;
  for (const SolveRecord& record : records) {
    if (Contains(record.key()) || !fresh.insert(record.key()).second) {
      return absl::AlreadyExistsError(absl::StrCat("record for ", record.instance_id, " ",
                                                   record.setting, " already stored"));
    }
  }
  if (records.empty()) return absl::OkStatus();
  std::string text;
  for (const SolveRecord& record : records) absl::StrAppend(&text, RecordToJson(record), "\n");
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  out << text;
  out.flush();
  if (!out) return absl::UnavailableError(absl::StrCat("cannot append to ", path_));
  for (const SolveRecord& record : records) {
    index_.emplace(record.key(), records_.size());
    records_.push_back(record);
  }
  return absl::OkStatus();
}

std::vector<SolveTask> AllSettings(std::span<const InstanceData> instances) {
  std::vector<SolveTask> tasks;
  for (const InstanceData& data : instances) {
    tasks.push_back({&data, std::nullopt});
    for (int k = 0; k < static_cast<int>(data.candidates.size()); ++k) {
      tasks.push_back({&data, k});
    }
  }
  return tasks;
}

absl::StatusOr<CollectStats> CollectRuns(std::span<const SolveTask> tasks,
                                         const CollectConfig& config, RecordStore& store) {
  if (config.chunk_size < 1) return absl::InvalidArgumentError("chunk_size must be >= 1");
  if (config.jobs < 0) return absl::InvalidArgumentError("jobs must be >= 0");
  CollectStats stats;
  std::set<SolveRecord::Key> queued;
  std::vector<const SolveTask*> pending;
  for (const SolveTask& task : tasks) {
    SolveRecord::Key key{task.data->instance.id, SettingName(task.candidate),
                         task.data->candidate_seed};
    if (store.Contains(key) || !queued.insert(key).second) {
      ++stats.skipped;
      continue;
    }
    pending.push_back(&task);
  }

  int threads = config.jobs;
#ifdef _OPENMP
  if (threads == 0) threads = omp_get_max_threads();
#endif
  if (threads < 1) threads = 1;

  for (size_t start = 0; start < pending.size(); start += config.chunk_size) {
    const int count =
        static_cast<int>(std::min(pending.size(), start + config.chunk_size) - start);
    std::vector<absl::StatusOr<SolveRecord>> results(count, absl::UnknownError("not run"));
#pragma omp parallel for num_threads(threads) schedule(dynamic)
    for (int t = 0; t < count; ++t) results[t] = RunTask(*pending[start + t], config.bnb);
    std::vector<SolveRecord> chunk;
    chunk.reserve(count);
    for (auto& result : results) {
      if (!result.ok()) return result.status();
      if (result->status != BnbStatus::kOptimal) ++stats.non_optimal;
      chunk.push_back(*std::move(result));
    }
    if (absl::Status status = store.Append(chunk); !status.ok()) return status;
    stats.solved += count;
  }
  return stats;
}

PairBuildResult BuildRankingPairs(std::span<const SolveRecord> records, const PairConfig& config) {
  PairBuildResult result;
  std::vector<std::string> order;
  std::map<std::string, std::map<int, double>> usable;
  for (const SolveRecord& record : records) {
    if (usable.find(record.instance_id) == usable.end()) {
      order.push_back(record.instance_id);
      usable[record.instance_id];
    }
    absl::StatusOr<std::optional<int>> setting = ParseSetting(record.setting);
    if (!setting.ok() || !setting->has_value()) continue;
    if (record.status != BnbStatus::kOptimal) {
      result.warnings.push_back(absl::StrCat(record.instance_id, " ", record.setting,
                                             " excluded from labels: status ",
                                             std::string(BnbStatusToString(record.status))));
      continue;
    }
    auto [it, inserted] = usable[record.instance_id].emplace(**setting, record.measure_value);
    if (!inserted) {
      result.warnings.push_back(absl::StrCat(record.instance_id, " ", record.setting,
                                             " has several records; keeping the first"));
    }
  }

  for (const std::string& id : order) {
    const std::map<int, double>& measures = usable[id];
    if (measures.size() < 2) {
      result.warnings.push_back(absl::StrCat(id, " skipped: ", measures.size(),
                                             " usable candidate records, need 2"));
      continue;
    }
    std::vector<std::pair<int, double>> entries(measures.begin(), measures.end());
    std::vector<RankingPair> pairs;
    for (size_t a = 0; a < entries.size(); ++a) {
      for (size_t b = a + 1; b < entries.size(); ++b) {
        if (entries[a].second == entries[b].second) continue;
        pairs.push_back(
            {id, entries[a].first, entries[b].first, entries[a].second < entries[b].second ? -1 : 1});
      }
    }
    if (config.cap > 0 && static_cast<int>(pairs.size()) > config.cap) {
      Rng rng(DeriveSeed(config.seed, StableHash(id)));
      std::vector<int> index(pairs.size());
      std::iota(index.begin(), index.end(), 0);
      for (int k = 0; k < config.cap; ++k) {
        std::swap(index[k], index[k + rng.Below(index.size() - k)]);
      }
      index.resize(config.cap);
      std::sort(index.begin(), index.end());
      std::vector<RankingPair> kept;
      kept.reserve(config.cap);
      for (int k : index) kept.push_back(std::move(pairs[k]));
      pairs = std::move(kept);
    }
    result.pairs.insert(result.pairs.end(), pairs.begin(), pairs.end());
  }
  return result;
}

int SelectBest(std::span<const double> scores) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(scores.size()); ++k) {
    if (scores[k] < scores[best]) best = k;
  }
  return best;
}

absl::StatusOr<std::vector<PreparedGraph>> EncodeCandidates(const InstanceData& data,
                                                            const LpSolution& root_lp) {
  std::vector<PreparedGraph> graphs;
  graphs.reserve(data.candidates.size());
  for (const CandidateSet& candidate : data.candidates) {
    absl::StatusOr<BipartiteGraph> graph = Encode(data.instance, root_lp, candidate);
    if (!graph.ok()) return graph.status();
    graphs.push_back(Prepare(*std::move(graph)));
  }
  return graphs;
}

absl::StatusOr<int> SelectBestCandidate(const ModelParams& scorer, const InstanceData& data,
                                        const LpSolution& root_lp) {
  if (absl::Status status = CheckModel(scorer, "scorer"); !status.ok()) return status;
  if (data.candidates.empty()) {
    return absl::FailedPreconditionError(absl::StrCat(data.instance.id, " has no candidates"));
  }
  absl::StatusOr<std::vector<PreparedGraph>> graphs = EncodeCandidates(data, root_lp);
  if (!graphs.ok()) return graphs.status();
  return SelectBest(ScoreAll(scorer, *graphs));
}

absl::StatusOr<RankingDataset> BuildRankingDataset(std::span<const InstanceData> instances,
                                                   std::span<const RankingPair> pairs) {
  std::map<std::string, int> ordinal;
  for (int i = 0; i < static_cast<int>(instances.size()); ++i) {
    if (!ordinal.emplace(instances[i].instance.id, i).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate instance id ", instances[i].instance.id));
    }
  }
  std::vector<std::vector<int>> referenced(instances.size());
  for (const RankingPair& pair : pairs) {
    auto it = ordinal.find(pair.instance_id);
    if (it == ordinal.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("pair refers to unknown instance ", pair.instance_id));
    }
    const int size = static_cast<int>(instances[it->second].candidates.size());
    if (pair.first < 0 || pair.first >= size || pair.second < 0 || pair.second >= size) {
      return absl::InvalidArgumentError(
          absl::StrCat("pair refers to a missing candidate of ", pair.instance_id));
    }
    referenced[it->second].push_back(pair.first);
    referenced[it->second].push_back(pair.second);
  }

  RankingDataset dataset;
  // candidate index -> graph index, per instance
  std::vector<std::map<int, int>> graph_of(instances.size());
  for (size_t i = 0; i < instances.size(); ++i) {
    if (referenced[i].empty()) continue;
    const InstanceData& data = instances[i];
    absl::StatusOr<LpSolution> lp = RootLp(data.instance);
    if (!lp.ok()) return lp.status();
    std::map<std::vector<int>, int> by_vars;
    std::sort(referenced[i].begin(), referenced[i].end());
    referenced[i].erase(std::unique(referenced[i].begin(), referenced[i].end()),
                        referenced[i].end());
    for (int k : referenced[i]) {
      const CandidateSet& candidate = data.candidates[k];
      auto found = by_vars.find(candidate.vars);
      if (found != by_vars.end()) {
        graph_of[i][k] = found->second;
        continue;
      }
      absl::StatusOr<BipartiteGraph> graph = Encode(data.instance, *lp, candidate);
      if (!graph.ok()) return graph.status();
      const int index = static_cast<int>(dataset.graphs.size());
      dataset.graphs.push_back(Prepare(*std::move(graph)));
      by_vars.emplace(candidate.vars, index);
      graph_of[i][k] = index;
    }
  }
  for (const RankingPair& pair : pairs) {
    const int i = ordinal[pair.instance_id];
    dataset.pairs.push_back({graph_of[i][pair.first], graph_of[i][pair.second], pair.label, i});
  }
  return dataset;
}

absl::StatusOr<ClassifierData> BuildClassifierData(const ModelParams& scorer,
                                                   std::span<const InstanceData> instances,
                                                   const RecordStore& records) {
  if (absl::Status status = CheckModel(scorer, "scorer"); !status.ok()) return status;
  ClassifierData out;
  for (const InstanceData& data : instances) {
    if (data.candidates.empty()) {
      out.warnings.push_back(absl::StrCat(data.instance.id, " skipped: no candidates"));
      continue;
    }
    absl::StatusOr<LpSolution> lp = RootLp(data.instance);
    if (!lp.ok()) return lp.status();
    absl::StatusOr<std::vector<PreparedGraph>> graphs = EncodeCandidates(data, *lp);
    if (!graphs.ok()) return graphs.status();
    const int best = SelectBest(ScoreAll(scorer, *graphs));
    const SolveRecord* default_run = FindRun(records, data, std::nullopt);
    const SolveRecord* candidate_run = FindRun(records, data, best);
    if (default_run == nullptr || candidate_run == nullptr) {
      out.warnings.push_back(absl::StrCat(data.instance.id, " skipped: no record for ",
                                          default_run == nullptr ? "default"
                                                                 : SettingName(best)));
      continue;
    }
    if (default_run->status != BnbStatus::kOptimal ||
        candidate_run->status != BnbStatus::kOptimal) {
      out.warnings.push_back(
          absl::StrCat(data.instance.id, " skipped: non-Optimal run excluded from labels"));
      continue;
    }
    const int label = candidate_run->measure_value < default_run->measure_value ? 1 : 0;
    out.examples.push_back({data.instance.id, best, label});
    out.dataset.graphs.push_back(std::move((*graphs)[best]));
    out.dataset.labels.push_back(label);
  }
  return out;
}

double Percentile(std::span<const double> sorted, double q) {
  const double position = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(position));
  const size_t hi = std::min(sorted.size() - 1, lo + 1);
  return sorted[lo] + (position - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

absl::StatusOr<Summary> Summarize(std::span<const double> values) {
  if (values.empty()) return absl::InvalidArgumentError("cannot summarize an empty sample");
  const double n = static_cast<double>(values.size());
  Summary summary;
  for (double v : values) summary.mean += v;
  summary.mean /= n;
  if (values.size() > 1) {
    double squares = 0.0;
    for (double v : values) squares += (v - summary.mean) * (v - summary.mean);
    summary.stdev = std::sqrt(squares / (n - 1.0));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  summary.p25 = Percentile(sorted, 0.25);
  summary.median = Percentile(sorted, 0.5);
  summary.p75 = Percentile(sorted, 0.75);
  return summary;
}

absl::StatusOr<std::vector<EvalChoice>> PlanEvaluation(const ModelParams& scorer,
                                                       const ModelParams& classifier,
                                                       std::span<const InstanceData> instances) {
  if (absl::Status status = CheckModel(scorer, "scorer"); !status.ok()) return status;
  if (absl::Status status = CheckModel(classifier, "classifier"); !status.ok()) return status;
  std::vector<EvalChoice> choices;
  for (const InstanceData& data : instances) {
    if (data.candidates.empty()) {
      return absl::FailedPreconditionError(absl::StrCat(data.instance.id, " has no candidates"));
    }
    absl::StatusOr<LpSolution> lp = RootLp(data.instance);
    if (!lp.ok()) return lp.status();
    absl::StatusOr<std::vector<PreparedGraph>> graphs = EncodeCandidates(data, *lp);
    if (!graphs.ok()) return graphs.status();
    EvalChoice choice;
    choice.instance_id = data.instance.id;
    choice.scorer_candidate = SelectBest(ScoreAll(scorer, *graphs));
    ForwardCache cache;
    choice.classifier_probability =
        Sigmoid(Forward(classifier, (*graphs)[choice.scorer_candidate], cache));
    choice.classifier_accepts = choice.classifier_probability > 0.5;
    choices.push_back(std::move(choice));
  }
  return choices;
}

std::vector<SolveTask> EvaluationTasks(std::span<const InstanceData> instances,
                                       std::span<const EvalChoice> choices) {
  std::vector<SolveTask> tasks;
  for (size_t i = 0; i < instances.size() && i < choices.size(); ++i) {
    tasks.push_back({&instances[i], std::nullopt});
    tasks.push_back({&instances[i], choices[i].scorer_candidate});
  }
  return tasks;
}

absl::StatusOr<EvalReport> BuildEvalReport(std::span<const InstanceData> instances,
                                           std::span<const EvalChoice> choices,
                                           const RecordStore& records) {
  if (instances.size() != choices.size()) {
    return absl::InvalidArgumentError("one evaluation choice per instance is required");
  }
  EvalReport report;
  std::optional<PerformanceMeasure> measure;
  for (size_t i = 0; i < instances.size(); ++i) {
    const InstanceData& data = instances[i];
    const EvalChoice& choice = choices[i];
    if (choice.instance_id != data.instance.id) {
      return absl::InvalidArgumentError(absl::StrCat("choice for ", choice.instance_id,
                                                     " paired with ", data.instance.id));
    }
    const SolveRecord* default_run = FindRun(records, data, std::nullopt);
    if (default_run == nullptr) {
      report.skipped.push_back(absl::StrCat(data.instance.id, ": default run missing"));
      continue;
    }
    const SolveRecord* candidate_run = FindRun(records, data, choice.scorer_candidate);
    if (candidate_run == nullptr) {
      report.skipped.push_back(absl::StrCat(data.instance.id, ": ",
                                            SettingName(choice.scorer_candidate),
                                            " run missing"));
      continue;
    }
    if (default_run->measure != candidate_run->measure ||
        (measure.has_value() && *measure != default_run->measure)) {
      return absl::FailedPreconditionError("records mix node-count and seconds measures");
    }
    measure = default_run->measure;
    InstanceOutcome outcome;
    outcome.instance_id = data.instance.id;
    outcome.default_measure = default_run->measure_value;
    outcome.scorer_candidate = choice.scorer_candidate;
    outcome.scorer_measure = candidate_run->measure_value;
    outcome.classifier_probability = choice.classifier_probability;
    outcome.classifier_accepts = choice.classifier_accepts;
    outcome.scorer_cls_measure =
        choice.classifier_accepts ? outcome.scorer_measure : outcome.default_measure;
    report.instances.push_back(std::move(outcome));
  }
  if (report.instances.empty()) {
    return absl::FailedPreconditionError("no instance has the runs needed for evaluation");
  }
  report.measure = measure.value_or(PerformanceMeasure::kNodeCount);

  std::vector<double> base, scorer, gated;
  MethodRow default_row, scorer_row, gated_row;
  default_row.name = "default";
  scorer_row.name = "scorer";
  gated_row.name = "scorer+cls";
  auto tally = [](MethodRow& row, double value, double reference, bool ran_default) {
    if (ran_default || value == reference) {
      ++row.ties;
    } else if (value < reference) {
      ++row.wins;
    } else {
      ++row.losses;
    }
  };
  for (const InstanceOutcome& outcome : report.instances) {
    base.push_back(outcome.default_measure);
    scorer.push_back(outcome.scorer_measure);
    gated.push_back(outcome.scorer_cls_measure);
    tally(default_row, outcome.default_measure, outcome.default_measure, true);
    tally(scorer_row, outcome.scorer_measure, outcome.default_measure, false);
    tally(gated_row, outcome.scorer_cls_measure, outcome.default_measure,
          !outcome.classifier_accepts);
  }
  default_row.summary = *Summarize(base);
  scorer_row.summary = *Summarize(scorer);
  gated_row.summary = *Summarize(gated);
  report.rows = {default_row, scorer_row, gated_row};
  return report;
}

std::string ReportToJson(const EvalReport& report) {
  json j;
  j["schema_version"] = kReportFormatVersion;
  j["measure"] = std::string(MeasureName(report.measure));
  j["num_instances"] = report.instances.size();
  j["rows"] = json::array();
  for (const MethodRow& row : report.rows) {
    j["rows"].push_back({{"name", row.name},
                         {"mean", row.summary.mean},
                         {"stdev", row.summary.stdev},
                         {"p25", row.summary.p25},
                         {"median", row.summary.median},
                         {"p75", row.summary.p75},
                         {"wins", row.wins},
                         {"ties", row.ties},
                         {"losses", row.losses}});
  }
  j["instances"] = json::array();
  for (const InstanceOutcome& outcome : report.instances) {
    j["instances"].push_back({{"instance", outcome.instance_id},
                              {"default", outcome.default_measure},
                              {"scorer_candidate", outcome.scorer_candidate},
                              {"scorer", outcome.scorer_measure},
                              {"classifier_probability", outcome.classifier_probability},
                              {"classifier_accepts", outcome.classifier_accepts},
                              {"scorer+cls", outcome.scorer_cls_measure}});
  }
  j["skipped"] = report.skipped;
  return j.dump(2) + "\n";
}

absl::StatusOr<EvalReport> ReportFromJson(std::string_view text) {
  json j = json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("report is not a JSON object");
  }
  EvalReport report;
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kReportFormatVersion) {
      return absl::FailedPreconditionError(
          absl::StrCat("unsupported report format version ", version));
    }
    std::optional<PerformanceMeasure> measure =
        MeasureFromName(j.at("measure").get<std::string>());
    if (!measure.has_value()) return absl::InvalidArgumentError("unknown report measure");
    report.measure = *measure;
    for (const json& row : j.at("rows")) {
      MethodRow parsed;
      parsed.name = row.at("name").get<std::string>();
      parsed.summary.mean = row.at("mean").get<double>();
      parsed.summary.stdev = row.at("stdev").get<double>();
      parsed.summary.p25 = row.at("p25").get<double>();
      parsed.summary.median = row.at("median").get<double>();
      parsed.summary.p75 = row.at("p75").get<double>();
      parsed.wins = row.at("wins").get<int>();
      parsed.ties = row.at("ties").get<int>();
      parsed.losses = row.at("losses").get<int>();
      report.rows.push_back(std::move(parsed));
    }
    for (const json& item : j.at("instances")) {
      InstanceOutcome outcome;
      outcome.instance_id = item.at("instance").get<std::string>();
      outcome.default_measure = item.at("default").get<double>();
      outcome.scorer_candidate = item.at("scorer_candidate").get<int>();
      outcome.scorer_measure = item.at("scorer").get<double>();
      outcome.classifier_probability = item.at("classifier_probability").get<double>();
      outcome.classifier_accepts = item.at("classifier_accepts").get<bool>();
      outcome.scorer_cls_measure = item.at("scorer+cls").get<double>();
      report.instances.push_back(std::move(outcome));
    }
    report.skipped = j.at("skipped").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed report: ", e.what()));
  }
  return report;
}

std::string ReportToTable(const EvalReport& report) {
  std::string table = absl::StrFormat("%-12s %10s %10s %10s %10s %10s   %s\n", "solver", "mean",
                                      "stdev", "25 pct", "median", "75 pct",
                                      "win / tie / loss vs default");
  for (const MethodRow& row : report.rows) {
    absl::StrAppend(&table,
                    absl::StrFormat("%-12s %10.2f %10.2f %10.2f %10.2f %10.2f   %d / %d / %d\n",
                                    row.name, row.summary.mean, row.summary.stdev,
                                    row.summary.p25, row.summary.median, row.summary.p75,
                                    row.wins, row.ties, row.losses));
  }
  absl::StrAppend(&table, absl::StrFormat("measure: %s, instances: %d",
                                          std::string(MeasureName(report.measure)),
                                          static_cast<int>(report.instances.size())));
  if (!report.skipped.empty()) {
    absl::StrAppend(&table, absl::StrFormat(", skipped: %d", static_cast<int>(report.skipped.size())));
  }
  absl::StrAppend(&table, "\n");
  return table;
}

}  // namespace backdoor_mip
