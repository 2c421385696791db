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

// Experiment plumbing: solver-run records, ranking and classification data,
// test-time candidate selection and the win/tie/loss evaluation report.

#ifndef BACKDOOR_MIP_PIPELINE_H_
#define BACKDOOR_MIP_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "backdoor_mip/backdoor.h"
#include "backdoor_mip/bnb_solver.h"
#include "backdoor_mip/lp_simplex.h"
#include "backdoor_mip/mip_instance.h"
#include "backdoor_mip/model.h"
#include "backdoor_mip/train.h"

namespace backdoor_mip {

inline constexpr std::string_view kDefaultSetting = "default";

// "default" for the plain solver, "candidate:<k>" for the k-th candidate set.
std::string SettingName(std::optional<int> candidate);
// Inverse of SettingName: nullopt for "default", the index for a candidate,
// InvalidArgument for anything else.
absl::StatusOr<std::optional<int>> ParseSetting(std::string_view setting);

struct SolveRecord {
  std::string instance_id;
  std::string setting;
  // Seed that produced the instance's candidate sets.
  uint64_t seed = 0;
  BnbStatus status = BnbStatus::kOptimal;
  std::optional<double> objective;
  PerformanceMeasure measure = PerformanceMeasure::kNodeCount;
  double measure_value = 0.0;
  int64_t node_count = 0;

  using Key = std::tuple<std::string, std::string, uint64_t>;
  Key key() const { return {instance_id, setting, seed}; }

  bool operator==(const SolveRecord&) const = default;
};

// One JSON object, no trailing newline.
std::string RecordToJson(const SolveRecord& record);
absl::StatusOr<SolveRecord> RecordFromJson(std::string_view line);

// Append-only JSON-lines store with a single writer. Opening an existing file
// loads its records so that already-present keys are skipped on re-collection.
class RecordStore {
 public:
  static absl::StatusOr<RecordStore> Open(std::string path);

  bool Contains(const SolveRecord::Key& key) const;
  const SolveRecord* Find(const SolveRecord::Key& key) const;
  const std::vector<SolveRecord>& records() const { return records_; }
  const std::string& path() const { return path_; }

  // Writes the records in the given order and flushes. Records whose key is
  // already present are rejected with AlreadyExists.
  absl::Status Append(std::span<const SolveRecord> records);

 private:
  explicit RecordStore(std::string path) : path_(std::move(path)) {}

  std::string path_;
  std::vector<SolveRecord> records_;
  std::map<SolveRecord::Key, size_t> index_;
};

// An instance together with its sampled candidate sets.
struct InstanceData {
  MipInstance instance;
  std::vector<CandidateSet> candidates;
  uint64_t candidate_seed = 0;
};

struct SolveTask {
  const InstanceData* data = nullptr;
  std::optional<int> candidate;
};

// The default run followed by one run per candidate, for every instance.
std::vector<SolveTask> AllSettings(std::span<const InstanceData> instances);

struct CollectConfig {
  BnbConfig bnb;
  // Number of concurrent solves; 0 uses the OpenMP default.
  int jobs = 1;
  // Tasks are solved and appended in chunks of this size, so an interrupted
  // collection loses at most one chunk.
  int chunk_size = 64;
};

struct CollectStats {
  int solved = 0;
  int skipped = 0;
  int non_optimal = 0;
};

// Runs every task whose key is not yet in the store. Records are appended in
// task order regardless of the number of jobs, so the file contents depend
// only on the tasks and their seeds.
absl::StatusOr<CollectStats> CollectRuns(std::span<const SolveTask> tasks,
                                         const CollectConfig& config, RecordStore& store);

struct RankingPair {
  std::string instance_id;
  int first = 0;
  int second = 0;
  // -1 iff measure(first) < measure(second).
  int label = 1;

  bool operator==(const RankingPair&) const = default;
};

struct PairConfig {
  // Per-instance cap; 0 disables subsampling.
  int cap = 300;
  uint64_t seed = 0;
};

struct PairBuildResult {
  std::vector<RankingPair> pairs;
  std::vector<std::string> warnings;
};

// Builds all unordered candidate pairs with distinct measures, per instance,
// from Optimal candidate records. Instances are processed in order of first
// appearance; non-Optimal records and instances with fewer than two usable
// candidates are reported in `warnings`.
PairBuildResult BuildRankingPairs(std::span<const SolveRecord> records, const PairConfig& config);

// Index of the lowest score; ties go to the lowest index. Requires non-empty.
int SelectBest(std::span<const double> scores);

// Encodes one graph per candidate of an instance.
absl::StatusOr<std::vector<PreparedGraph>> EncodeCandidates(const InstanceData& data,
                                                            const LpSolution& root_lp);

// Scores every candidate and returns the argmin.
absl::StatusOr<int> SelectBestCandidate(const ModelParams& scorer, const InstanceData& data,
                                        const LpSolution& root_lp);

// Ranking dataset over the given instances. Graph indices are assigned per
// distinct (instance, candidate vars) so duplicate sets share one graph; pair
// groups are instance ordinals.
absl::StatusOr<RankingDataset> BuildRankingDataset(std::span<const InstanceData> instances,
                                                   std::span<const RankingPair> pairs);

struct ClassifierExample {
  std::string instance_id;
  int candidate = 0;
  int label = 0;
};

struct ClassifierData {
  std::vector<ClassifierExample> examples;
  ClassificationDataset dataset;
  std::vector<std::string> warnings;
};

// For each instance: the scorer's best candidate, labelled 1 iff its measure
// is strictly lower than the default measure. Instances missing an Optimal
// default or candidate record are skipped with a warning.
absl::StatusOr<ClassifierData> BuildClassifierData(const ModelParams& scorer,
                                                   std::span<const InstanceData> instances,
                                                   const RecordStore& records);

struct Summary {
  double mean = 0.0;
  double stdev = 0.0;
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
};

// Sample standard deviation; percentiles by linear interpolation between order
// statistics.
absl::StatusOr<Summary> Summarize(std::span<const double> values);
double Percentile(std::span<const double> sorted, double q);

struct EvalChoice {
  std::string instance_id;
  int scorer_candidate = 0;
  double classifier_probability = 0.0;
  bool classifier_accepts = false;
};

// Test-time decisions for each instance.
absl::StatusOr<std::vector<EvalChoice>> PlanEvaluation(const ModelParams& scorer,
                                                       const ModelParams& classifier,
                                                       std::span<const InstanceData> instances);

// The runs an evaluation needs: default plus the scorer's pick.
std::vector<SolveTask> EvaluationTasks(std::span<const InstanceData> instances,
                                       std::span<const EvalChoice> choices);

struct MethodRow {
  std::string name;
  Summary summary;
  int wins = 0;
  int ties = 0;
  int losses = 0;
};

struct InstanceOutcome {
  std::string instance_id;
  double default_measure = 0.0;
  int scorer_candidate = 0;
  double scorer_measure = 0.0;
  double classifier_probability = 0.0;
  bool classifier_accepts = false;
  double scorer_cls_measure = 0.0;
};

struct EvalReport {
  PerformanceMeasure measure = PerformanceMeasure::kNodeCount;
  std::vector<MethodRow> rows;  // default, scorer, scorer+cls
  std::vector<InstanceOutcome> instances;
  // Instances left out because a needed run is missing, with the reason.
  std::vector<std::string> skipped;
};

// Win: lower measure than default. Tie: equal measure, or the default run was
// executed (every default-row instance, and scorer+cls declines).
absl::StatusOr<EvalReport> BuildEvalReport(std::span<const InstanceData> instances,
                                           std::span<const EvalChoice> choices,
                                           const RecordStore& records);

std::string ReportToJson(const EvalReport& report);
absl::StatusOr<EvalReport> ReportFromJson(std::string_view text);
std::string ReportToTable(const EvalReport& report);

}  // namespace backdoor_mip

#endif  // BACKDOOR_MIP_PIPELINE_H_
