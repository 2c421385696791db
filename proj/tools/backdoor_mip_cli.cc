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

// Command-line entry point for the experiment lifecycle: instance generation,
// candidate sampling, run collection, model training, evaluation and reports.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "backdoor_mip/backdoor.h"
#include "backdoor_mip/bnb_solver.h"
#include "backdoor_mip/gisp.h"
#include "backdoor_mip/lp_simplex.h"
#include "backdoor_mip/mip_instance.h"
#include "backdoor_mip/model.h"
#include "backdoor_mip/pipeline.h"
#include "backdoor_mip/random.h"
#include "backdoor_mip/train.h"
#include "json.hpp"

namespace backdoor_mip {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitMissingFile = 3,
  kExitSchemaMismatch = 4,
  kExitParseError = 5,
  kExitRuntime = 6,
  kExitConflict = 7,
};

struct CliError {
  ExitCode code = kExitRuntime;
  std::string kind;
  std::string message;
};

CliError Error(ExitCode code, std::string message) {
  switch (code) {
    case kExitUsage:
      return {code, "usage", std::move(message)};
    case kExitMissingFile:
      return {code, "missing_file", std::move(message)};
    case kExitSchemaMismatch:
      return {code, "schema_mismatch", std::move(message)};
    case kExitParseError:
      return {code, "parse_error", std::move(message)};
    case kExitConflict:
      return {code, "conflict", std::move(message)};
    default:
      return {kExitRuntime, "runtime", std::move(message)};
  }
}

// Maps a status from the library to a CLI error. Only file loaders pass
// `loading` = true, so a FailedPrecondition there means a format-version
// mismatch rather than a solver precondition.
CliError FromStatus(const absl::Status& status, std::string_view context, bool loading = false) {
  std::string message = absl::StrCat(std::string(context), ": ", status.message());
  switch (status.code()) {
    case absl::StatusCode::kNotFound:
      return Error(kExitMissingFile, std::move(message));
    case absl::StatusCode::kInvalidArgument:
      return Error(loading ? kExitParseError : kExitUsage, std::move(message));
    case absl::StatusCode::kFailedPrecondition:
      return Error(loading ? kExitSchemaMismatch : kExitRuntime, std::move(message));
    case absl::StatusCode::kAlreadyExists:
      return Error(kExitConflict, std::move(message));
    default:
      return Error(kExitRuntime, std::move(message));
  }
}

class Context {
 public:
  fs::path root = ".";
  bool overwrite = false;

  fs::path Resolve(const std::string& path) const {
    fs::path p(path);
    return p.is_absolute() ? p : root / p;
  }
};

std::optional<CliError> ReadFile(const fs::path& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error(kExitMissingFile, absl::StrCat("cannot read ", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  text = buffer.str();
  return std::nullopt;
}

enum class WriteOutcome { kWritten, kUnchanged };

// Skip-or-verify: an existing file must already hold exactly `text` unless
// overwriting is allowed.
std::optional<CliError> WriteOutput(const Context& ctx, const fs::path& path,
                                    const std::string& text, WriteOutcome* outcome) {
  std::error_code ec;
  if (fs::exists(path, ec)) {
    std::string existing;
    if (auto error = ReadFile(path, existing)) return error;
    if (existing == text) {
      *outcome = WriteOutcome::kUnchanged;
      return std::nullopt;
    }
    if (!ctx.overwrite) {
      return Error(kExitConflict, absl::StrCat(path.string(),
                                               " exists with different contents; pass "
                                               "--overwrite to replace it"));
    }
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) return Error(kExitRuntime, absl::StrCat("cannot write ", path.string()));
  *outcome = WriteOutcome::kWritten;
  return std::nullopt;
}

std::optional<CliError> LoadInstance(const fs::path& path, MipInstance& instance) {
  std::string text;
  if (auto error = ReadFile(path, text)) return error;
  absl::StatusOr<MipInstance> parsed = ReadInstance(text);
  if (!parsed.ok()) return FromStatus(parsed.status(), path.string(), true);
  instance = *std::move(parsed);
  return std::nullopt;
}

std::optional<CliError> LoadModel(const fs::path& path, ModelParams& params) {
  std::string text;
  if (auto error = ReadFile(path, text)) return error;
  absl::StatusOr<ModelParams> parsed = ReadModel(text);
  if (!parsed.ok()) return FromStatus(parsed.status(), path.string(), true);
  if (parsed->feature_schema_version != kFeatureSchemaVersion) {
    return Error(kExitSchemaMismatch,
                 absl::StrCat(path.string(), ": model feature schema ",
                              parsed->feature_schema_version, ", encoder produces ",
                              kFeatureSchemaVersion));
  }
  params = *std::move(parsed);
  return std::nullopt;
}

// Instance files in a directory, sorted by file name. Candidate files are
// skipped so instances and candidates may share a directory.
std::optional<CliError> ListInstances(const fs::path& dir, std::vector<fs::path>& files) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    return Error(kExitMissingFile, absl::StrCat("instance directory ", dir.string(),
                                                " does not exist"));
  }
  for (const fs::directory_entry& entry : fs::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (name.size() > 16 && name.ends_with(".candidates.json")) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    return Error(kExitMissingFile, absl::StrCat("no instance files in ", dir.string()));
  }
  return std::nullopt;
}

fs::path CandidatePath(const fs::path& dir, const std::string& instance_id) {
  return dir / (instance_id + ".candidates.json");
}

std::optional<CliError> LoadSplit(const fs::path& instance_dir, const fs::path& candidate_dir,
                                  std::vector<InstanceData>& split) {
  std::vector<fs::path> files;
  if (auto error = ListInstances(instance_dir, files)) return error;
  for (const fs::path& file : files) {
    InstanceData data;
    if (auto error = LoadInstance(file, data.instance)) return error;
    const fs::path candidate_file = CandidatePath(candidate_dir, data.instance.id);
    std::string text;
    if (auto error = ReadFile(candidate_file, text)) return error;
    absl::StatusOr<std::vector<CandidateSet>> sets = ReadCandidates(text);
    if (!sets.ok()) return FromStatus(sets.status(), candidate_file.string(), true);
    json header = json::parse(text, nullptr, false);
    data.candidate_seed = header.at("seed").get<uint64_t>();
    for (const CandidateSet& set : *sets) {
      if (set.instance_id != data.instance.id) {
        return Error(kExitParseError, absl::StrCat(candidate_file.string(),
                                                   ": candidates belong to ", set.instance_id));
      }
    }
    data.candidates = *std::move(sets);
    split.push_back(std::move(data));
  }
  return std::nullopt;
}

std::optional<CliError> OpenRecords(const fs::path& path, std::optional<RecordStore>& store) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  absl::StatusOr<RecordStore> opened = RecordStore::Open(path.string());
  if (!opened.ok()) return FromStatus(opened.status(), path.string(), true);
  store.emplace(*std::move(opened));
  return std::nullopt;
}

// Records belonging to the split (by instance id and candidate seed), in file
// order.
std::vector<SolveRecord> SplitRecords(const RecordStore& store,
                                      const std::vector<InstanceData>& split) {
  std::set<std::pair<std::string, uint64_t>> members;
  for (const InstanceData& data : split) members.insert({data.instance.id, data.candidate_seed});
  std::vector<SolveRecord> records;
  for (const SolveRecord& record : store.records()) {
    if (members.count({record.instance_id, record.seed}) > 0) records.push_back(record);
  }
  return records;
}

void PrintJson(const json& j) { std::cout << j.dump() << "\n"; }

// ---------------------------------------------------------------------------
// Subcommands.

struct GenOptions {
  std::string preset = "toy";
  int count = 0;
  uint64_t seed = 0;
  std::string out;
  std::optional<int> vertices;
  std::optional<double> edge_probability;
  std::optional<double> revenue;
  std::optional<double> cost;
};

std::optional<CliError> RunGen(const Context& ctx, const GenOptions& options) {
  GispConfig config;
  if (options.preset != "custom") {
    absl::StatusOr<GispConfig> preset = GispPreset(options.preset);
    if (!preset.ok()) return Error(kExitUsage, std::string(preset.status().message()));
    config = *preset;
  }
  if (options.vertices) config.num_vertices = *options.vertices;
  if (options.edge_probability) config.edge_probability = *options.edge_probability;
  if (options.revenue) config.vertex_revenue = *options.revenue;
  if (options.cost) config.edge_cost = *options.cost;
  if (absl::Status status = ValidateGispConfig(config); !status.ok()) {
    return Error(kExitUsage, std::string(status.message()));
  }
  const fs::path dir = ctx.Resolve(options.out);
  int written = 0;
  int unchanged = 0;
  for (int k = 0; k < options.count; ++k) {
    GispConfig instance_config = config;
    instance_config.seed = DeriveSeed(options.seed, static_cast<uint64_t>(k));
    const std::string id = absl::StrFormat("%s_s%d_%04d", options.preset, options.seed, k);
    absl::StatusOr<MipInstance> instance = GenerateGisp(instance_config, id);
    if (!instance.ok()) return FromStatus(instance.status(), id);
    WriteOutcome outcome;
    if (auto error = WriteOutput(ctx, dir / (id + ".json"), WriteInstance(*instance), &outcome)) {
      return error;
    }
    (outcome == WriteOutcome::kWritten ? written : unchanged)++;
  }
  PrintJson({{"written", written}, {"unchanged", unchanged}, {"dir", dir.string()}});
  return std::nullopt;
}

struct SolveOptions {
  std::string instance;
  std::string priorities;
  std::string candidates;
  std::optional<int> candidate;
  int64_t node_limit = 1'000'000;
  std::optional<double> time_limit;
  std::string node_log;
};

std::optional<CliError> RunSolve(const Context& ctx, const SolveOptions& options) {
  MipInstance instance;
  if (auto error = LoadInstance(ctx.Resolve(options.instance), instance)) return error;
  PriorityMap priorities = ZeroPriorities(instance.num_vars);
  if (!options.priorities.empty()) {
    const fs::path path = ctx.Resolve(options.priorities);
    std::string text;
    if (auto error = ReadFile(path, text)) return error;
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("priority") ||
        !j["priority"].is_array()) {
      return Error(kExitParseError,
                   absl::StrCat(path.string(), ": expected {\"priority\": [int, ...]}"));
    }
    priorities.priority.clear();
    for (const json& value : j["priority"]) {
      if (!value.is_number_integer()) {
        return Error(kExitParseError, absl::StrCat(path.string(), ": non-integer priority"));
      }
      priorities.priority.push_back(value.get<int>());
    }
    if (static_cast<int>(priorities.priority.size()) != instance.num_vars) {
      return Error(kExitParseError,
                   absl::StrCat(path.string(), ": ", priorities.priority.size(),
                                " priorities for ", instance.num_vars, " variables"));
    }
  } else if (!options.candidates.empty()) {
    const fs::path path = ctx.Resolve(options.candidates);
    std::string text;
    if (auto error = ReadFile(path, text)) return error;
    absl::StatusOr<std::vector<CandidateSet>> sets = ReadCandidates(text);
    if (!sets.ok()) return FromStatus(sets.status(), path.string(), true);
    const int k = options.candidate.value_or(0);
    if (k < 0 || k >= static_cast<int>(sets->size())) {
      return Error(kExitUsage, absl::StrCat("--candidate ", k, " out of range"));
    }
    absl::StatusOr<PriorityMap> mapped = PrioritiesFrom((*sets)[k], instance.num_vars);
    if (!mapped.ok()) return FromStatus(mapped.status(), path.string());
    priorities = *std::move(mapped);
  }
  BnbConfig config;
  config.node_limit = options.node_limit;
  config.wall_time_limit = options.time_limit;
  config.record_node_log = !options.node_log.empty();
  absl::StatusOr<BnbResult> result = SolveMip(instance, priorities, config);
  if (!result.ok()) return FromStatus(result.status(), instance.id);
  if (!options.node_log.empty()) {
    const fs::path path = ctx.Resolve(options.node_log);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << NodeLogToJsonLines(*result);
    if (!out) return Error(kExitRuntime, absl::StrCat("cannot write ", path.string()));
  }
  PrintJson({{"instance", instance.id},
             {"status", std::string(BnbStatusToString(result->status))},
             {"objective", result->objective ? json(*result->objective) : json(nullptr)},
             {"best_bound", result->best_bound},
             {"node_count", result->node_count}});
  return std::nullopt;
}

struct SampleOptions {
  std::string instances;
  std::string out;
  int count = 50;
  double fraction = 0.01;
  uint64_t seed = 0;
};

std::optional<CliError> RunSample(const Context& ctx, const SampleOptions& options) {
  std::vector<fs::path> files;
  if (auto error = ListInstances(ctx.Resolve(options.instances), files)) return error;
  const fs::path out_dir = ctx.Resolve(options.out);
  int written = 0;
  int unchanged = 0;
  for (const fs::path& file : files) {
    MipInstance instance;
    if (auto error = LoadInstance(file, instance)) return error;
    const LpSolution root = SolveLp(instance);
    const uint64_t seed = DeriveSeed(options.seed, StableHash(instance.id));
    absl::StatusOr<std::vector<CandidateSet>> sets =
        SampleCandidates(instance, root, options.count, options.fraction, seed);
    if (!sets.ok()) return FromStatus(sets.status(), instance.id);
    WriteOutcome outcome;
    if (auto error = WriteOutput(ctx, CandidatePath(out_dir, instance.id),
                                 WriteCandidates(instance.id, seed, *sets), &outcome)) {
      return error;
    }
    (outcome == WriteOutcome::kWritten ? written : unchanged)++;
  }
  PrintJson({{"written", written}, {"unchanged", unchanged}, {"dir", out_dir.string()}});
  return std::nullopt;
}

struct CollectOptions {
  std::string instances;
  std::string candidates;
  std::string records;
  int jobs = 1;
  int64_t node_limit = 1'000'000;
};

std::optional<CliError> RunCollect(const Context& ctx, const CollectOptions& options) {
  std::vector<InstanceData> split;
  if (auto error = LoadSplit(ctx.Resolve(options.instances),
                             ctx.Resolve(options.candidates.empty() ? options.instances
                                                                    : options.candidates),
                             split)) {
    return error;
  }
  std::optional<RecordStore> store;
  if (auto error = OpenRecords(ctx.Resolve(options.records), store)) return error;
  CollectConfig config;
  config.jobs = options.jobs;
  config.bnb.node_limit = options.node_limit;
  absl::StatusOr<CollectStats> stats = CollectRuns(AllSettings(split), config, *store);
  if (!stats.ok()) return FromStatus(stats.status(), "collect");
  PrintJson({{"solved", stats->solved},
             {"skipped", stats->skipped},
             {"non_optimal", stats->non_optimal},
             {"records", store->path()}});
  return std::nullopt;
}

struct TrainOptions {
  std::string instances;
  std::string candidates;
  std::string records;
  std::string scorer;  // classifier only
  std::string out;
  uint64_t seed = 0;
  int epochs = 50;
  double learning_rate = 1e-3;
  int batch_size = 32;
  double max_grad_norm = 1.0;
  double margin = 0.1;
  int pair_cap = 300;
  int hidden = 32;
  int heads = 4;
  int rounds = 2;
};

TrainConfig MakeTrainConfig(const TrainOptions& options) {
  TrainConfig config;
  config.hyper.hidden = options.hidden;
  config.hyper.heads = options.heads;
  config.hyper.rounds = options.rounds;
  config.margin = options.margin;
  config.learning_rate = options.learning_rate;
  config.epochs = options.epochs;
  config.batch_size = options.batch_size;
  config.max_grad_norm = options.max_grad_norm;
  config.seed = options.seed;
  return config;
}

void PrintWarnings(const std::vector<std::string>& warnings) {
  for (const std::string& warning : warnings) {
    std::cerr << json({{"warning", warning}}).dump() << "\n";
  }
}

std::optional<CliError> FinishTraining(const Context& ctx, const fs::path& out,
                                       const TrainResult& result, double accuracy,
                                       std::string_view accuracy_name, double seconds) {
  WriteOutcome outcome;
  if (auto error = WriteOutput(ctx, out, WriteModel(result.params), &outcome)) return error;
  PrintJson({{"model", out.string()},
             {"unchanged", outcome == WriteOutcome::kUnchanged},
             {std::string(accuracy_name), accuracy},
             {"final_loss", result.loss_history.empty() ? 0.0 : result.loss_history.back()},
             {"loss_history", result.loss_history},
             {"seconds", seconds}});
  return std::nullopt;
}

bool SkipExisting(const Context& ctx, const fs::path& out) {
  std::error_code ec;
  if (ctx.overwrite || !fs::exists(out, ec)) return false;
  PrintJson({{"model", out.string()}, {"skipped", true}});
  return true;
}

std::optional<CliError> RunTrainScorer(const Context& ctx, const TrainOptions& options) {
  const fs::path out = ctx.Resolve(options.out);
  std::vector<InstanceData> split;
  if (auto error = LoadSplit(ctx.Resolve(options.instances),
                             ctx.Resolve(options.candidates.empty() ? options.instances
                                                                    : options.candidates),
                             split)) {
    return error;
  }
  std::optional<RecordStore> store;
  if (auto error = OpenRecords(ctx.Resolve(options.records), store)) return error;
  if (SkipExisting(ctx, out)) return std::nullopt;
  const auto start = std::chrono::steady_clock::now();
  PairBuildResult pairs = BuildRankingPairs(SplitRecords(*store, split),
                                            {options.pair_cap, DeriveSeed(options.seed, 1)});
  PrintWarnings(pairs.warnings);
  if (pairs.pairs.empty()) {
    return Error(kExitRuntime, "no ranking pairs: collect runs for this split first");
  }
  absl::StatusOr<RankingDataset> dataset = BuildRankingDataset(split, pairs.pairs);
  if (!dataset.ok()) return FromStatus(dataset.status(), "ranking dataset");
  absl::StatusOr<TrainResult> result = TrainScorer(*dataset, MakeTrainConfig(options));
  if (!result.ok()) return FromStatus(result.status(), "train-scorer");
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return FinishTraining(ctx, out, *result, PairwiseAccuracy(result->params, *dataset),
                        "pairwise_accuracy", seconds);
}

std::optional<CliError> RunTrainClassifier(const Context& ctx, const TrainOptions& options) {
  const fs::path out = ctx.Resolve(options.out);
  std::vector<InstanceData> split;
  if (auto error = LoadSplit(ctx.Resolve(options.instances),
                             ctx.Resolve(options.candidates.empty() ? options.instances
                                                                    : options.candidates),
                             split)) {
    return error;
  }
  ModelParams scorer;
  if (auto error = LoadModel(ctx.Resolve(options.scorer), scorer)) return error;
  std::optional<RecordStore> store;
  if (auto error = OpenRecords(ctx.Resolve(options.records), store)) return error;
  if (SkipExisting(ctx, out)) return std::nullopt;
  const auto start = std::chrono::steady_clock::now();
  absl::StatusOr<ClassifierData> data = BuildClassifierData(scorer, split, *store);
  if (!data.ok()) return FromStatus(data.status(), "classifier dataset");
  PrintWarnings(data->warnings);
  if (data->examples.empty()) {
    return Error(kExitRuntime, "no classifier examples: collect runs for this split first");
  }
  absl::StatusOr<TrainResult> result = TrainClassifier(data->dataset, MakeTrainConfig(options));
  if (!result.ok()) return FromStatus(result.status(), "train-classifier");
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return FinishTraining(ctx, out, *result, ClassificationAccuracy(result->params, data->dataset),
                        "training_accuracy", seconds);
}

struct EvaluateOptions {
  std::string instances;
  std::string candidates;
  std::string records;
  std::string scorer;
  std::string classifier;
  std::string out;
  int jobs = 1;
  int64_t node_limit = 1'000'000;
};

fs::path TablePath(const fs::path& report) {
  fs::path table = report;
  table.replace_extension(".txt");
  return table;
}

std::optional<CliError> RunEvaluate(const Context& ctx, const EvaluateOptions& options) {
  std::vector<InstanceData> split;
  if (auto error = LoadSplit(ctx.Resolve(options.instances),
                             ctx.Resolve(options.candidates.empty() ? options.instances
                                                                    : options.candidates),
                             split)) {
    return error;
  }
  ModelParams scorer;
  ModelParams classifier;
  if (auto error = LoadModel(ctx.Resolve(options.scorer), scorer)) return error;
  if (auto error = LoadModel(ctx.Resolve(options.classifier), classifier)) return error;
  std::optional<RecordStore> store;
  if (auto error = OpenRecords(ctx.Resolve(options.records), store)) return error;

  absl::StatusOr<std::vector<EvalChoice>> choices = PlanEvaluation(scorer, classifier, split);
  if (!choices.ok()) return FromStatus(choices.status(), "evaluate");
  CollectConfig config;
  config.jobs = options.jobs;
  config.bnb.node_limit = options.node_limit;
  const std::vector<SolveTask> tasks = EvaluationTasks(split, *choices);
  absl::StatusOr<CollectStats> stats = CollectRuns(tasks, config, *store);
  if (!stats.ok()) return FromStatus(stats.status(), "evaluate");
  absl::StatusOr<EvalReport> report = BuildEvalReport(split, *choices, *store);
  if (!report.ok()) return FromStatus(report.status(), "evaluate");
  PrintWarnings(report->skipped);

  const fs::path out = ctx.Resolve(options.out);
  WriteOutcome outcome;
  if (auto error = WriteOutput(ctx, out, ReportToJson(*report), &outcome)) return error;
  if (auto error = WriteOutput(ctx, TablePath(out), ReportToTable(*report), &outcome)) {
    return error;
  }
  std::cout << ReportToTable(*report);
  return std::nullopt;
}

struct ReportOptions {
  std::string report;
  std::string format = "table";
};

std::optional<CliError> RunReport(const Context& ctx, const ReportOptions& options) {
  const fs::path path = ctx.Resolve(options.report);
  std::string text;
  if (auto error = ReadFile(path, text)) return error;
  absl::StatusOr<EvalReport> report = ReportFromJson(text);
  if (!report.ok()) return FromStatus(report.status(), path.string(), true);
  std::cout << (options.format == "json" ? ReportToJson(*report) : ReportToTable(*report));
  return std::nullopt;
}

int Fail(const CliError& error) {
  std::cerr << json({{"error", error.kind}, {"message", error.message}}).dump() << "\n";
  return error.code;
}

int Main(int argc, char** argv) {
  CLI::App app{"Learn and evaluate pseudo-backdoors for mixed integer programs."};
  app.require_subcommand(1);
  Context ctx;
  std::string data_root;
  if (const char* env = std::getenv("BACKDOOR_MIP_DATA"); env != nullptr) data_root = env;
  app.add_option("--data-root", data_root,
                 "Directory that relative paths resolve against (default: $BACKDOOR_MIP_DATA, "
                 "else the working directory)");
  app.add_flag("--overwrite", ctx.overwrite,
               "Replace existing outputs whose contents differ instead of failing");

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-instances", "Generate GISP instance files");
  gen_cmd->add_option("--preset", gen.preset, "toy, easy, hard or custom")
      ->check(CLI::IsMember({"toy", "easy", "hard", "custom"}));
  gen_cmd->add_option("--count", gen.count, "Number of instances")->required()->check(
      CLI::NonNegativeNumber);
  gen_cmd->add_option("--seed", gen.seed, "Base seed")->required();
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--vertices", gen.vertices, "Override the vertex count");
  gen_cmd->add_option("--edge-probability", gen.edge_probability, "Override the edge probability");
  gen_cmd->add_option("--revenue", gen.revenue, "Override the vertex revenue");
  gen_cmd->add_option("--cost", gen.cost, "Override the edge removal cost");

  SolveOptions solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve one instance by branch and bound");
  solve_cmd->add_option("--instance", solve.instance, "Instance file")->required();
  auto* priorities_opt =
      solve_cmd->add_option("--priorities", solve.priorities, "Priority file {\"priority\": [...]}");
  auto* candidates_opt =
      solve_cmd->add_option("--candidates", solve.candidates, "Candidate file");
  priorities_opt->excludes(candidates_opt);
  solve_cmd->add_option("--candidate", solve.candidate, "Candidate index within --candidates")
      ->needs(candidates_opt);
  solve_cmd->add_option("--node-limit", solve.node_limit, "Node limit");
  solve_cmd->add_option("--time-limit", solve.time_limit, "Wall-clock limit in seconds");
  solve_cmd->add_option("--node-log", solve.node_log, "Write a JSON-lines node log here");

  SampleOptions sample;
  CLI::App* sample_cmd = app.add_subcommand("sample", "Sample candidate pseudo-backdoors");
  sample_cmd->add_option("--instances", sample.instances, "Instance directory")->required();
  sample_cmd->add_option("--out", sample.out, "Candidate directory")->required();
  sample_cmd->add_option("--count", sample.count, "Candidates per instance");
  sample_cmd->add_option("--fraction", sample.fraction, "Fraction of integer variables per set");
  sample_cmd->add_option("--seed", sample.seed, "Base seed")->required();

  CollectOptions collect;
  CLI::App* collect_cmd =
      app.add_subcommand("collect", "Solve default and candidate settings into a record store");
  collect_cmd->add_option("--instances", collect.instances, "Instance directory")->required();
  collect_cmd->add_option("--candidates", collect.candidates,
                          "Candidate directory (default: the instance directory)");
  collect_cmd->add_option("--records", collect.records, "JSON-lines record store")->required();
  collect_cmd->add_option("--jobs", collect.jobs, "Concurrent solves (0: all cores)")
      ->check(CLI::NonNegativeNumber);
  collect_cmd->add_option("--node-limit", collect.node_limit, "Node limit per solve");

  TrainOptions scorer_opts;
  TrainOptions classifier_opts;
  auto add_train_flags = [](CLI::App* cmd, TrainOptions& o) {
    cmd->add_option("--instances", o.instances, "Instance directory")->required();
    cmd->add_option("--candidates", o.candidates,
                    "Candidate directory (default: the instance directory)");
    cmd->add_option("--records", o.records, "JSON-lines record store")->required();
    cmd->add_option("--out", o.out, "Model file to write")->required();
    cmd->add_option("--seed", o.seed, "Training seed")->required();
    cmd->add_option("--epochs", o.epochs, "Training epochs");
    cmd->add_option("--learning-rate", o.learning_rate, "Adam learning rate");
    cmd->add_option("--batch-size", o.batch_size, "Examples per optimizer step");
    cmd->add_option("--max-grad-norm", o.max_grad_norm,
                    "Clip the global gradient norm to this value (0: no clipping)");
    cmd->add_option("--hidden", o.hidden, "Hidden width");
    cmd->add_option("--heads", o.heads, "Attention heads");
    cmd->add_option("--rounds", o.rounds, "Message-passing rounds");
  };
  CLI::App* scorer_cmd = app.add_subcommand("train-scorer", "Train the pseudo-backdoor scorer");
  add_train_flags(scorer_cmd, scorer_opts);
  scorer_cmd->add_option("--margin", scorer_opts.margin, "Margin of the ranking loss");
  scorer_cmd->add_option("--pair-cap", scorer_opts.pair_cap,
                         "Maximum ranking pairs per instance (0: no cap)");
  CLI::App* classifier_cmd =
      app.add_subcommand("train-classifier", "Train the accept/decline classifier");
  add_train_flags(classifier_cmd, classifier_opts);
  classifier_cmd->add_option("--scorer", classifier_opts.scorer, "Trained scorer model")
      ->required();

  EvaluateOptions evaluate;
  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "Compare default, scorer and scorer+cls on a test split");
  evaluate_cmd->add_option("--instances", evaluate.instances, "Instance directory")->required();
  evaluate_cmd->add_option("--candidates", evaluate.candidates,
                           "Candidate directory (default: the instance directory)");
  evaluate_cmd->add_option("--records", evaluate.records, "JSON-lines record store")->required();
  evaluate_cmd->add_option("--scorer", evaluate.scorer, "Scorer model")->required();
  evaluate_cmd->add_option("--classifier", evaluate.classifier, "Classifier model")->required();
  evaluate_cmd->add_option("--out", evaluate.out,
                           "Report JSON; the table goes next to it with a .txt extension")
      ->required();
  evaluate_cmd->add_option("--jobs", evaluate.jobs, "Concurrent solves (0: all cores)")
      ->check(CLI::NonNegativeNumber);
  evaluate_cmd->add_option("--node-limit", evaluate.node_limit, "Node limit per solve");

  ReportOptions report;
  CLI::App* report_cmd = app.add_subcommand("report", "Print a saved evaluation report");
  report_cmd->add_option("--report", report.report, "Report JSON")->required();
  report_cmd->add_option("--format", report.format, "table or json")
      ->check(CLI::IsMember({"table", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Fail(Error(kExitUsage, e.what()));
  }
  if (!data_root.empty()) ctx.root = data_root;

  std::optional<CliError> error;
  try {
    if (*gen_cmd) error = RunGen(ctx, gen);
    if (*solve_cmd) error = RunSolve(ctx, solve);
    if (*sample_cmd) error = RunSample(ctx, sample);
    if (*collect_cmd) error = RunCollect(ctx, collect);
    if (*scorer_cmd) error = RunTrainScorer(ctx, scorer_opts);
    if (*classifier_cmd) error = RunTrainClassifier(ctx, classifier_opts);
    if (*evaluate_cmd) error = RunEvaluate(ctx, evaluate);
    if (*report_cmd) error = RunReport(ctx, report);
  } catch (const std::exception& e) {
    error = Error(kExitRuntime, e.what());
  }
  return error ? Fail(*error) : kExitOk;
}

}  // namespace
}  // namespace backdoor_mip

int main(int argc, char** argv) { return backdoor_mip::Main(argc, argv); }
