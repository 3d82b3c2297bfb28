// Copyright 2026 The RankGAM Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rankgam/cli.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <regex>
#include <sstream>

#include <CLI11.hpp>

#include "rankgam/common.h"
#include "rankgam/dataset.h"
#include "rankgam/distill.h"
#include "rankgam/importance.h"
#include "rankgam/metrics.h"
#include "rankgam/model.h"
#include "rankgam/rng.h"
#include "rankgam/serialize.h"
#include "rankgam/synthetic.h"
#include "rankgam/training.h"

namespace rankgam {
namespace {

namespace fs = std::filesystem;

constexpr const char* kModelFile = "model.rgam";
constexpr const char* kDistilledFile = "distilled.rgam";
constexpr const char* kConfigFile = "config.toml";

void RequireFile(const std::string& path, const std::string& what) {
  if (path.empty()) throw UsageError("missing required " + what + " path");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw DataError(what + " file not found: " + path);
  }
}

void RequireOptionalFile(const std::string& path, const std::string& what) {
  if (!path.empty()) RequireFile(path, what);
}

fs::path PrepareOutputDir(const std::string& dir) {
  if (dir.empty()) throw UsageError("missing --output-dir");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw DataError("cannot create output directory: " + dir);
  }
  return fs::path(dir);
}

std::ofstream OpenOutput(const fs::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void FinishOutput(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw DataError("failed writing " + path.string());
}

template <typename Writer>
void WriteFile(const fs::path& path, Writer&& writer) {
  std::ofstream out = OpenOutput(path);
  writer(out);
  FinishOutput(out, path);
}

RankingDataset LoadData(const std::string& path, const std::string& context,
                        FeatureTransform transform,
                        std::optional<size_t> feature_hint) {
  RankingDataset data = ReadLetorFile(path, feature_hint);
  if (!context.empty()) data = ReadContextSidecarFile(context, data);
  return ApplyTransform(data, transform);
}

AnyModel LoadModelChecked(const std::string& path) {
  RequireFile(path, "model");
  return LoadModelFile(path);
}

std::vector<double> TrimmedValues(const RankingDataset& data, size_t j) {
  std::vector<double> xs;
  for (const auto& list : data.lists()) {
    for (size_t i = 0; i < list.size(); ++i) xs.push_back(list.feature(i, j));
  }
  std::sort(xs.begin(), xs.end());
  if (xs.size() >= 20) {
    const size_t trim = xs.size() / 20;
    xs = std::vector<double>(xs.begin() + trim, xs.end() - trim);
  }
  return xs;
}

std::vector<size_t> SelectFeatures(const RunConfig& config, size_t n) {
  std::vector<size_t> selected;
  if (config.features.empty()) {
    for (size_t j = 0; j < n; ++j) selected.push_back(j);
    return selected;
  }
  for (size_t f : config.features) {
    if (f == 0 || f > n) {
      throw UsageError("feature " + std::to_string(f) + " out of range 1.." +
                       std::to_string(n));
    }
    selected.push_back(f - 1);
  }
  return selected;
}

int CmdTrain(const RunConfig& config, std::ostream& out) {
  RequireFile(config.train_path, "train");
  RequireFile(config.valid_path, "valid");
  RequireOptionalFile(config.test_path, "test");
  RequireOptionalFile(config.train_context, "train context");
  RequireOptionalFile(config.valid_context, "valid context");
  RequireOptionalFile(config.test_context, "test context");

  ModelConfig model_config;
  model_config.mode = ParseModelMode(config.mode);
  model_config.item_hidden = config.item_hidden;
  model_config.context_hidden = config.context_hidden;
  model_config.embedding_dim = config.embedding_dim;
  model_config.seed = config.seed;

  TrainConfig train_config;
  train_config.loss = ParseLossKind(config.loss, config.temperature);
  train_config.learning_rate = config.learning_rate;
  train_config.epochs = config.epochs;
  train_config.batch_size = config.batch_size;
  train_config.seed = MixSeed(config.seed, 1);
  train_config.adagrad.initial_accumulator = config.initial_accumulator;
  train_config.clip_norm = config.clip_norm;
  train_config.Validate();

  const FeatureTransform transform = ParseFeatureTransform(config.transform);
  const fs::path dir = PrepareOutputDir(config.output_dir);

  const RankingDataset train =
      LoadData(config.train_path, config.train_context, transform, {});
  const size_t n = train.schema().num_features;
  const RankingDataset valid =
      LoadData(config.valid_path, config.valid_context, transform, n);
  if (model_config.mode != ModelMode::kContextAbsent &&
      train.schema().num_context() == 0) {
    throw UsageError("mode " + config.mode + " needs a train context sidecar");
  }

  GamModel model(train.schema(), model_config);
  TrainResult result = Train(std::move(model), train, valid, train_config);

  SaveModelFile(result.model, (dir / kModelFile).string());
  WriteFile(dir / "metrics.csv",
            [&](std::ostream& s) { WriteMetricsLog(result.log, s); });
  out << "best_epoch=" << result.best_epoch
      << " valid_ndcg5=" << FormatDouble(result.best_valid_ndcg5) << '\n';

  if (!config.test_path.empty()) {
    const RankingDataset test =
        LoadData(config.test_path, config.test_context, transform, n);
    const MetricReport report = Evaluate(result.model, test, config.cutoffs);
    WriteFile(dir / "test_metrics.csv",
              [&](std::ostream& s) { WriteMetricReportCsv(report, s); });
  }
  return kExitOk;
}

int CmdEvaluate(const RunConfig& config, std::ostream& out) {
  RequireFile(config.data_path, "data");
  RequireOptionalFile(config.data_context, "data context");
  const AnyModel model = LoadModelChecked(config.model_path);
  const FeatureTransform transform = ParseFeatureTransform(config.transform);
  const fs::path dir = PrepareOutputDir(config.output_dir);
  const Ranker& ranker = AsRanker(model);
  const RankingDataset data = LoadData(config.data_path, config.data_context,
                                       transform, ranker.num_features());
  const MetricReport report = Evaluate(ranker, data, config.cutoffs);
  WriteMetricReportCsv(report, out);
  WriteFile(dir / "eval_metrics.csv",
            [&](std::ostream& s) { WriteMetricReportCsv(report, s); });
  return kExitOk;
}

int CmdDistill(const RunConfig& config, std::ostream& out) {
  RequireFile(config.train_path, "train");
  RequireOptionalFile(config.train_context, "train context");
  RequireOptionalFile(config.latency_data, "latency data");
  RequireOptionalFile(config.latency_context, "latency context");
  const AnyModel loaded = LoadModelChecked(config.model_path);
  if (KindOf(loaded) != ModelKind::kNeural) {
    throw UsageError("model is already distilled: " + config.model_path);
  }
  const GamModel& model = std::get<GamModel>(loaded);
  const FeatureTransform transform = ParseFeatureTransform(config.transform);
  const fs::path dir = PrepareOutputDir(config.output_dir);
  const RankingDataset train = LoadData(config.train_path, config.train_context,
                                        transform, model.num_features());

  DistillConfig distill_config;
  distill_config.num_knots = config.num_knots;
  distill_config.sample_cap = config.sample_cap;
  distill_config.seed = config.seed;
  const DistilledModel distilled = DistillModel(model, train, distill_config);

  SaveModelFile(distilled, (dir / kDistilledFile).string());
  WriteFile(dir / "knots.csv",
            [&](std::ostream& s) { WriteKnotsCsv(distilled, s); });

  if (!config.latency_data.empty()) {
    const RankingDataset bench =
        LoadData(config.latency_data, config.latency_context, transform,
                 model.num_features());
    const LatencyReport report = BenchmarkInference(
        model, distilled, bench, config.latency_repetitions);
    WriteLatencyCsv(report, out);
    WriteFile(dir / "latency.csv",
              [&](std::ostream& s) { WriteLatencyCsv(report, s); });
  }
  return kExitOk;
}

int CmdImportance(const RunConfig& config, std::ostream& out) {
  RequireFile(config.data_path, "data");
  RequireOptionalFile(config.data_context, "data context");
  const AnyModel model = LoadModelChecked(config.model_path);
  const FeatureTransform transform = ParseFeatureTransform(config.transform);
  const fs::path dir = PrepareOutputDir(config.output_dir);
  const Ranker& ranker = AsRanker(model);
  const RankingDataset data = LoadData(config.data_path, config.data_context,
                                       transform, ranker.num_features());
  const ImportanceReport report =
      ComputeImportance(ranker, data, config.repetitions, config.seed);
  WriteFile(dir / "importance.csv",
            [&](std::ostream& s) { WriteImportanceCsv(report, s); });
  WriteFile(dir / "importance_scatter.csv",
            [&](std::ostream& s) { WriteScatterCsv(report, s); });
  out << "spearman="
      << (report.correlation ? FormatDouble(*report.correlation) : "undefined")
      << '\n';
  return kExitOk;
}

int CmdExportCurves(const RunConfig& config, std::ostream& out) {
  RequireFile(config.data_path, "data");
  RequireOptionalFile(config.data_context, "data context");
  if (config.grid_size < 2) throw UsageError("grid size must be >= 2");
  const AnyModel model = LoadModelChecked(config.model_path);
  const FeatureTransform transform = ParseFeatureTransform(config.transform);
  const fs::path dir = PrepareOutputDir(config.output_dir);
  const Ranker& ranker = AsRanker(model);
  const RankingDataset data = LoadData(config.data_path, config.data_context,
                                       transform, ranker.num_features());
  ranker.CheckCompatible(data.schema());

  size_t written = 0;
  for (size_t j : SelectFeatures(config, ranker.num_features())) {
    const std::vector<double> xs = TrimmedValues(data, j);
    if (xs.empty()) throw DataError("dataset has no items");
    const double lo = xs.front();
    const double hi = xs.back();
    std::vector<double> grid(config.grid_size);
    for (size_t g = 0; g < grid.size(); ++g) {
      const double t = static_cast<double>(g) / static_cast<double>(grid.size() - 1);
      grid[g] = g + 1 == grid.size() ? hi : lo + t * (hi - lo);
    }
    const auto curve = ExportCurve(ranker, j, grid);
    WriteFile(dir / ("curve_f" + std::to_string(j + 1) + ".csv"),
              [&](std::ostream& s) {
                s << "x,f\n";
                for (const auto& p : curve) {
                  s << FormatDouble(p.x) << ',' << FormatDouble(p.f) << '\n';
                }
              });
    ++written;
  }

  if (ranker.mode() == ModelMode::kContextPresent) {
    const Schema& schema = ranker.schema();
    for (size_t k = 0; k < schema.num_context(); ++k) {
      if (schema.context_kinds[k] != FeatureKind::kCategorical) continue;
      const auto rows = ExportWeightTable(ranker, k);
      WriteFile(dir / ("weights_context" + std::to_string(k + 1) + ".csv"),
                [&](std::ostream& s) {
                  s << "context_value";
                  for (size_t j = 0; j < ranker.num_features(); ++j) {
                    s << ",w_" << (j + 1);
                  }
                  s << '\n';
                  for (const auto& row : rows) {
                    s << row.context_value;
                    for (double w : row.weights) s << ',' << FormatDouble(w);
                    s << '\n';
                  }
                });
      ++written;
    }
  }
  out << "wrote " << written << " tables to " << dir.string() << '\n';
  return kExitOk;
}

int CmdSynth(const RunConfig& config, std::ostream& out) {
  SyntheticSpec spec;
  spec.num_features = config.num_features;
  spec.num_context = config.num_context;
  spec.num_lists = config.num_lists;
  spec.items_per_list = config.items_per_list;
  spec.seed = config.seed;
  spec.context_interaction = config.context_interaction;
  spec.num_context_values = config.num_context_values;
  spec.noise = config.noise;
  SplitFractions fractions{config.train_fraction, config.valid_fraction,
                           config.test_fraction};
  SplitSizes(config.num_lists, fractions);  // validates before any output

  const fs::path dir = PrepareOutputDir(config.output_dir);
  const SyntheticData data = GenerateSynthetic(spec);
  const DatasetSplit split = Split(data.dataset, fractions, MixSeed(config.seed, 3));

  const std::pair<const char*, const RankingDataset*> parts[] = {
      {"train", &split.train}, {"valid", &split.validation}, {"test", &split.test}};
  for (const auto& [name, part] : parts) {
    WriteFile(dir / (std::string(name) + ".txt"),
              [&](std::ostream& s) { WriteLetor(*part, s); });
    if (spec.num_context > 0) {
      WriteFile(dir / (std::string(name) + ".ctx.tsv"),
                [&](std::ostream& s) { WriteContextSidecar(*part, s); });
    }
  }
  WriteFile(dir / "planted.json",
            [&](std::ostream& s) { s << data.planted.ToJson() << '\n'; });
  out << "lists train=" << split.train.size()
      << " valid=" << split.validation.size() << " test=" << split.test.size()
      << '\n';
  return kExitOk;
}

const char* KindLabel(int code) {
  switch (code) {
    case kExitUsage: return "usage";
    case kExitData: return "data";
    case kExitNumeric: return "numeric";
    default: return "internal";
  }
}

void PrintError(std::ostream& err, int code, const std::string& message) {
  std::string line = message;
  std::replace(line.begin(), line.end(), '\n', ' ');
  std::replace(line.begin(), line.end(), '\r', ' ');
  err << "error: " << KindLabel(code) << ": " << line << '\n';
}

void AddOutputDir(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--output-dir,-o", c.output_dir, "Directory for all outputs")
      ->required();
}

void AddTransform(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--transform", c.transform,
                  "Item feature transform (identity|log1p)")
      ->capture_default_str();
}

void AddEvalData(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--model", c.model_path, "Model container")->required();
  cmd->add_option("--data", c.data_path, "LETOR data file")->required();
  cmd->add_option("--data-context", c.data_context, "Context sidecar (TSV)");
  AddTransform(cmd, c);
  AddOutputDir(cmd, c);
}

// Resolved settings of the chosen subcommand as a TOML section that
// --config accepts back. Unset options are omitted.
std::string ConfigSnapshot(const CLI::App& command) {
  std::istringstream lines(command.config_to_str(true, false));
  std::string snapshot = "[" + command.get_name() + "]\n";
  std::string line;
  while (std::getline(lines, line)) {
    if (line.size() >= 3 && line.compare(line.size() - 3, 3, "=\"\"") == 0) {
      continue;
    }
    // Defaults of list options render as quoted strings; write them the way
    // parsed values appear so snapshots of equal runs compare equal.
    static const std::regex kQuotedList(R"re(^([^=]+)="\[(.*)\]"$)re");
    std::smatch match;
    if (std::regex_match(line, match, kQuotedList)) {
      line = match[1].str() + "=[" +
             std::regex_replace(match[2].str(), std::regex(",\\s*"), ", ") + "]";
    }
    snapshot += line + '\n';
  }
  return snapshot;
}

}  // namespace

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return kExitUsage;
  if (dynamic_cast<const DataError*>(&e)) return kExitData;
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
  if (dynamic_cast<const CLI::Error*>(&e)) return kExitUsage;
  return kExitData;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  RunConfig c;
  CLI::App app{"Neural ranking GAMs: training, evaluation, distillation", "rankgam"};
  app.set_config("--config", "", "TOML config file; flags override it");
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "Train a neural ranking GAM");
  train->add_option("--train", c.train_path, "Training LETOR file")->required();
  train->add_option("--valid", c.valid_path, "Validation LETOR file")->required();
  train->add_option("--test", c.test_path, "Optional test LETOR file");
  train->add_option("--train-context", c.train_context, "Training context sidecar");
  train->add_option("--valid-context", c.valid_context, "Validation context sidecar");
  train->add_option("--test-context", c.test_context, "Test context sidecar");
  train->add_option("--mode", c.mode,
                    "context-absent|context-present|naive-context")
      ->capture_default_str();
  train->add_option("--item-hidden", c.item_hidden, "Item sub-network widths")
      ->delimiter(',')
      ->capture_default_str();
  train->add_option("--context-hidden", c.context_hidden, "Context tower widths")
      ->delimiter(',')
      ->capture_default_str();
  train->add_option("--embedding-dim", c.embedding_dim,
                    "Embedding size for categorical context")
      ->capture_default_str();
  train->add_option("--loss", c.loss, "approx_ndcg|mse")->capture_default_str();
  train->add_option("--temperature", c.temperature, "Approx-NDCG temperature")
      ->capture_default_str();
  train->add_option("--lr", c.learning_rate, "AdaGrad learning rate")
      ->capture_default_str();
  train->add_option("--epochs", c.epochs, "Training epochs")->capture_default_str();
  train->add_option("--batch-size", c.batch_size, "Lists per update")
      ->capture_default_str();
  train->add_option("--initial-accumulator", c.initial_accumulator,
                    "AdaGrad initial accumulator")
      ->capture_default_str();
  train->add_option("--clip-norm", c.clip_norm, "Global gradient-norm clip");
  train->add_option("--k", c.cutoffs, "NDCG cutoffs for the test report")
      ->delimiter(',')
      ->capture_default_str();
  train->add_option("--seed", c.seed, "Seed for initialization and shuffling")
      ->capture_default_str();
  AddTransform(train, c);
  AddOutputDir(train, c);

  auto* evaluate = app.add_subcommand("evaluate", "Report NDCG@k of a model");
  evaluate->add_option("--k", c.cutoffs, "NDCG cutoffs, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  AddEvalData(evaluate, c);

  auto* distill = app.add_subcommand("distill", "Distill sub-networks into PWL functions");
  distill->add_option("--model", c.model_path, "Neural model container")->required();
  distill->add_option("--train", c.train_path, "Training LETOR file")->required();
  distill->add_option("--train-context", c.train_context, "Training context sidecar");
  distill->add_option("--knots", c.num_knots, "Knots per feature (K)")
      ->capture_default_str();
  distill->add_option("--sample-cap", c.sample_cap, "Per-feature sample cap (M)")
      ->capture_default_str();
  distill->add_option("--seed", c.seed, "Subsampling seed")->capture_default_str();
  distill->add_option("--latency-data", c.latency_data,
                      "Optional LETOR file for the latency benchmark");
  distill->add_option("--latency-context", c.latency_context,
                      "Context sidecar for the latency data");
  distill->add_option("--latency-repetitions", c.latency_repetitions,
                      "Timed passes per model")
      ->capture_default_str();
  AddTransform(distill, c);
  AddOutputDir(distill, c);

  auto* importance = app.add_subcommand("importance", "Permutation importance and effective range");
  importance->add_option("--repetitions", c.repetitions, "Shuffles per feature (R)")
      ->capture_default_str();
  importance->add_option("--seed", c.seed, "Shuffle seed")->capture_default_str();
  AddEvalData(importance, c);

  auto* curves = app.add_subcommand("export-curves", "Export f_j curves and context weight tables");
  curves->add_option("--features", c.features, "1-based features (default all)")
      ->delimiter(',');
  curves->add_option("--grid-size", c.grid_size, "Points per curve")
      ->capture_default_str();
  AddEvalData(curves, c);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic benchmark");
  synth->add_option("--num-features", c.num_features, "Item features")
      ->capture_default_str();
  synth->add_option("--num-context", c.num_context, "Context features")
      ->capture_default_str();
  synth->add_option("--num-lists", c.num_lists, "Query lists")->capture_default_str();
  synth->add_option("--items-per-list", c.items_per_list, "Items per list")
      ->capture_default_str();
  synth->add_flag("--context-interaction", c.context_interaction,
                  "Make feature weights depend on context");
  synth->add_option("--num-context-values", c.num_context_values,
                    "Distinct values of context feature 1")
      ->capture_default_str();
  synth->add_option("--noise", c.noise, "Label noise std-dev")->capture_default_str();
  synth->add_option("--train-fraction", c.train_fraction)->capture_default_str();
  synth->add_option("--valid-fraction", c.valid_fraction)->capture_default_str();
  synth->add_option("--test-fraction", c.test_fraction)->capture_default_str();
  synth->add_option("--seed", c.seed, "Generator seed")->capture_default_str();
  AddOutputDir(synth, c);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    PrintError(err, kExitUsage, e.what());
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  c.command = chosen->get_name();
  try {
    int status = kExitOk;
    const std::string snapshot = ConfigSnapshot(*chosen);
    auto run = [&](auto&& command) {
      status = command(c, out);
      WriteFile(fs::path(c.output_dir) / kConfigFile,
                [&](std::ostream& s) { s << snapshot; });
    };
    if (c.command == "train") run(CmdTrain);
    else if (c.command == "evaluate") run(CmdEvaluate);
    else if (c.command == "distill") run(CmdDistill);
    else if (c.command == "importance") run(CmdImportance);
    else if (c.command == "export-curves") run(CmdExportCurves);
    else if (c.command == "synth") run(CmdSynth);
    return status;
  } catch (const std::exception& e) {
    const int code = ExitCodeFor(e);
    PrintError(err, code, e.what());
    return code;
  }
}

}  // namespace rankgam
