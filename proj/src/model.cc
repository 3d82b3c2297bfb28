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

#include "rankgam/model.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rankgam/common.h"

namespace rankgam {
namespace {

constexpr size_t kNoBias = std::numeric_limits<size_t>::max();

// Ping-pong activation buffers reused across forward passes.
struct Scratch {
  std::vector<double> a;
  std::vector<double> b;
};

Scratch& ThreadScratch() {
  thread_local Scratch scratch;
  return scratch;
}

template <typename Model>
void AssembleScores(const Model& model, std::span<const FeatureValue> context,
                    std::span<const double> features,
                    std::span<double> scores) {
  const size_t n = model.num_features();
  const ModelMode mode = model.mode();
  std::vector<double> alpha;
  double offset = 0.0;
  if (mode == ModelMode::kContextPresent) {
    alpha = model.ContextWeights(context);
  } else if (mode == ModelMode::kNaiveContext) {
    offset = model.ContextOffset(context);
  }
  for (size_t i = 0; i < scores.size(); ++i) {
    const double* x = features.data() + i * n;
    double score = 0.0;
    if (mode == ModelMode::kContextPresent) {
      for (size_t j = 0; j < n; ++j) score += alpha[j] * model.Contribution(j, x[j]);
    } else {
      for (size_t j = 0; j < n; ++j) score += model.Contribution(j, x[j]);
    }
    if (mode == ModelMode::kNaiveContext) score += offset;
    scores[i] = score;
  }
}

}  // namespace

const char* ModelModeName(ModelMode mode) {
  switch (mode) {
    case ModelMode::kContextAbsent: return "context-absent";
    case ModelMode::kContextPresent: return "context-present";
    case ModelMode::kNaiveContext: return "naive-context";
  }
  return "unknown";
}

ModelMode ParseModelMode(const std::string& name) {
  if (name == "context-absent") return ModelMode::kContextAbsent;
  if (name == "context-present") return ModelMode::kContextPresent;
  if (name == "naive-context") return ModelMode::kNaiveContext;
  throw UsageError("unknown model mode '" + name +
                   "' (context-absent|context-present|naive-context)");
}

FeedForward::FeedForward(FeatureKind input_kind, Vocabulary vocabulary,
                         size_t embedding_dim, std::vector<size_t> hidden,
                         size_t outputs, bool output_bias)
    : input_kind_(input_kind),
      vocabulary_(std::move(vocabulary)),
      embedding_dim_(input_kind == FeatureKind::kCategorical ? embedding_dim : 0),
      hidden_(std::move(hidden)),
      outputs_(outputs),
      output_bias_(output_bias) {
  if (outputs_ == 0) throw UsageError("network needs at least one output");
  if (input_kind_ == FeatureKind::kCategorical && embedding_dim_ == 0) {
    throw UsageError("categorical input needs a positive embedding dimension");
  }
  for (size_t width : hidden_) {
    if (width == 0) throw UsageError("hidden layer widths must be positive");
  }
  BuildLayout();
}

size_t FeedForward::input_width() const {
  return input_kind_ == FeatureKind::kCategorical ? embedding_dim_ : 1;
}

void FeedForward::BuildLayout() {
  layer_in_.clear();
  layer_out_.clear();
  weight_offset_.clear();
  bias_offset_.clear();
  size_t offset = input_kind_ == FeatureKind::kCategorical
                      ? vocabulary_.size() * embedding_dim_
                      : 0;
  size_t in = input_width();
  for (size_t h = 0; h <= hidden_.size(); ++h) {
    const bool head = h == hidden_.size();
    const size_t out = head ? outputs_ : hidden_[h];
    layer_in_.push_back(in);
    layer_out_.push_back(out);
    weight_offset_.push_back(offset);
    offset += in * out;
    if (!head || output_bias_) {
      bias_offset_.push_back(offset);
      offset += out;
    } else {
      bias_offset_.push_back(kNoBias);
    }
    in = out;
  }
  params_.assign(offset, 0.0);
}

void FeedForward::Initialize(Rng& rng) {
  if (input_kind_ == FeatureKind::kCategorical) {
    const double r = std::sqrt(
        6.0 / static_cast<double>(vocabulary_.size() + embedding_dim_));
    for (size_t i = 0; i < vocabulary_.size() * embedding_dim_; ++i) {
      params_[i] = rng.Uniform(-r, r);
    }
  }
  for (size_t layer = 0; layer < layer_in_.size(); ++layer) {
    const double r =
        std::sqrt(6.0 / static_cast<double>(layer_in_[layer] + layer_out_[layer]));
    const size_t count = layer_in_[layer] * layer_out_[layer];
    for (size_t i = 0; i < count; ++i) {
      params_[weight_offset_[layer] + i] = rng.Uniform(-r, r);
    }
    if (bias_offset_[layer] == kNoBias) continue;
    const bool head = layer + 1 == layer_in_.size();
    for (size_t o = 0; o < layer_out_[layer]; ++o) {
      params_[bias_offset_[layer] + o] = head ? 0.0 : rng.Uniform(-r, r);
    }
  }
}

NetInput FeedForward::Resolve(const FeatureValue& value) const {
  if (value.kind() != input_kind_) {
    throw UsageError(std::string("network expects a ") +
                     FeatureKindName(input_kind_) + " input, got " +
                     FeatureKindName(value.kind()));
  }
  NetInput input;
  if (input_kind_ == FeatureKind::kNumeric) {
    input.value = value.numeric();
  } else {
    input.token = vocabulary_.Lookup(value.token());
  }
  return input;
}

void FeedForward::Forward(NetInput input, std::span<double> out) const {
  Scratch& scratch = ThreadScratch();
  const double* current;
  if (input_kind_ == FeatureKind::kCategorical) {
    current = params_.data() + static_cast<size_t>(input.token) * embedding_dim_;
  } else {
    current = &input.value;
  }
  const size_t num_layers = layer_in_.size();
  for (size_t layer = 0; layer < num_layers; ++layer) {
    const bool head = layer + 1 == num_layers;
    const size_t in = layer_in_[layer];
    const size_t width = layer_out_[layer];
    double* next;
    if (head) {
      next = out.data();
    } else {
      std::vector<double>& buffer = (layer % 2 == 0) ? scratch.a : scratch.b;
      if (buffer.size() < width) buffer.resize(width);
      next = buffer.data();
    }
    const double* w = params_.data() + weight_offset_[layer];
    const size_t bias = bias_offset_[layer];
    for (size_t o = 0; o < width; ++o) {
      double sum = bias == kNoBias ? 0.0 : params_[bias + o];
      const double* row = w + o * in;
      for (size_t i = 0; i < in; ++i) sum += row[i] * current[i];
      next[o] = head ? sum : std::max(sum, 0.0);
    }
    current = next;
  }
}

void FeedForward::ForwardTrace(NetInput input, Trace& trace,
                               std::span<double> out) const {
  const size_t num_layers = layer_in_.size();
  trace.token = input.token;
  trace.activations.resize(num_layers);
  auto& first = trace.activations[0];
  if (input_kind_ == FeatureKind::kCategorical) {
    const double* row =
        params_.data() + static_cast<size_t>(input.token) * embedding_dim_;
    first.assign(row, row + embedding_dim_);
  } else {
    first.assign(1, input.value);
  }
  for (size_t layer = 0; layer < num_layers; ++layer) {
    const bool head = layer + 1 == num_layers;
    const size_t in = layer_in_[layer];
    const size_t width = layer_out_[layer];
    const std::vector<double>& current = trace.activations[layer];
    double* next;
    if (head) {
      next = out.data();
    } else {
      trace.activations[layer + 1].resize(width);
      next = trace.activations[layer + 1].data();
    }
    const double* w = params_.data() + weight_offset_[layer];
    const size_t bias = bias_offset_[layer];
    for (size_t o = 0; o < width; ++o) {
      double sum = bias == kNoBias ? 0.0 : params_[bias + o];
      const double* row = w + o * in;
      for (size_t i = 0; i < in; ++i) sum += row[i] * current[i];
      next[o] = head ? sum : std::max(sum, 0.0);
    }
  }
}

void FeedForward::Backward(const Trace& trace,
                           std::span<const double> grad_out,
                           std::span<double> grad) const {
  std::vector<double> upstream(grad_out.begin(), grad_out.end());
  std::vector<double> downstream;
  for (size_t layer = layer_in_.size(); layer-- > 0;) {
    const bool head = layer + 1 == layer_in_.size();
    const size_t in = layer_in_[layer];
    const size_t width = layer_out_[layer];
    const std::vector<double>& input = trace.activations[layer];
    if (!head) {
      // ReLU gate: the stored output is positive iff the unit was active.
      const std::vector<double>& output = trace.activations[layer + 1];
      for (size_t o = 0; o < width; ++o) {
        if (!(output[o] > 0.0)) upstream[o] = 0.0;
      }
    }
    const double* w = params_.data() + weight_offset_[layer];
    double* gw = grad.data() + weight_offset_[layer];
    const size_t bias = bias_offset_[layer];
    downstream.assign(in, 0.0);
    for (size_t o = 0; o < width; ++o) {
      const double g = upstream[o];
      if (g == 0.0) continue;
      if (bias != kNoBias) grad[bias + o] += g;
      const double* row = w + o * in;
      double* grow = gw + o * in;
      for (size_t i = 0; i < in; ++i) {
        grow[i] += g * input[i];
        downstream[i] += g * row[i];
      }
    }
    upstream.swap(downstream);
  }
  if (input_kind_ == FeatureKind::kCategorical) {
    double* row = grad.data() + static_cast<size_t>(trace.token) * embedding_dim_;
    for (size_t d = 0; d < embedding_dim_; ++d) row[d] += upstream[d];
  }
}

bool operator==(const FeedForward& a, const FeedForward& b) {
  return a.input_kind_ == b.input_kind_ && a.vocabulary_ == b.vocabulary_ &&
         a.embedding_dim_ == b.embedding_dim_ && a.hidden_ == b.hidden_ &&
         a.outputs_ == b.outputs_ && a.output_bias_ == b.output_bias_ &&
         a.params_ == b.params_;
}

SubNetwork SubNetwork::Numeric(std::vector<size_t> hidden) {
  return SubNetwork(FeedForward(FeatureKind::kNumeric, Vocabulary(), 0,
                                std::move(hidden), 1, true));
}

SubNetwork SubNetwork::Categorical(Vocabulary vocabulary, size_t embedding_dim,
                                   std::vector<size_t> hidden) {
  return SubNetwork(FeedForward(FeatureKind::kCategorical,
                                std::move(vocabulary), embedding_dim,
                                std::move(hidden), 1, true));
}

double SubNetwork::operator()(double x) const {
  double out = 0.0;
  net_.Forward(NetInput{x, 0}, {&out, 1});
  return out;
}

double SubNetwork::Evaluate(const FeatureValue& value) const {
  double out = 0.0;
  net_.Forward(net_.Resolve(value), {&out, 1});
  return out;
}

ContextTower::ContextTower(FeatureKind input_kind, Vocabulary vocabulary,
                           size_t embedding_dim, std::vector<size_t> hidden,
                           size_t num_item_features)
    : net_(input_kind, std::move(vocabulary), embedding_dim, std::move(hidden),
           num_item_features, false) {}

void ContextTower::Weights(const FeatureValue& value,
                           std::span<double> alpha) const {
  Weights(net_.Resolve(value), alpha);
}

void ContextTower::Weights(NetInput input, std::span<double> alpha) const {
  net_.Forward(input, alpha);
  Softmax(alpha);
}

void Softmax(std::span<double> values) {
  const double top = *std::max_element(values.begin(), values.end());
  double total = 0.0;
  for (double& v : values) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : values) v /= total;
}

std::vector<double> Ranker::ScoreList(const QueryList& list) const {
  std::vector<double> scores(list.size());
  ScoreItems(list.context(), list.features(), scores);
  return scores;
}

double Ranker::ScoreItem(std::span<const FeatureValue> context,
                         std::span<const double> item) const {
  double score = 0.0;
  ScoreItems(context, item, {&score, 1});
  return score;
}

std::vector<double> Ranker::Attribution(std::span<const FeatureValue> context,
                                        std::span<const double> item) const {
  const size_t n = num_features();
  if (item.size() != n) throw UsageError("item feature count mismatch");
  std::vector<double> terms(n + 1, 0.0);
  std::vector<double> alpha;
  if (mode() == ModelMode::kContextPresent) alpha = ContextWeights(context);
  for (size_t j = 0; j < n; ++j) {
    const double f = Contribution(j, item[j]);
    terms[j] = mode() == ModelMode::kContextPresent ? alpha[j] * f : f;
  }
  if (mode() == ModelMode::kNaiveContext) terms[n] = ContextOffset(context);
  return terms;
}

void Ranker::CheckCompatible(const Schema& data_schema) const {
  const Schema& own = schema();
  if (data_schema.num_features != own.num_features) {
    throw DataError("schema mismatch: model has " +
                    std::to_string(own.num_features) +
                    " item features, dataset has " +
                    std::to_string(data_schema.num_features));
  }
  if (mode() == ModelMode::kContextAbsent) return;
  if (data_schema.context_kinds != own.context_kinds) {
    throw DataError("schema mismatch: context features differ (model has " +
                    std::to_string(own.num_context()) + ", dataset has " +
                    std::to_string(data_schema.num_context()) + ")");
  }
}

void Ranker::ValidateScoreArgs(std::span<const FeatureValue> context,
                               std::span<const double> features,
                               std::span<const double> scores) const {
  if (features.size() != scores.size() * num_features()) {
    throw UsageError("item feature count mismatch: expected " +
                     std::to_string(num_features()) + " per item");
  }
  if (mode() != ModelMode::kContextAbsent &&
      context.size() != schema().num_context()) {
    throw UsageError("context length mismatch: expected " +
                     std::to_string(schema().num_context()));
  }
}

GamModel::GamModel(const Schema& schema, const ModelConfig& config)
    : schema_(schema), mode_(config.mode) {
  const size_t n = schema_.num_features;
  if (n == 0) throw UsageError("model needs at least one item feature");
  Rng rng(config.seed);
  for (size_t j = 0; j < n; ++j) {
    item_nets_.push_back(SubNetwork::Numeric(config.item_hidden));
    item_nets_.back().net().Initialize(rng);
  }
  const size_t m = schema_.num_context();
  if (mode_ == ModelMode::kContextPresent) {
    if (m == 0) {
      throw UsageError("context-present mode needs at least one context feature");
    }
    for (size_t k = 0; k < m; ++k) {
      towers_.emplace_back(schema_.context_kinds[k], schema_.vocabularies[k],
                           config.embedding_dim, config.context_hidden, n);
      towers_.back().net().Initialize(rng);
    }
  } else if (mode_ == ModelMode::kNaiveContext) {
    for (size_t k = 0; k < m; ++k) {
      context_nets_.push_back(
          schema_.context_kinds[k] == FeatureKind::kCategorical
              ? SubNetwork::Categorical(schema_.vocabularies[k],
                                        config.embedding_dim, config.item_hidden)
              : SubNetwork::Numeric(config.item_hidden));
      context_nets_.back().net().Initialize(rng);
    }
  }
  Validate();
}

GamModel::GamModel(Schema schema, ModelMode mode,
                   std::vector<SubNetwork> item_nets,
                   std::vector<ContextTower> towers,
                   std::vector<SubNetwork> context_nets)
    : schema_(std::move(schema)),
      mode_(mode),
      item_nets_(std::move(item_nets)),
      towers_(std::move(towers)),
      context_nets_(std::move(context_nets)) {
  Validate();
}

void GamModel::Validate() const {
  const size_t n = schema_.num_features;
  const size_t m = schema_.num_context();
  if (item_nets_.size() != n) {
    throw DataError("model has " + std::to_string(item_nets_.size()) +
                    " item sub-networks for " + std::to_string(n) + " features");
  }
  for (const auto& net : item_nets_) {
    if (net.net().input_kind() != FeatureKind::kNumeric ||
        net.net().outputs() != 1) {
      throw DataError("item sub-networks must be numeric with one output");
    }
  }
  const size_t expected_towers = mode_ == ModelMode::kContextPresent ? m : 0;
  const size_t expected_nets = mode_ == ModelMode::kNaiveContext ? m : 0;
  if (towers_.size() != expected_towers || context_nets_.size() != expected_nets) {
    throw DataError(std::string("context sub-model count inconsistent with ") +
                    ModelModeName(mode_) + " mode");
  }
  for (size_t k = 0; k < towers_.size(); ++k) {
    if (towers_[k].net().input_kind() != schema_.context_kinds[k] ||
        towers_[k].num_item_features() != n) {
      throw DataError("context tower " + std::to_string(k) +
                      " does not match the schema");
    }
  }
  for (size_t k = 0; k < context_nets_.size(); ++k) {
    if (context_nets_[k].net().input_kind() != schema_.context_kinds[k]) {
      throw DataError("context sub-model " + std::to_string(k) +
                      " does not match the schema");
    }
  }
}

std::vector<double> GamModel::ContextWeights(
    std::span<const FeatureValue> context) const {
  if (mode_ != ModelMode::kContextPresent) {
    throw UsageError("context weights need a context-present model");
  }
  if (context.size() != towers_.size()) {
    throw UsageError("context length mismatch: expected " +
                     std::to_string(towers_.size()));
  }
  const size_t n = schema_.num_features;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> alpha_k(n);
  for (size_t k = 0; k < towers_.size(); ++k) {
    towers_[k].Weights(context[k], alpha_k);
    for (size_t j = 0; j < n; ++j) alpha[j] += alpha_k[j];
  }
  return alpha;
}

std::vector<double> GamModel::TowerWeights(size_t k,
                                           const FeatureValue& value) const {
  if (k >= towers_.size()) throw UsageError("no context tower " + std::to_string(k));
  std::vector<double> alpha(schema_.num_features);
  towers_[k].Weights(value, alpha);
  return alpha;
}

double GamModel::ContextOffset(std::span<const FeatureValue> context) const {
  if (mode_ != ModelMode::kNaiveContext) return 0.0;
  double offset = 0.0;
  for (size_t k = 0; k < context_nets_.size(); ++k) {
    offset += context_nets_[k].Evaluate(context[k]);
  }
  return offset;
}

void GamModel::ScoreItems(std::span<const FeatureValue> context,
                          std::span<const double> features,
                          std::span<double> scores) const {
  ValidateScoreArgs(context, features, scores);
  AssembleScores(*this, context, features, scores);
}

std::vector<std::span<double>> GamModel::MutableParameterBlocks() {
  std::vector<std::span<double>> blocks;
  for (auto& net : item_nets_) blocks.push_back(net.net().params());
  for (auto& tower : towers_) blocks.push_back(tower.net().params());
  for (auto& net : context_nets_) blocks.push_back(net.net().params());
  return blocks;
}

std::vector<std::span<const double>> GamModel::ParameterBlocks() const {
  std::vector<std::span<const double>> blocks;
  for (const auto& net : item_nets_) blocks.push_back(net.net().params());
  for (const auto& tower : towers_) blocks.push_back(tower.net().params());
  for (const auto& net : context_nets_) blocks.push_back(net.net().params());
  return blocks;
}

size_t GamModel::num_params() const {
  size_t total = 0;
  for (const auto& block : ParameterBlocks()) total += block.size();
  return total;
}

DistilledModel::DistilledModel(Schema schema, ModelMode mode,
                               std::vector<PwlFunction> item_functions,
                               std::vector<ContextTower> towers,
                               std::vector<SubNetwork> context_nets)
    : schema_(std::move(schema)),
      mode_(mode),
      item_functions_(std::move(item_functions)),
      towers_(std::move(towers)),
      context_nets_(std::move(context_nets)) {
  const size_t n = schema_.num_features;
  const size_t m = schema_.num_context();
  if (item_functions_.size() != n) {
    throw DataError("distilled model has " +
                    std::to_string(item_functions_.size()) +
                    " PWL functions for " + std::to_string(n) + " features");
  }
  const size_t expected_towers = mode_ == ModelMode::kContextPresent ? m : 0;
  const size_t expected_nets = mode_ == ModelMode::kNaiveContext ? m : 0;
  if (towers_.size() != expected_towers || context_nets_.size() != expected_nets) {
    throw DataError(std::string("context sub-model count inconsistent with ") +
                    ModelModeName(mode_) + " mode");
  }
  for (size_t k = 0; k < towers_.size(); ++k) {
    if (towers_[k].net().input_kind() != schema_.context_kinds[k] ||
        towers_[k].num_item_features() != n) {
      throw DataError("context tower " + std::to_string(k) +
                      " does not match the schema");
    }
  }
  if (mode_ == ModelMode::kContextPresent && schema_.all_context_categorical()) {
    for (const auto& tower : towers_) {
      const size_t vocab = tower.net().vocabulary().size();
      std::vector<double> table(vocab * n);
      for (size_t token = 0; token < vocab; ++token) {
        tower.Weights(NetInput{0.0, static_cast<int32_t>(token)},
                      {table.data() + token * n, n});
      }
      weight_table_.push_back(std::move(table));
    }
  }
}

void DistilledModel::AccumulateWeights(std::span<const FeatureValue> context,
                                       std::span<double> alpha) const {
  const size_t n = schema_.num_features;
  std::fill(alpha.begin(), alpha.end(), 0.0);
  if (has_weight_table()) {
    for (size_t k = 0; k < towers_.size(); ++k) {
      const NetInput input = towers_[k].net().Resolve(context[k]);
      const double* row =
          weight_table_[k].data() + static_cast<size_t>(input.token) * n;
      for (size_t j = 0; j < n; ++j) alpha[j] += row[j];
    }
    return;
  }
  std::vector<double> alpha_k(n);
  for (size_t k = 0; k < towers_.size(); ++k) {
    towers_[k].Weights(context[k], alpha_k);
    for (size_t j = 0; j < n; ++j) alpha[j] += alpha_k[j];
  }
}

std::vector<double> DistilledModel::ContextWeights(
    std::span<const FeatureValue> context) const {
  if (mode_ != ModelMode::kContextPresent) {
    throw UsageError("context weights need a context-present model");
  }
  if (context.size() != towers_.size()) {
    throw UsageError("context length mismatch: expected " +
                     std::to_string(towers_.size()));
  }
  std::vector<double> alpha(schema_.num_features);
  AccumulateWeights(context, alpha);
  return alpha;
}

std::vector<double> DistilledModel::TowerWeights(
    size_t k, const FeatureValue& value) const {
  if (k >= towers_.size()) throw UsageError("no context tower " + std::to_string(k));
  std::vector<double> alpha(schema_.num_features);
  towers_[k].Weights(value, alpha);
  return alpha;
}

double DistilledModel::ContextOffset(
    std::span<const FeatureValue> context) const {
  if (mode_ != ModelMode::kNaiveContext) return 0.0;
  double offset = 0.0;
  for (size_t k = 0; k < context_nets_.size(); ++k) {
    offset += context_nets_[k].Evaluate(context[k]);
  }
  return offset;
}

void DistilledModel::ScoreItems(std::span<const FeatureValue> context,
                                std::span<const double> features,
                                std::span<double> scores) const {
  ValidateScoreArgs(context, features, scores);
  AssembleScores(*this, context, features, scores);
}

std::vector<CurvePoint> ExportCurve(const Ranker& model, size_t j,
                                    std::span<const double> grid) {
  if (j >= model.num_features()) {
    throw UsageError("feature index " + std::to_string(j + 1) +
                     " out of range (n = " +
                     std::to_string(model.num_features()) + ")");
  }
  std::vector<CurvePoint> curve;
  curve.reserve(grid.size());
  for (double x : grid) curve.push_back({x, model.Contribution(j, x)});
  return curve;
}

std::vector<WeightRow> ExportWeightTable(const Ranker& model, size_t k) {
  if (model.mode() != ModelMode::kContextPresent) {
    throw UsageError("weight tables need a context-present model");
  }
  const Schema& schema = model.schema();
  if (k >= schema.num_context()) {
    throw UsageError("context feature index " + std::to_string(k + 1) +
                     " out of range");
  }
  if (schema.context_kinds[k] != FeatureKind::kCategorical) {
    throw UsageError("context feature " + std::to_string(k + 1) +
                     " is not categorical");
  }
  std::vector<WeightRow> rows;
  for (const auto& token : schema.vocabularies[k].tokens()) {
    rows.push_back({token, model.TowerWeights(k, FeatureValue::Categorical(token))});
  }
  return rows;
}

}  // namespace rankgam
