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

#ifndef RANKGAM_MODEL_H_
#define RANKGAM_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankgam/dataset.h"
#include "rankgam/pwl.h"
#include "rankgam/rng.h"

namespace rankgam {

enum class ModelMode : uint8_t {
  kContextAbsent = 0,   // sum_j f_j(x_j)
  kContextPresent = 1,  // sum_j alpha_j(q) f_j(x_j)
  kNaiveContext = 2,    // sum_j f_j(x_j) + sum_k f_{n+k}(q_k); negative control
};

const char* ModelModeName(ModelMode mode);
ModelMode ParseModelMode(const std::string& name);

// Resolved network input: a numeric value or a vocabulary row.
struct NetInput {
  double value = 0.0;
  int32_t token = 0;
};

// Fully connected ReLU network with an optional embedding front end.
// Parameters are one contiguous buffer laid out as
//   [embedding (vocab x dim)] then per layer [W (out x in, row-major), b]
// with the output head last (its bias present only if requested).
class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(FeatureKind input_kind, Vocabulary vocabulary,
              size_t embedding_dim, std::vector<size_t> hidden,
              size_t outputs, bool output_bias);

  // Glorot-uniform weights and hidden biases, r = sqrt(6 / (fan_in +
  // fan_out)); the output bias starts at zero.
  void Initialize(Rng& rng);

  FeatureKind input_kind() const { return input_kind_; }
  const Vocabulary& vocabulary() const { return vocabulary_; }
  size_t embedding_dim() const { return embedding_dim_; }
  const std::vector<size_t>& hidden() const { return hidden_; }
  size_t outputs() const { return outputs_; }
  bool output_bias() const { return output_bias_; }

  size_t num_params() const { return params_.size(); }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  // Maps a feature value onto a network input. Throws UsageError on a kind
  // mismatch; unknown tokens map to the OOV row.
  NetInput Resolve(const FeatureValue& value) const;

  void Forward(NetInput input, std::span<double> out) const;

  // Layer activations kept for backpropagation; activations[0] is the
  // network input (scalar or embedding row).
  struct Trace {
    int32_t token = 0;
    std::vector<std::vector<double>> activations;
  };
  void ForwardTrace(NetInput input, Trace& trace, std::span<double> out) const;

  // Accumulates d(loss)/d(params) into `grad` given d(loss)/d(outputs).
  void Backward(const Trace& trace, std::span<const double> grad_out,
                std::span<double> grad) const;

  friend bool operator==(const FeedForward& a, const FeedForward& b);

 private:
  size_t input_width() const;
  void BuildLayout();

  FeatureKind input_kind_ = FeatureKind::kNumeric;
  Vocabulary vocabulary_;
  size_t embedding_dim_ = 0;
  std::vector<size_t> hidden_;
  size_t outputs_ = 1;
  bool output_bias_ = true;
  std::vector<double> params_;
  // Per dense layer (hidden layers then head): widths and buffer offsets.
  std::vector<size_t> layer_in_;
  std::vector<size_t> layer_out_;
  std::vector<size_t> weight_offset_;
  std::vector<size_t> bias_offset_;  // SIZE_MAX when absent
};

// f_j: one univariate sub-model producing a scalar sub-score.
class SubNetwork {
 public:
  SubNetwork() = default;
  // Parameters start at zero; call net().Initialize() for random init.
  static SubNetwork Numeric(std::vector<size_t> hidden);
  static SubNetwork Categorical(Vocabulary vocabulary, size_t embedding_dim,
                                std::vector<size_t> hidden);

  // Numeric fast path.
  double operator()(double x) const;
  // Throws UsageError if the value kind differs from the input kind.
  double Evaluate(const FeatureValue& value) const;

  FeedForward& net() { return net_; }
  const FeedForward& net() const { return net_; }

  friend bool operator==(const SubNetwork&, const SubNetwork&) = default;

 private:
  explicit SubNetwork(FeedForward net) : net_(std::move(net)) {}
  FeedForward net_;
};

// Context feature k -> softmax importance vector alpha_k over n item
// features. The head has no bias.
class ContextTower {
 public:
  ContextTower() = default;
  ContextTower(FeatureKind input_kind, Vocabulary vocabulary,
               size_t embedding_dim, std::vector<size_t> hidden,
               size_t num_item_features);

  // Writes alpha_k (length n) for one context value.
  void Weights(const FeatureValue& value, std::span<double> alpha) const;
  void Weights(NetInput input, std::span<double> alpha) const;

  size_t num_item_features() const { return net_.outputs(); }
  FeedForward& net() { return net_; }
  const FeedForward& net() const { return net_; }

  friend bool operator==(const ContextTower&, const ContextTower&) = default;

 private:
  FeedForward net_;
};

// Numerically stable in-place softmax.
void Softmax(std::span<double> values);

// Common scoring interface of neural and distilled ranking GAMs. Every
// score is assembled as
//   context-absent:  sum_j f_j(x_j)
//   context-present: sum_j alpha_j(q) f_j(x_j)
//   naive-context:   sum_j f_j(x_j) + sum_k f_{n+k}(q_k)
class Ranker {
 public:
  virtual ~Ranker() = default;

  virtual const Schema& schema() const = 0;
  virtual ModelMode mode() const = 0;
  size_t num_features() const { return schema().num_features; }

  // Sub-score f_j(x) of item feature j.
  virtual double Contribution(size_t j, double x) const = 0;

  // alpha(q) = sum_k alpha_k(q_k). Throws UsageError outside
  // context-present mode.
  virtual std::vector<double> ContextWeights(
      std::span<const FeatureValue> context) const = 0;

  // alpha_k for a single context feature value.
  virtual std::vector<double> TowerWeights(size_t k,
                                           const FeatureValue& value) const = 0;

  // sum_k f_{n+k}(q_k) in naive-context mode, 0 otherwise.
  virtual double ContextOffset(std::span<const FeatureValue> context) const = 0;

  // Scores l items stored row-major in `features`.
  virtual void ScoreItems(std::span<const FeatureValue> context,
                          std::span<const double> features,
                          std::span<double> scores) const = 0;

  std::vector<double> ScoreList(const QueryList& list) const;
  double ScoreItem(std::span<const FeatureValue> context,
                   std::span<const double> item) const;

  // n per-feature terms (alpha_j f_j(x_j) or f_j(x_j)) followed by the
  // context term; summing them left to right reproduces ScoreItem exactly.
  std::vector<double> Attribution(std::span<const FeatureValue> context,
                                  std::span<const double> item) const;

  // Throws DataError if the dataset schema cannot be scored by this model.
  void CheckCompatible(const Schema& data_schema) const;

 protected:
  void ValidateScoreArgs(std::span<const FeatureValue> context,
                         std::span<const double> features,
                         std::span<const double> scores) const;
};

struct ModelConfig {
  ModelMode mode = ModelMode::kContextAbsent;
  std::vector<size_t> item_hidden{16, 8};
  std::vector<size_t> context_hidden{128, 64};
  size_t embedding_dim = 300;
  uint64_t seed = 0;
};

// Neural ranking GAM.
class GamModel final : public Ranker {
 public:
  GamModel() = default;
  // Builds the topology for `schema` and initializes parameters from
  // config.seed.
  GamModel(const Schema& schema, const ModelConfig& config);
  // Assembles a model from explicit parts (tests, deserialization).
  GamModel(Schema schema, ModelMode mode, std::vector<SubNetwork> item_nets,
           std::vector<ContextTower> towers,
           std::vector<SubNetwork> context_nets);

  const Schema& schema() const override { return schema_; }
  ModelMode mode() const override { return mode_; }
  double Contribution(size_t j, double x) const override {
    return item_nets_[j](x);
  }
  std::vector<double> ContextWeights(
      std::span<const FeatureValue> context) const override;
  std::vector<double> TowerWeights(size_t k,
                                   const FeatureValue& value) const override;
  double ContextOffset(std::span<const FeatureValue> context) const override;
  void ScoreItems(std::span<const FeatureValue> context,
                  std::span<const double> features,
                  std::span<double> scores) const override;

  const std::vector<SubNetwork>& item_nets() const { return item_nets_; }
  std::vector<SubNetwork>& mutable_item_nets() { return item_nets_; }
  const std::vector<ContextTower>& towers() const { return towers_; }
  std::vector<ContextTower>& mutable_towers() { return towers_; }
  // Naive-context sub-models f_{n+k}, one per context feature.
  const std::vector<SubNetwork>& context_nets() const { return context_nets_; }
  std::vector<SubNetwork>& mutable_context_nets() { return context_nets_; }

  // Parameter buffers in a fixed order: item nets, towers, context nets.
  std::vector<std::span<double>> MutableParameterBlocks();
  std::vector<std::span<const double>> ParameterBlocks() const;
  size_t num_params() const;

  friend bool operator==(const GamModel& a, const GamModel& b) {
    return a.schema_ == b.schema_ && a.mode_ == b.mode_ &&
           a.item_nets_ == b.item_nets_ && a.towers_ == b.towers_ &&
           a.context_nets_ == b.context_nets_;
  }

 private:
  void Validate() const;

  Schema schema_;
  ModelMode mode_ = ModelMode::kContextAbsent;
  std::vector<SubNetwork> item_nets_;
  std::vector<ContextTower> towers_;
  std::vector<SubNetwork> context_nets_;
};

// A GamModel whose item sub-networks are replaced by PWL functions. Context
// towers are kept; when every context feature is categorical their outputs
// are additionally materialized per vocabulary entry into a lookup table.
class DistilledModel final : public Ranker {
 public:
  DistilledModel() = default;
  DistilledModel(Schema schema, ModelMode mode,
                 std::vector<PwlFunction> item_functions,
                 std::vector<ContextTower> towers,
                 std::vector<SubNetwork> context_nets);

  const Schema& schema() const override { return schema_; }
  ModelMode mode() const override { return mode_; }
  double Contribution(size_t j, double x) const override {
    return item_functions_[j](x);
  }
  std::vector<double> ContextWeights(
      std::span<const FeatureValue> context) const override;
  std::vector<double> TowerWeights(size_t k,
                                   const FeatureValue& value) const override;
  double ContextOffset(std::span<const FeatureValue> context) const override;
  void ScoreItems(std::span<const FeatureValue> context,
                  std::span<const double> features,
                  std::span<double> scores) const override;

  const std::vector<PwlFunction>& item_functions() const {
    return item_functions_;
  }
  const std::vector<ContextTower>& towers() const { return towers_; }
  const std::vector<SubNetwork>& context_nets() const { return context_nets_; }
  bool has_weight_table() const { return !weight_table_.empty(); }

  friend bool operator==(const DistilledModel& a, const DistilledModel& b) {
    return a.schema_ == b.schema_ && a.mode_ == b.mode_ &&
           a.item_functions_ == b.item_functions_ && a.towers_ == b.towers_ &&
           a.context_nets_ == b.context_nets_;
  }

 private:
  void AccumulateWeights(std::span<const FeatureValue> context,
                         std::span<double> alpha) const;

  Schema schema_;
  ModelMode mode_ = ModelMode::kContextAbsent;
  std::vector<PwlFunction> item_functions_;
  std::vector<ContextTower> towers_;
  std::vector<SubNetwork> context_nets_;
  // weight_table_[k][token * n + j] = alpha_k(token)_j
  std::vector<std::vector<double>> weight_table_;
};

struct CurvePoint {
  double x;
  double f;
};

// (x, f_j(x)) for each grid point. Throws UsageError if j >= n.
std::vector<CurvePoint> ExportCurve(const Ranker& model, size_t j,
                                    std::span<const double> grid);

struct WeightRow {
  std::string context_value;
  std::vector<double> weights;  // alpha_k, length n
};

// alpha_k for every vocabulary entry (OOV first) of categorical context
// feature k of a context-present model.
std::vector<WeightRow> ExportWeightTable(const Ranker& model, size_t k);

}  // namespace rankgam

#endif  // RANKGAM_MODEL_H_
