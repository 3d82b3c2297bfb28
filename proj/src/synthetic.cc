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

#include "rankgam/synthetic.h"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "rankgam/common.h"
#include "rankgam/rng.h"

namespace rankgam {
namespace {

constexpr double kAmplitudeDecay = 0.6;
constexpr double kInteractionStrength = 2.0;
constexpr double kGradeQuantiles[] = {0.50, 0.75, 0.90, 0.97};

double Standardize(ItemDistribution distribution, double x) {
  switch (distribution) {
    case ItemDistribution::kUniform:
      return (x - 0.5) * std::sqrt(12.0);
    case ItemDistribution::kNormal:
      return x;
    case ItemDistribution::kExponential:
      return x - 1.0;
  }
  return x;
}

double ApplyShape(PlantedShape shape, double z) {
  switch (shape) {
    case PlantedShape::kLinear:
      return z;
    case PlantedShape::kTanh:
      return std::tanh(1.5 * z);
    case PlantedShape::kBump:
      return 1.0 - z * z;
    case PlantedShape::kStep:
      return 1.0 / (1.0 + std::exp(-3.0 * z));
  }
  return z;
}

double Draw(ItemDistribution distribution, Rng& rng) {
  switch (distribution) {
    case ItemDistribution::kUniform:
      return rng.Uniform();
    case ItemDistribution::kNormal:
      return rng.Normal();
    case ItemDistribution::kExponential:
      return rng.Exponential();
  }
  return 0.0;
}

const char* DistributionName(ItemDistribution d) {
  switch (d) {
    case ItemDistribution::kUniform: return "uniform01";
    case ItemDistribution::kNormal: return "normal01";
    case ItemDistribution::kExponential: return "exponential1";
  }
  return "";
}

const char* ShapeName(PlantedShape s) {
  switch (s) {
    case PlantedShape::kLinear: return "linear";
    case PlantedShape::kTanh: return "tanh(1.5z)";
    case PlantedShape::kBump: return "1-z^2";
    case PlantedShape::kStep: return "sigmoid(3z)";
  }
  return "";
}

}  // namespace

double PlantedModel::Contribution(size_t j, double x) const {
  return amplitudes[j] * ApplyShape(shapes[j], Standardize(distributions[j], x));
}

double PlantedModel::Score(size_t context_value,
                           std::span<const double> item) const {
  double score = 0.0;
  for (size_t j = 0; j < item.size(); ++j) {
    score += weights[context_value][j] * Contribution(j, item[j]);
  }
  return score;
}

size_t PlantedModel::ContextIndex(const std::string& token) const {
  const auto it = std::find(context_tokens.begin(), context_tokens.end(), token);
  if (it == context_tokens.end()) {
    throw DataError("unknown planted context value " + token);
  }
  return static_cast<size_t>(it - context_tokens.begin());
}

std::string PlantedModel::ToJson() const {
  nlohmann::json root;
  root["formula"] =
      "score = sum_j weight[c][j] * amplitude[j] * shape[j](standardized x_j)";
  root["grade_thresholds"] = grade_thresholds;
  auto& features = root["features"];
  features = nlohmann::json::array();
  for (size_t j = 0; j < amplitudes.size(); ++j) {
    features.push_back({{"index", j + 1},
                        {"distribution", DistributionName(distributions[j])},
                        {"shape", ShapeName(shapes[j])},
                        {"amplitude", amplitudes[j]}});
  }
  auto& contexts = root["context_weights"];
  contexts = nlohmann::json::object();
  for (size_t c = 0; c < context_tokens.size(); ++c) {
    contexts[context_tokens[c]] = weights[c];
  }
  return root.dump(2);
}

SyntheticData GenerateSynthetic(const SyntheticSpec& spec) {
  if (spec.num_features < 1 || spec.num_lists < 1 || spec.items_per_list < 1 ||
      spec.num_context_values < 1) {
    throw UsageError("synthetic counts must be >= 1");
  }
  if (spec.context_interaction && spec.num_context < 1) {
    throw UsageError("context interaction needs at least one context feature");
  }
  if (!(spec.noise >= 0.0)) throw UsageError("noise must be >= 0");

  const size_t n = spec.num_features;
  const size_t m = spec.num_context;
  PlantedModel planted;
  for (size_t j = 0; j < n; ++j) {
    planted.distributions.push_back(static_cast<ItemDistribution>(j % 3));
    planted.shapes.push_back(static_cast<PlantedShape>(j % 4));
    planted.amplitudes.push_back(std::pow(kAmplitudeDecay, static_cast<double>(j)));
  }
  const size_t num_values = m > 0 ? spec.num_context_values : 1;
  Rng weight_rng(MixSeed(spec.seed, 1));
  for (size_t c = 0; c < num_values; ++c) {
    if (m > 0) planted.context_tokens.push_back("region_" + std::to_string(c));
    std::vector<double> w(n, 1.0);
    if (spec.context_interaction) {
      // n * softmax(strength * u), u ~ N(0, 1): mean weight stays 1.
      std::vector<double> logits(n);
      for (double& u : logits) u = kInteractionStrength * weight_rng.Normal();
      const double top = *std::max_element(logits.begin(), logits.end());
      double total = 0.0;
      for (size_t j = 0; j < n; ++j) total += w[j] = std::exp(logits[j] - top);
      for (double& v : w) v *= static_cast<double>(n) / total;
    }
    planted.weights.push_back(std::move(w));
  }

  Rng rng(MixSeed(spec.seed, 2));
  const size_t l = spec.items_per_list;
  std::vector<QueryList> lists;
  std::vector<std::vector<double>> noisy_scores;
  std::vector<double> all_scores;
  lists.reserve(spec.num_lists);
  for (size_t q = 0; q < spec.num_lists; ++q) {
    std::vector<FeatureValue> context;
    size_t region = 0;
    for (size_t k = 0; k < m; ++k) {
      if (k == 0) {
        region = static_cast<size_t>(rng.UniformInt(num_values));
        context.push_back(FeatureValue::Categorical(planted.context_tokens[region]));
      } else if (k % 2 == 1) {
        context.push_back(FeatureValue::Categorical(
            "device_" + std::to_string(rng.UniformInt(2))));
      } else {
        context.push_back(FeatureValue::Numeric(rng.Uniform()));
      }
    }
    std::vector<double> features(l * n);
    std::vector<double> scores(l);
    for (size_t i = 0; i < l; ++i) {
      for (size_t j = 0; j < n; ++j) {
        features[i * n + j] = Draw(planted.distributions[j], rng);
      }
      scores[i] = planted.Score(region, {features.data() + i * n, n}) +
                  spec.noise * rng.Normal();
      all_scores.push_back(scores[i]);
    }
    noisy_scores.push_back(std::move(scores));
    lists.emplace_back(std::to_string(q + 1), std::move(context), n,
                       std::move(features), std::vector<double>(l, 0.0));
  }

  std::sort(all_scores.begin(), all_scores.end());
  for (double quantile : kGradeQuantiles) {
    const auto index = static_cast<size_t>(
        quantile * static_cast<double>(all_scores.size() - 1));
    planted.grade_thresholds.push_back(all_scores[index]);
  }
  for (size_t q = 0; q < lists.size(); ++q) {
    std::vector<double> labels(l);
    for (size_t i = 0; i < l; ++i) {
      double grade = 0.0;
      for (double threshold : planted.grade_thresholds) {
        if (noisy_scores[q][i] > threshold) grade += 1.0;
      }
      labels[i] = grade;
    }
    const auto& old = lists[q];
    lists[q] = QueryList(old.qid(), old.context(), n,
                         std::vector<double>(old.features().begin(),
                                             old.features().end()),
                         std::move(labels));
  }

  Schema schema;
  schema.num_features = n;
  for (size_t k = 0; k < m; ++k) {
    schema.context_kinds.push_back(k == 0 || k % 2 == 1
                                       ? FeatureKind::kCategorical
                                       : FeatureKind::kNumeric);
  }
  schema.vocabularies = BuildVocabularies(lists, schema.context_kinds);
  return SyntheticData{RankingDataset(std::move(schema), std::move(lists)),
                       std::move(planted)};
}

}  // namespace rankgam
