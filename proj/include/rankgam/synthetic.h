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

#ifndef RANKGAM_SYNTHETIC_H_
#define RANKGAM_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rankgam/dataset.h"

namespace rankgam {

struct SyntheticSpec {
  size_t num_features = 6;     // n
  size_t num_context = 1;      // m
  size_t num_lists = 100;
  size_t items_per_list = 10;
  uint64_t seed = 1;
  // Item-feature weights depend on the first (categorical) context column.
  bool context_interaction = false;
  size_t num_context_values = 4;
  double noise = 0.2;  // std-dev of Gaussian noise added before grading
};

enum class ItemDistribution { kUniform, kNormal, kExponential };
enum class PlantedShape { kLinear, kTanh, kBump, kStep };

// The additive ground truth behind a synthetic dataset:
//   score = sum_j w_j(c) * amplitude_j * shape_j(standardized x_j)
// where c is the value of context column 0 (w == 1 without interaction).
// Labels are 5 grades cut at global quantiles (50/75/90/97%) of the noisy
// score.
struct PlantedModel {
  std::vector<ItemDistribution> distributions;
  std::vector<PlantedShape> shapes;
  std::vector<double> amplitudes;
  std::vector<std::string> context_tokens;  // values of context column 0
  std::vector<std::vector<double>> weights;  // [context value][feature]
  std::vector<double> grade_thresholds;      // 4 ascending cut points

  double Contribution(size_t j, double x) const;
  double Score(size_t context_value, std::span<const double> item) const;
  // Index of `token` in context_tokens; throws DataError if unknown.
  size_t ContextIndex(const std::string& token) const;
  std::string ToJson() const;
};

struct SyntheticData {
  RankingDataset dataset;
  PlantedModel planted;
};

// Deterministic in `spec`. Context column 0 is categorical ("region_<c>");
// further columns alternate categorical ("device_<d>") and numeric noise.
SyntheticData GenerateSynthetic(const SyntheticSpec& spec);

}  // namespace rankgam

#endif  // RANKGAM_SYNTHETIC_H_
