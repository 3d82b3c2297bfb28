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

#ifndef RANKGAM_IMPORTANCE_H_
#define RANKGAM_IMPORTANCE_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rankgam/dataset.h"
#include "rankgam/model.h"

namespace rankgam {

inline constexpr size_t kDefaultRepetitions = 10;

// NDCG@5 drop when item feature j is shuffled within every list:
//   mean over repetitions of (baseline NDCG@5 - shuffled NDCG@5).
// Lists with zero ideal DCG are ignored. Deterministic in `seed`.
double PermutationImportance(const Ranker& model, const RankingDataset& dataset,
                             size_t j, size_t repetitions, uint64_t seed);

// max - min of f_j over the observed x_j values after dropping the lowest
// and highest 5% (by x). With fewer than 20 values the trim is skipped and
// a warning issued.
double EffectiveRange(const Ranker& model, const RankingDataset& dataset,
                      size_t j);

// Spearman rank correlation with average ranks for ties; nullopt when
// either side is constant or fewer than two pairs are given.
std::optional<double> SpearmanCorrelation(std::span<const double> a,
                                          std::span<const double> b);

struct FeatureImportance {
  size_t feature = 0;  // 0-based
  double delta_ndcg5 = 0.0;
  double effective_range = 0.0;
  std::optional<double> mean_weight;  // context-present models only
};

struct ImportanceReport {
  std::vector<FeatureImportance> features;
  size_t repetitions = 0;
  uint64_t seed = 0;
  // Spearman(effective_range, delta_ndcg5) over features.
  std::optional<double> correlation;
};

// Per-feature diagnostics plus their rank correlation. Throws UsageError if
// repetitions == 0 and DataError for empty or incompatible data.
ImportanceReport ComputeImportance(const Ranker& model,
                                   const RankingDataset& dataset,
                                   size_t repetitions, uint64_t seed);

// Same as ComputeImportance but requires n >= 2 so the correlation is
// meaningful.
ImportanceReport ImportanceCorrelation(const Ranker& model,
                                       const RankingDataset& dataset,
                                       size_t repetitions, uint64_t seed);

// feature,delta_ndcg5,effective_range,mean_weight (1-based features;
// mean_weight empty outside context-present mode).
void WriteImportanceCsv(const ImportanceReport& report, std::ostream& out);

// effective_range,delta_ndcg5 scatter rows, followed by a comment line
// carrying the Spearman correlation ("undefined" when not computable).
void WriteScatterCsv(const ImportanceReport& report, std::ostream& out);

}  // namespace rankgam

#endif  // RANKGAM_IMPORTANCE_H_
