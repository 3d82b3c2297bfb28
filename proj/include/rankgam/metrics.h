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

#ifndef RANKGAM_METRICS_H_
#define RANKGAM_METRICS_H_

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rankgam/dataset.h"
#include "rankgam/model.h"

namespace rankgam {

inline constexpr size_t kNoCutoff = std::numeric_limits<size_t>::max();

// Item indices sorted by descending score; equal scores keep input order.
std::vector<size_t> RankOrder(std::span<const double> scores);

// sum over the top-k labels in ideal order of (2^y - 1) / log2(1 + rank).
double IdealDcg(std::span<const double> labels, size_t k = kNoCutoff);

// NDCG@k with gain 2^y - 1 and discount 1 / log2(1 + rank). Returns
// nullopt when the ideal DCG@k is zero (the list carries no signal).
// Throws UsageError on empty input or a length mismatch.
std::optional<double> NdcgAtK(std::span<const double> labels,
                              std::span<const double> scores, size_t k);

// Mean over values, independent of their order: the values are summed in
// ascending order. Returns 0 for an empty input.
double OrderFreeMean(std::vector<double> values);

struct MetricReport {
  std::vector<size_t> cutoffs;
  std::vector<double> mean_ndcg;  // one per cutoff, over scored lists
  size_t list_count = 0;          // lists contributing to the means
  size_t skipped_count = 0;       // lists with zero ideal DCG

  double at(size_t k) const;
};

// Throws DataError for an empty dataset or incompatible schema.
MetricReport Evaluate(const Ranker& model, const RankingDataset& dataset,
                      std::span<const size_t> cutoffs);

void WriteMetricReportCsv(const MetricReport& report, std::ostream& out);

}  // namespace rankgam

#endif  // RANKGAM_METRICS_H_
