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

#include "rankgam/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "rankgam/common.h"

namespace rankgam {
namespace {

double Gain(double label) { return std::exp2(label) - 1.0; }

double Discount(size_t rank) {
  return 1.0 / std::log2(1.0 + static_cast<double>(rank));
}

}  // namespace

std::vector<size_t> RankOrder(std::span<const double> scores) {
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

double IdealDcg(std::span<const double> labels, size_t k) {
  std::vector<double> sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const size_t depth = std::min(k, sorted.size());
  double dcg = 0.0;
  for (size_t r = 0; r < depth; ++r) dcg += Gain(sorted[r]) * Discount(r + 1);
  return dcg;
}

std::optional<double> NdcgAtK(std::span<const double> labels,
                              std::span<const double> scores, size_t k) {
  if (labels.empty()) throw UsageError("NDCG of an empty list");
  if (labels.size() != scores.size()) {
    throw UsageError("NDCG: labels and scores differ in length");
  }
  if (k == 0) throw UsageError("NDCG cutoff must be >= 1");
  const double ideal = IdealDcg(labels, k);
  if (ideal == 0.0) return std::nullopt;
  const auto order = RankOrder(scores);
  const size_t depth = std::min(k, order.size());
  double dcg = 0.0;
  for (size_t r = 0; r < depth; ++r) dcg += Gain(labels[order[r]]) * Discount(r + 1);
  return dcg / ideal;
}

double OrderFreeMean(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

double MetricReport::at(size_t k) const {
  for (size_t c = 0; c < cutoffs.size(); ++c) {
    if (cutoffs[c] == k) return mean_ndcg[c];
  }
  throw UsageError("cutoff " + std::to_string(k) + " not in report");
}

MetricReport Evaluate(const Ranker& model, const RankingDataset& dataset,
                      std::span<const size_t> cutoffs) {
  if (dataset.empty()) throw DataError("cannot evaluate an empty dataset");
  if (cutoffs.empty()) throw UsageError("no NDCG cutoffs requested");
  model.CheckCompatible(dataset.schema());
  MetricReport report;
  report.cutoffs.assign(cutoffs.begin(), cutoffs.end());
  std::vector<std::vector<double>> per_cutoff(cutoffs.size());
  std::vector<double> scores;
  for (const auto& list : dataset.lists()) {
    if (IdealDcg(list.labels(), 1) == 0.0) {
      ++report.skipped_count;
      continue;
    }
    scores.resize(list.size());
    model.ScoreItems(list.context(), list.features(), scores);
    for (size_t c = 0; c < cutoffs.size(); ++c) {
      per_cutoff[c].push_back(*NdcgAtK(list.labels(), scores, cutoffs[c]));
    }
    ++report.list_count;
  }
  for (auto& values : per_cutoff) {
    report.mean_ndcg.push_back(OrderFreeMean(std::move(values)));
  }
  return report;
}

void WriteMetricReportCsv(const MetricReport& report, std::ostream& out) {
  for (size_t k : report.cutoffs) out << "ndcg" << k << ',';
  out << "lists,skipped\n";
  for (double value : report.mean_ndcg) out << FormatDouble(value) << ',';
  out << report.list_count << ',' << report.skipped_count << '\n';
}

}  // namespace rankgam
