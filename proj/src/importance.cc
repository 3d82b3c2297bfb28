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

#include "rankgam/importance.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rankgam/common.h"
#include "rankgam/metrics.h"
#include "rankgam/rng.h"

namespace rankgam {
namespace {

constexpr size_t kImportanceCutoff = 5;
constexpr double kTrimFraction = 0.05;
constexpr size_t kMinTrimSamples = 20;

void CheckFeature(const Ranker& model, size_t j) {
  if (j >= model.num_features()) {
    throw UsageError("feature index " + std::to_string(j + 1) +
                     " out of range (n = " +
                     std::to_string(model.num_features()) + ")");
  }
}

std::vector<double> AverageRanks(std::span<const double> values) {
  const auto order = [&] {
    std::vector<size_t> idx(values.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](size_t a, size_t b) { return values[a] < values[b]; });
    return idx;
  }();
  std::vector<double> ranks(values.size());
  size_t start = 0;
  while (start < order.size()) {
    size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    const double rank = 0.5 * static_cast<double>(start + end - 1) + 1.0;
    for (size_t t = start; t < end; ++t) ranks[order[t]] = rank;
    start = end;
  }
  return ranks;
}

}  // namespace

double PermutationImportance(const Ranker& model, const RankingDataset& dataset,
                             size_t j, size_t repetitions, uint64_t seed) {
  CheckFeature(model, j);
  if (repetitions == 0) throw UsageError("repetitions must be >= 1");
  if (dataset.empty()) throw DataError("cannot compute importance on an empty dataset");
  model.CheckCompatible(dataset.schema());

  const size_t n = model.num_features();
  std::vector<double> baseline;
  std::vector<double> scores;
  for (const auto& list : dataset.lists()) {
    scores.resize(list.size());
    model.ScoreItems(list.context(), list.features(), scores);
    if (auto ndcg = NdcgAtK(list.labels(), scores, kImportanceCutoff)) {
      baseline.push_back(*ndcg);
    }
  }
  const double baseline_mean = OrderFreeMean(baseline);

  Rng rng(MixSeed(seed, j));
  std::vector<double> drops;
  std::vector<double> features;
  std::vector<double> column;
  for (size_t r = 0; r < repetitions; ++r) {
    std::vector<double> shuffled;
    for (const auto& list : dataset.lists()) {
      const size_t l = list.size();
      features.assign(list.features().begin(), list.features().end());
      column.resize(l);
      for (size_t i = 0; i < l; ++i) column[i] = features[i * n + j];
      rng.Shuffle(std::span<double>(column));
      for (size_t i = 0; i < l; ++i) features[i * n + j] = column[i];
      scores.resize(l);
      model.ScoreItems(list.context(), features, scores);
      if (auto ndcg = NdcgAtK(list.labels(), scores, kImportanceCutoff)) {
        shuffled.push_back(*ndcg);
      }
    }
    drops.push_back(baseline_mean - OrderFreeMean(std::move(shuffled)));
  }
  return OrderFreeMean(std::move(drops));
}

double EffectiveRange(const Ranker& model, const RankingDataset& dataset,
                      size_t j) {
  CheckFeature(model, j);
  std::vector<double> xs;
  xs.reserve(dataset.num_items());
  for (const auto& list : dataset.lists()) {
    for (size_t i = 0; i < list.size(); ++i) xs.push_back(list.feature(i, j));
  }
  if (xs.empty()) throw DataError("no values for feature " + std::to_string(j + 1));
  std::sort(xs.begin(), xs.end());
  size_t trim = 0;
  if (xs.size() < kMinTrimSamples) {
    Warn("feature " + std::to_string(j + 1) + ": only " +
         std::to_string(xs.size()) + " values, effective range not trimmed");
  } else {
    trim = static_cast<size_t>(std::floor(kTrimFraction * static_cast<double>(xs.size())));
  }
  double lo = 0.0;
  double hi = 0.0;
  bool first = true;
  for (size_t i = trim; i < xs.size() - trim; ++i) {
    if (i > trim && xs[i] == xs[i - 1]) continue;
    const double f = model.Contribution(j, xs[i]);
    if (first) {
      lo = hi = f;
      first = false;
    } else {
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
  }
  return hi - lo;
}

std::optional<double> SpearmanCorrelation(std::span<const double> a,
                                          std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("Spearman: length mismatch");
  if (a.size() < 2) return std::nullopt;
  const auto ra = AverageRanks(a);
  const auto rb = AverageRanks(b);
  const double mean = 0.5 * static_cast<double>(a.size() + 1);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double da = ra[i] - mean;
    const double db = rb[i] - mean;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

ImportanceReport ComputeImportance(const Ranker& model,
                                   const RankingDataset& dataset,
                                   size_t repetitions, uint64_t seed) {
  ImportanceReport report;
  report.repetitions = repetitions;
  report.seed = seed;
  const size_t n = model.num_features();
  std::vector<std::vector<double>> weights(n);
  if (model.mode() == ModelMode::kContextPresent) {
    for (const auto& list : dataset.lists()) {
      const auto alpha = model.ContextWeights(list.context());
      for (size_t j = 0; j < n; ++j) weights[j].push_back(alpha[j]);
    }
  }
  std::vector<double> ranges, drops;
  for (size_t j = 0; j < n; ++j) {
    FeatureImportance item;
    item.feature = j;
    item.delta_ndcg5 = PermutationImportance(model, dataset, j, repetitions, seed);
    item.effective_range = EffectiveRange(model, dataset, j);
    if (model.mode() == ModelMode::kContextPresent) {
      item.mean_weight = OrderFreeMean(std::move(weights[j]));
    }
    ranges.push_back(item.effective_range);
    drops.push_back(item.delta_ndcg5);
    report.features.push_back(item);
  }
  report.correlation = SpearmanCorrelation(ranges, drops);
  return report;
}

ImportanceReport ImportanceCorrelation(const Ranker& model,
                                       const RankingDataset& dataset,
                                       size_t repetitions, uint64_t seed) {
  if (model.num_features() < 2) {
    throw UsageError("importance correlation needs at least 2 features");
  }
  return ComputeImportance(model, dataset, repetitions, seed);
}

void WriteImportanceCsv(const ImportanceReport& report, std::ostream& out) {
  out << "feature,delta_ndcg5,effective_range,mean_weight\n";
  for (const auto& f : report.features) {
    out << (f.feature + 1) << ',' << FormatDouble(f.delta_ndcg5) << ','
        << FormatDouble(f.effective_range) << ',';
    if (f.mean_weight) out << FormatDouble(*f.mean_weight);
    out << '\n';
  }
}

void WriteScatterCsv(const ImportanceReport& report, std::ostream& out) {
  out << "feature,effective_range,delta_ndcg5\n";
  for (const auto& f : report.features) {
    out << (f.feature + 1) << ',' << FormatDouble(f.effective_range) << ','
        << FormatDouble(f.delta_ndcg5) << '\n';
  }
  out << "# spearman="
      << (report.correlation ? FormatDouble(*report.correlation) : "undefined")
      << '\n';
}

}  // namespace rankgam
