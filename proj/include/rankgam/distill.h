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

#ifndef RANKGAM_DISTILL_H_
#define RANKGAM_DISTILL_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rankgam/dataset.h"
#include "rankgam/model.h"
#include "rankgam/pwl.h"

namespace rankgam {

// Pairs (x_i, f(x_i)) drawn from one feature through its trained sub-model.
struct DistillSample {
  std::vector<double> x;
  std::vector<double> y;

  size_t size() const { return x.size(); }
  // Throws UsageError on length mismatch, emptiness or non-finite values.
  void Validate() const;
};

// Knot candidates: the nearest-rank 0%, 1%, ..., 100% percentiles of the
// sample x values, deduplicated and sorted (at most 101 values). The p-th
// percentile is the value at 1-based rank max(1, ceil(p * N / 100)).
std::vector<double> BuildCandidates(std::span<const double> xs);

struct KnotFit {
  PwlFunction function;
  double loss = 0.0;        // mean squared error over the sample
  bool regularized = false; // ridge fallback was needed
};

// Least-squares knot heights for fixed knot positions. The PWL is written
// in a hat basis (flat-extended at both ends), and the K x K tridiagonal
// normal equations are solved directly. A singular system is retried with
// ridge 1e-9 * trace(Gram) and a warning.
KnotFit SolveKnotValues(const DistillSample& sample,
                        std::span<const double> knot_xs);

struct KnotSearchResult {
  PwlFunction function;
  double loss = 0.0;
  // Loss after each greedy addition.
  std::vector<double> init_trace;
  // Loss at the end of initialization followed by the loss after every
  // accepted refinement swap; strictly decreasing.
  std::vector<double> refine_trace;
  size_t refinement_passes = 0;
};

// Greedy knot search: start from the smallest candidate, add the candidate
// minimizing the loss until K knots are chosen, then repeatedly try to swap
// each chosen knot for the best unchosen candidate, accepting strict
// improvements, until a full pass changes nothing. argmin ties go to the
// smallest x. With |candidates| <= K every candidate is used.
KnotSearchResult FitKnots(const DistillSample& sample,
                          std::span<const double> candidates, size_t num_knots);

struct DistillConfig {
  size_t num_knots = 5;
  size_t sample_cap = 100000;  // per feature; larger samples are subsampled
  uint64_t seed = 0;
};

// Replaces every numeric item sub-network with a fitted PWL function. Context
// towers and naive-context sub-models are copied unchanged.
DistilledModel DistillModel(const GamModel& model,
                            const RankingDataset& train_set,
                            const DistillConfig& config);

// Training-value sample of feature j pushed through the model.
DistillSample BuildDistillSample(const GamModel& model,
                                 const RankingDataset& train_set, size_t j,
                                 size_t sample_cap, uint64_t seed);

// feature,knot_index,x,y (1-based feature and knot indices).
void WriteKnotsCsv(const DistilledModel& model, std::ostream& out);

struct LatencyEntry {
  std::string model;
  double total_seconds = 0.0;  // median over repetitions
  double per_query_ms = 0.0;
};

struct LatencyReport {
  LatencyEntry neural;
  LatencyEntry distilled;
  size_t queries = 0;
  size_t repetitions = 0;
  double speedup = 0.0;  // neural per-query time / distilled per-query time
};

// Single-threaded wall-clock scoring of every list, one warm-up pass per
// model excluded, median over `repetitions` (>= 3) timed passes.
LatencyReport BenchmarkInference(const Ranker& neural, const Ranker& distilled,
                                 const RankingDataset& dataset,
                                 size_t repetitions);

// model,total_seconds,per_query_ms
void WriteLatencyCsv(const LatencyReport& report, std::ostream& out);

}  // namespace rankgam

#endif  // RANKGAM_DISTILL_H_
