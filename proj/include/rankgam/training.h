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

#ifndef RANKGAM_TRAINING_H_
#define RANKGAM_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankgam/dataset.h"
#include "rankgam/model.h"

namespace rankgam {

struct LossKind {
  enum class Type { kApproxNdcg, kMse };
  Type type = Type::kApproxNdcg;
  double temperature = 0.1;  // approx-NDCG sigmoid temperature

  static LossKind ApproxNdcg(double temperature = 0.1);
  static LossKind Mse();
};

LossKind ParseLossKind(const std::string& name, double temperature);
std::string LossName(const LossKind& loss);

// Per-list loss.
//   mse:         (1/l) sum_i (y_i - s_i)^2
//   approx_ndcg: -(1/IDCG) sum_i (2^y_i - 1) / log2(1 + r_i),
//                r_i = 1 + sum_{i' != i} sigmoid((s_i' - s_i) / temperature)
// Lists with zero ideal DCG score 0 under approx_ndcg.
double LossValue(const LossKind& loss, std::span<const double> labels,
                 std::span<const double> scores);

// Loss and d(loss)/d(scores).
struct ScoreGradient {
  double value = 0.0;
  std::vector<double> grad;
  bool skipped = false;  // approx_ndcg on a list with zero ideal DCG
};
ScoreGradient LossScoreGradient(const LossKind& loss,
                                std::span<const double> labels,
                                std::span<const double> scores);

// Gradient accumulators mirroring GamModel::ParameterBlocks().
class GradientTape {
 public:
  GradientTape() = default;
  explicit GradientTape(const GamModel& model);

  void Zero();
  void Scale(double factor);
  double SquaredNorm() const;
  bool AllZero() const;

  std::vector<std::vector<double>>& blocks() { return blocks_; }
  const std::vector<std::vector<double>>& blocks() const { return blocks_; }

 private:
  std::vector<std::vector<double>> blocks_;
};

// Adds scale * d(loss(list))/d(params) into `tape` and returns the loss.
// Skipped lists leave the tape untouched.
ScoreGradient AccumulateListGradient(const LossKind& loss,
                                     const GamModel& model,
                                     const QueryList& list, double scale,
                                     GradientTape& tape);

// Exact gradient of LossValue(loss, labels, ScoreList(list)) with respect to
// every model parameter.
GradientTape LossGradient(const LossKind& loss, const GamModel& model,
                          const QueryList& list);

struct AdaGradConfig {
  double initial_accumulator = 0.1;
  double epsilon = 1e-7;
};

// acc += g^2;  p -= lr * g / sqrt(acc + epsilon)
class AdaGrad {
 public:
  AdaGrad(const GamModel& model, double learning_rate, AdaGradConfig config);
  void Step(GamModel& model, const GradientTape& tape);

 private:
  double learning_rate_;
  AdaGradConfig config_;
  std::vector<std::vector<double>> accumulators_;
};

struct TrainConfig {
  LossKind loss;
  double learning_rate = 0.1;
  size_t epochs = 100;
  size_t batch_size = 128;  // lists per update
  uint64_t seed = 0;        // list shuffling
  AdaGradConfig adagrad;
  std::optional<double> clip_norm;  // global gradient-norm clip

  void Validate() const;
};

struct EpochMetrics {
  size_t epoch = 0;
  double train_loss = 0.0;
  double valid_ndcg1 = 0.0;
  double valid_ndcg5 = 0.0;
  double valid_ndcg10 = 0.0;
  double elapsed_seconds = 0.0;
};

struct TrainResult {
  GamModel model;  // parameters with the best validation NDCG@5
  std::vector<EpochMetrics> log;
  size_t best_epoch = 0;
  double best_valid_ndcg5 = 0.0;
};

// Mini-batch AdaGrad over whole lists with seeded shuffling. Throws
// UsageError for bad configs, DataError for empty/incompatible data and
// NumericError when the loss becomes non-finite.
TrainResult Train(GamModel model, const RankingDataset& train_set,
                  const RankingDataset& valid_set, const TrainConfig& config);

// epoch,train_loss,valid_ndcg1,valid_ndcg5,valid_ndcg10,elapsed_seconds
void WriteMetricsLog(const std::vector<EpochMetrics>& log, std::ostream& out);

}  // namespace rankgam

#endif  // RANKGAM_TRAINING_H_
