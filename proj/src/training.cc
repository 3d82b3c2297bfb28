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

#include "rankgam/training.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "rankgam/common.h"
#include "rankgam/metrics.h"
#include "rankgam/rng.h"

namespace rankgam {
namespace {

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void CheckLossArgs(std::span<const double> labels,
                   std::span<const double> scores) {
  if (labels.empty()) throw UsageError("loss of an empty list");
  if (labels.size() != scores.size()) {
    throw UsageError("loss: labels and scores differ in length");
  }
}

// Smoothed ranks r_i = 1 + sum_{i' != i} sigmoid((s_i' - s_i) / t).
std::vector<double> SmoothedRanks(std::span<const double> scores, double t) {
  const size_t l = scores.size();
  std::vector<double> ranks(l, 1.0);
  for (size_t i = 0; i < l; ++i) {
    for (size_t k = 0; k < l; ++k) {
      if (k != i) ranks[i] += Sigmoid((scores[k] - scores[i]) / t);
    }
  }
  return ranks;
}

}  // namespace

LossKind LossKind::ApproxNdcg(double temperature) {
  return LossKind{Type::kApproxNdcg, temperature};
}

LossKind LossKind::Mse() { return LossKind{Type::kMse, 0.1}; }

LossKind ParseLossKind(const std::string& name, double temperature) {
  if (name == "approx_ndcg") {
    if (!(temperature > 0.0)) throw UsageError("temperature must be > 0");
    return LossKind::ApproxNdcg(temperature);
  }
  if (name == "mse") return LossKind::Mse();
  throw UsageError("unknown loss '" + name + "' (approx_ndcg|mse)");
}

std::string LossName(const LossKind& loss) {
  return loss.type == LossKind::Type::kMse ? "mse" : "approx_ndcg";
}

double LossValue(const LossKind& loss, std::span<const double> labels,
                 std::span<const double> scores) {
  CheckLossArgs(labels, scores);
  const size_t l = labels.size();
  if (loss.type == LossKind::Type::kMse) {
    double total = 0.0;
    for (size_t i = 0; i < l; ++i) {
      const double diff = labels[i] - scores[i];
      total += diff * diff;
    }
    return total / static_cast<double>(l);
  }
  const double ideal = IdealDcg(labels);
  if (ideal == 0.0) return 0.0;
  const auto ranks = SmoothedRanks(scores, loss.temperature);
  double dcg = 0.0;
  for (size_t i = 0; i < l; ++i) {
    dcg += (std::exp2(labels[i]) - 1.0) / std::log2(1.0 + ranks[i]);
  }
  return -dcg / ideal;
}

ScoreGradient LossScoreGradient(const LossKind& loss,
                                std::span<const double> labels,
                                std::span<const double> scores) {
  CheckLossArgs(labels, scores);
  const size_t l = labels.size();
  ScoreGradient result;
  result.grad.assign(l, 0.0);
  if (loss.type == LossKind::Type::kMse) {
    const double inv = 1.0 / static_cast<double>(l);
    for (size_t i = 0; i < l; ++i) {
      const double diff = scores[i] - labels[i];
      result.value += diff * diff;
      result.grad[i] = 2.0 * diff * inv;
    }
    result.value /= static_cast<double>(l);
    return result;
  }
  const double ideal = IdealDcg(labels);
  if (ideal == 0.0) {
    result.skipped = true;
    return result;
  }
  const double t = loss.temperature;
  const auto ranks = SmoothedRanks(scores, t);
  double dcg = 0.0;
  for (size_t i = 0; i < l; ++i) {
    const double gain = std::exp2(labels[i]) - 1.0;
    const double log_rank = std::log2(1.0 + ranks[i]);
    dcg += gain / log_rank;
    if (gain == 0.0) continue;
    // d(loss)/d(r_i)
    const double d_rank =
        gain / (ideal * log_rank * log_rank * (1.0 + ranks[i]) * std::log(2.0));
    for (size_t k = 0; k < l; ++k) {
      if (k == i) continue;
      const double s = Sigmoid((scores[k] - scores[i]) / t);
      const double d = d_rank * s * (1.0 - s) / t;
      result.grad[k] += d;
      result.grad[i] -= d;
    }
  }
  result.value = -dcg / ideal;
  return result;
}

GradientTape::GradientTape(const GamModel& model) {
  for (const auto& block : model.ParameterBlocks()) {
    blocks_.emplace_back(block.size(), 0.0);
  }
}

void GradientTape::Zero() {
  for (auto& block : blocks_) std::fill(block.begin(), block.end(), 0.0);
}

void GradientTape::Scale(double factor) {
  for (auto& block : blocks_) {
    for (double& g : block) g *= factor;
  }
}

double GradientTape::SquaredNorm() const {
  double total = 0.0;
  for (const auto& block : blocks_) {
    for (double g : block) total += g * g;
  }
  return total;
}

bool GradientTape::AllZero() const {
  for (const auto& block : blocks_) {
    for (double g : block) {
      if (g != 0.0) return false;
    }
  }
  return true;
}

ScoreGradient AccumulateListGradient(const LossKind& loss,
                                     const GamModel& model,
                                     const QueryList& list, double scale,
                                     GradientTape& tape) {
  const size_t n = model.num_features();
  const size_t l = list.size();
  const size_t num_items = model.item_nets().size();
  const size_t num_towers = model.towers().size();
  const ModelMode mode = model.mode();
  if (list.num_features() != n) throw UsageError("item feature count mismatch");
  if (mode != ModelMode::kContextAbsent &&
      list.context().size() != model.schema().num_context()) {
    throw UsageError("context length mismatch");
  }

  // Context side of the forward pass.
  std::vector<FeedForward::Trace> tower_traces(num_towers);
  std::vector<std::vector<double>> tower_alpha(num_towers, std::vector<double>(n));
  std::vector<double> alpha(n, 0.0);
  for (size_t k = 0; k < num_towers; ++k) {
    const auto& net = model.towers()[k].net();
    net.ForwardTrace(net.Resolve(list.context()[k]), tower_traces[k],
                     tower_alpha[k]);
    Softmax(tower_alpha[k]);
    for (size_t j = 0; j < n; ++j) alpha[j] += tower_alpha[k][j];
  }
  const size_t num_context_nets = model.context_nets().size();
  std::vector<FeedForward::Trace> context_traces(num_context_nets);
  double offset = 0.0;
  for (size_t k = 0; k < num_context_nets; ++k) {
    const auto& net = model.context_nets()[k].net();
    double value = 0.0;
    net.ForwardTrace(net.Resolve(list.context()[k]), context_traces[k],
                     {&value, 1});
    offset += value;
  }

  // Item sub-scores and assembled scores, summed as in ScoreItems.
  std::vector<double> subscores(l * n);
  std::vector<double> scores(l);
  for (size_t i = 0; i < l; ++i) {
    double score = 0.0;
    for (size_t j = 0; j < n; ++j) {
      const double s = model.item_nets()[j](list.feature(i, j));
      subscores[i * n + j] = s;
      score += mode == ModelMode::kContextPresent ? alpha[j] * s : s;
    }
    if (mode == ModelMode::kNaiveContext) score += offset;
    scores[i] = score;
  }

  ScoreGradient upstream = LossScoreGradient(loss, list.labels(), scores);
  if (upstream.skipped) return upstream;
  for (double& g : upstream.grad) g *= scale;

  auto& blocks = tape.blocks();
  FeedForward::Trace trace;
  double unused = 0.0;
  std::vector<double> grad_alpha(n, 0.0);
  for (size_t i = 0; i < l; ++i) {
    const double g_score = upstream.grad[i];
    if (g_score == 0.0) continue;
    for (size_t j = 0; j < n; ++j) {
      double g_sub = g_score;
      if (mode == ModelMode::kContextPresent) {
        g_sub = g_score * alpha[j];
        grad_alpha[j] += g_score * subscores[i * n + j];
      }
      if (g_sub == 0.0) continue;
      const auto& net = model.item_nets()[j].net();
      net.ForwardTrace(NetInput{list.feature(i, j), 0}, trace, {&unused, 1});
      net.Backward(trace, {&g_sub, 1}, blocks[j]);
    }
  }

  // Softmax backward: d/dlogit_j = a_j * (g_j - sum_i a_i g_i).
  std::vector<double> grad_logits(n);
  for (size_t k = 0; k < num_towers; ++k) {
    const auto& a = tower_alpha[k];
    double dot = 0.0;
    for (size_t j = 0; j < n; ++j) dot += a[j] * grad_alpha[j];
    for (size_t j = 0; j < n; ++j) grad_logits[j] = a[j] * (grad_alpha[j] - dot);
    model.towers()[k].net().Backward(tower_traces[k], grad_logits,
                                     blocks[num_items + k]);
  }

  if (num_context_nets > 0) {
    double g_offset = 0.0;
    for (double g : upstream.grad) g_offset += g;
    for (size_t k = 0; k < num_context_nets; ++k) {
      model.context_nets()[k].net().Backward(
          context_traces[k], {&g_offset, 1},
          blocks[num_items + num_towers + k]);
    }
  }
  return upstream;
}

GradientTape LossGradient(const LossKind& loss, const GamModel& model,
                          const QueryList& list) {
  GradientTape tape(model);
  AccumulateListGradient(loss, model, list, 1.0, tape);
  return tape;
}

AdaGrad::AdaGrad(const GamModel& model, double learning_rate,
                 AdaGradConfig config)
    : learning_rate_(learning_rate), config_(config) {
  for (const auto& block : model.ParameterBlocks()) {
    accumulators_.emplace_back(block.size(), config_.initial_accumulator);
  }
}

void AdaGrad::Step(GamModel& model, const GradientTape& tape) {
  auto params = model.MutableParameterBlocks();
  for (size_t b = 0; b < params.size(); ++b) {
    const auto& grad = tape.blocks()[b];
    auto& acc = accumulators_[b];
    for (size_t i = 0; i < grad.size(); ++i) {
      const double g = grad[i];
      if (g == 0.0) continue;
      acc[i] += g * g;
      params[b][i] -= learning_rate_ * g / std::sqrt(acc[i] + config_.epsilon);
    }
  }
}

void TrainConfig::Validate() const {
  if (loss.type == LossKind::Type::kApproxNdcg && !(loss.temperature > 0.0)) {
    throw UsageError("temperature must be > 0");
  }
  if (!(learning_rate > 0.0)) throw UsageError("learning rate must be > 0");
  if (epochs == 0) throw UsageError("epochs must be >= 1");
  if (batch_size == 0) throw UsageError("batch size must be >= 1");
  if (!(adagrad.epsilon > 0.0)) throw UsageError("AdaGrad epsilon must be > 0");
  if (!(adagrad.initial_accumulator >= 0.0)) {
    throw UsageError("AdaGrad initial accumulator must be >= 0");
  }
  if (clip_norm && !(*clip_norm > 0.0)) {
    throw UsageError("gradient clip must be > 0");
  }
}

TrainResult Train(GamModel model, const RankingDataset& train_set,
                  const RankingDataset& valid_set, const TrainConfig& config) {
  config.Validate();
  if (train_set.empty()) throw DataError("empty training set");
  if (valid_set.empty()) throw DataError("empty validation set");
  model.CheckCompatible(train_set.schema());
  model.CheckCompatible(valid_set.schema());

  const auto start = std::chrono::steady_clock::now();
  const std::vector<size_t> cutoffs = {1, 5, 10};
  Rng rng(config.seed);
  AdaGrad optimizer(model, config.learning_rate, config.adagrad);
  GradientTape tape(model);
  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), size_t{0});

  TrainResult result;
  bool have_best = false;
  for (size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.Shuffle(std::span<size_t>(order));
    double loss_total = 0.0;
    size_t loss_count = 0;
    for (size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const size_t end = std::min(order.size(), begin + config.batch_size);
      tape.Zero();
      size_t contributing = 0;
      double batch_loss = 0.0;
      for (size_t b = begin; b < end; ++b) {
        const auto& list = train_set.lists()[order[b]];
        const ScoreGradient g =
            AccumulateListGradient(config.loss, model, list, 1.0, tape);
        if (g.skipped) continue;
        batch_loss += g.value;
        ++contributing;
      }
      if (contributing == 0) continue;
      if (!std::isfinite(batch_loss)) {
        throw NumericError("non-finite training loss at epoch " +
                           std::to_string(epoch) + ", batch starting at list " +
                           std::to_string(begin) + "; lower the learning rate "
                           "or enable gradient clipping");
      }
      loss_total += batch_loss;
      loss_count += contributing;
      tape.Scale(1.0 / static_cast<double>(contributing));
      if (config.clip_norm) {
        const double norm = std::sqrt(tape.SquaredNorm());
        if (norm > *config.clip_norm) tape.Scale(*config.clip_norm / norm);
      }
      optimizer.Step(model, tape);
    }

    const MetricReport report = Evaluate(model, valid_set, cutoffs);
    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.train_loss =
        loss_count > 0 ? loss_total / static_cast<double>(loss_count) : 0.0;
    metrics.valid_ndcg1 = report.mean_ndcg[0];
    metrics.valid_ndcg5 = report.mean_ndcg[1];
    metrics.valid_ndcg10 = report.mean_ndcg[2];
    metrics.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (!std::isfinite(metrics.valid_ndcg5)) {
      throw NumericError("non-finite validation NDCG at epoch " +
                         std::to_string(epoch));
    }
    result.log.push_back(metrics);
    if (!have_best || metrics.valid_ndcg5 > result.best_valid_ndcg5) {
      have_best = true;
      result.best_epoch = epoch;
      result.best_valid_ndcg5 = metrics.valid_ndcg5;
      result.model = model;
    }
  }
  return result;
}

void WriteMetricsLog(const std::vector<EpochMetrics>& log, std::ostream& out) {
  out << "epoch,train_loss,valid_ndcg1,valid_ndcg5,valid_ndcg10,elapsed_seconds\n";
  for (const auto& m : log) {
    out << m.epoch << ',' << FormatDouble(m.train_loss) << ','
        << FormatDouble(m.valid_ndcg1) << ',' << FormatDouble(m.valid_ndcg5)
        << ',' << FormatDouble(m.valid_ndcg10) << ','
        << FormatDouble(m.elapsed_seconds) << '\n';
  }
}

}  // namespace rankgam
