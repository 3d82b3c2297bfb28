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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "rankgam/metrics.h"
#include "rankgam/synthetic.h"
#include "rankgam/training.h"
#include "test_util.h"

using namespace rankgam;

namespace {

GamModel SmallModel(const Schema& schema, ModelMode mode, uint64_t seed) {
  ModelConfig config;
  config.mode = mode;
  config.item_hidden = {5, 3};
  config.context_hidden = {6, 4};
  config.embedding_dim = 3;
  config.seed = seed;
  return GamModel(schema, config);
}

// Largest violation of |fd - exact| <= abs_tol + rel_tol * |fd| over all
// parameters, measured as a ratio (<= 1 passes).
double WorstGradientRatio(const LossKind& loss, GamModel model,
                          const QueryList& list) {
  const GradientTape exact = LossGradient(loss, model, list);
  auto blocks = model.MutableParameterBlocks();
  double worst = 0.0;
  for (size_t b = 0; b < blocks.size(); ++b) {
    for (size_t i = 0; i < blocks[b].size(); ++i) {
      double& p = blocks[b][i];
      const double saved = p;
      const double h = 1e-6 * std::max(1.0, std::abs(saved));
      p = saved + h;
      const double up = LossValue(loss, list.labels(), model.ScoreList(list));
      p = saved - h;
      const double down = LossValue(loss, list.labels(), model.ScoreList(list));
      p = saved;
      const double fd = (up - down) / (2 * h);
      const double err = std::abs(fd - exact.blocks()[b][i]);
      worst = std::max(worst, err / (1e-6 + 1e-4 * std::abs(fd)));
    }
  }
  return worst;
}

RankingDataset Synthetic(size_t lists, uint64_t seed, size_t context = 1) {
  SyntheticSpec spec;
  spec.num_features = 3;
  spec.num_context = context;
  spec.num_lists = lists;
  spec.seed = seed;
  return GenerateSynthetic(spec).dataset;
}

}  // namespace

TEST_CASE("loss values against high-precision oracles") {
  const std::vector<double> y2 = {3, 1}, s2 = {2, 1};
  CHECK(LossValue(LossKind::ApproxNdcg(0.1), y2, s2) ==
        doctest::Approx(-0.99997110017080084876).epsilon(1e-14));
  const std::vector<double> y4 = {2, 0, 1, 3}, s4 = {0.3, -0.2, 0.25, 0.1};
  CHECK(LossValue(LossKind::ApproxNdcg(0.1), y4, s4) ==
        doctest::Approx(-0.70368461342923443218).epsilon(1e-14));
  CHECK(LossValue(LossKind::ApproxNdcg(1.0), y4, s4) ==
        doctest::Approx(-0.65668553701289183195).epsilon(1e-14));
  CHECK(LossValue(LossKind::Mse(), y2, s2) == 0.5);
  const std::vector<double> zeros = {0, 0};
  CHECK(LossValue(LossKind::ApproxNdcg(), zeros, s2) == 0.0);
  CHECK(LossScoreGradient(LossKind::ApproxNdcg(), zeros, s2).skipped);
  CHECK_FALSE(LossScoreGradient(LossKind::Mse(), zeros, s2).skipped);
}

TEST_CASE("approx ndcg ignores a common score shift and mse does not") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> labels = {3, 0, 1, 2, 0}, scores(5);
    for (double& s : scores) s = rng.Uniform(-1, 1);
    std::vector<double> shifted = scores;
    const double c = rng.Uniform(-5, 5);
    for (double& s : shifted) s += c;
    const LossKind approx = LossKind::ApproxNdcg(0.1);
    CHECK(std::abs(LossValue(approx, labels, shifted) - LossValue(approx, labels, scores)) <
          1e-9);
    CHECK(LossValue(LossKind::Mse(), labels, shifted) !=
          LossValue(LossKind::Mse(), labels, scores));
  }
}

TEST_CASE("loss parsing") {
  CHECK(ParseLossKind("mse", 0.1).type == LossKind::Type::kMse);
  const LossKind approx = ParseLossKind("approx_ndcg", 0.3);
  CHECK(approx.type == LossKind::Type::kApproxNdcg);
  CHECK(approx.temperature == 0.3);
  CHECK(LossName(approx) == "approx_ndcg");
  CHECK_THROWS_AS(ParseLossKind("hinge", 0.1), UsageError);
}

TEST_CASE("score gradient matches finite differences") {
  Rng rng(21);
  for (const LossKind& loss : {LossKind::ApproxNdcg(0.1), LossKind::ApproxNdcg(1.0),
                               LossKind::Mse()}) {
    for (int trial = 0; trial < 40; ++trial) {
      const size_t l = 2 + rng.UniformInt(8);
      std::vector<double> labels(l), scores(l);
      for (double& y : labels) y = static_cast<double>(rng.UniformInt(5));
      labels[0] = 2;
      for (double& s : scores) s = rng.Uniform(-1, 1);
      const ScoreGradient g = LossScoreGradient(loss, labels, scores);
      CHECK(g.value == LossValue(loss, labels, scores));
      for (size_t i = 0; i < l; ++i) {
        const double saved = scores[i];
        scores[i] = saved + 1e-6;
        const double up = LossValue(loss, labels, scores);
        scores[i] = saved - 1e-6;
        const double down = LossValue(loss, labels, scores);
        scores[i] = saved;
        CHECK(g.grad[i] == doctest::Approx((up - down) / 2e-6).epsilon(1e-4).scale(1e-2));
      }
    }
  }
}

TEST_CASE("parameter gradient matches finite differences in every mode") {
  const Schema schema = testing::ContextSchema(3, {"a", "b", "c"}, true);
  Rng rng(8);
  for (ModelMode mode : {ModelMode::kContextAbsent, ModelMode::kContextPresent,
                         ModelMode::kNaiveContext}) {
    for (const LossKind& loss : {LossKind::ApproxNdcg(0.5), LossKind::Mse()}) {
      for (int trial = 0; trial < 3; ++trial) {
        const GamModel model = SmallModel(schema, mode, 100 + trial);
        const std::vector<FeatureValue> ctx = {
            FeatureValue::Categorical(trial == 2 ? "z" : "b"),
            FeatureValue::Numeric(rng.Uniform(-1, 1))};
        const QueryList list = testing::RandomList(rng, "q", 5, 3, ctx);
        CAPTURE(ModelModeName(mode));
        CAPTURE(LossName(loss));
        CHECK(WorstGradientRatio(loss, model, list) <= 1.0);
      }
    }
  }
}

TEST_CASE("accumulated gradient is scaled and skipped lists add nothing") {
  const Schema schema = testing::ContextSchema(3, {"a"}, false);
  const GamModel model = SmallModel(schema, ModelMode::kContextPresent, 2);
  Rng rng(3);
  const QueryList list =
      testing::RandomList(rng, "q", 4, 3, {FeatureValue::Categorical("a")});
  const GradientTape single = LossGradient(LossKind::Mse(), model, list);
  GradientTape tape(model);
  AccumulateListGradient(LossKind::Mse(), model, list, 0.5, tape);
  AccumulateListGradient(LossKind::Mse(), model, list, 0.5, tape);
  for (size_t b = 0; b < tape.blocks().size(); ++b) {
    for (size_t i = 0; i < tape.blocks()[b].size(); ++i) {
      CHECK(tape.blocks()[b][i] == doctest::Approx(single.blocks()[b][i]));
    }
  }

  const QueryList unlabeled("z", {FeatureValue::Categorical("a")}, 3,
                            std::vector<double>(12, 0.5), std::vector<double>(4, 0.0));
  GradientTape empty(model);
  const ScoreGradient g =
      AccumulateListGradient(LossKind::ApproxNdcg(), model, unlabeled, 1.0, empty);
  CHECK(g.skipped);
  CHECK(empty.AllZero());
}

TEST_CASE("adagrad") {
  const Schema schema = testing::ContextSchema(2, {"a"}, false);
  GamModel model = SmallModel(schema, ModelMode::kContextAbsent, 1);
  const GamModel before = model;
  AdaGrad optimizer(model, 0.1, {});
  GradientTape tape(model);
  optimizer.Step(model, tape);
  CHECK(model == before);

  // First step with accumulator a0: p -= lr * g / sqrt(a0 + g^2 + eps).
  tape.blocks()[0][0] = 2.0;
  optimizer.Step(model, tape);
  const double expected =
      before.ParameterBlocks()[0][0] - 0.1 * 2.0 / std::sqrt(0.1 + 4.0 + 1e-7);
  CHECK(model.ParameterBlocks()[0][0] == doctest::Approx(expected).epsilon(1e-15));
  CHECK(model.ParameterBlocks()[0][1] == before.ParameterBlocks()[0][1]);
}

TEST_CASE("training decreases the loss and is deterministic") {
  testing::WarningCapture quiet;
  const RankingDataset train = Synthetic(40, 1);
  const RankingDataset valid = Synthetic(20, 2);
  TrainConfig config;
  config.loss = LossKind::Mse();
  config.epochs = 5;
  config.batch_size = 8;
  config.seed = 3;
  const GamModel init = SmallModel(train.schema(), ModelMode::kContextPresent, 4);
  const TrainResult a = Train(init, train, valid, config);
  REQUIRE(a.log.size() == 5);
  for (size_t e = 1; e < a.log.size(); ++e) {
    CHECK(a.log[e].train_loss < a.log[e - 1].train_loss);
  }
  const TrainResult b = Train(init, train, valid, config);
  CHECK(a.model == b.model);
  CHECK(a.best_epoch == b.best_epoch);

  // The returned model is the one with the best validation NDCG@5.
  double best = -1.0;
  size_t best_epoch = 0;
  for (const auto& m : a.log) {
    if (m.valid_ndcg5 > best) {
      best = m.valid_ndcg5;
      best_epoch = m.epoch;
    }
  }
  CHECK(a.best_epoch == best_epoch);
  CHECK(a.best_valid_ndcg5 == best);
  const std::vector<size_t> cutoffs = {1, 5, 10};
  CHECK(Evaluate(a.model, valid, cutoffs).at(5) == best);

  config.seed = 4;
  CHECK_FALSE(Train(init, train, valid, config).model == a.model);
}

TEST_CASE("training errors") {
  testing::WarningCapture quiet;
  const RankingDataset train = Synthetic(10, 1, 0);
  const GamModel init = SmallModel(train.schema(), ModelMode::kContextAbsent, 1);
  TrainConfig config;
  config.epochs = 2;
  CHECK_THROWS_AS(Train(init, RankingDataset(), train, config), DataError);
  CHECK_THROWS_AS(Train(init, train, RankingDataset(), config), DataError);

  TrainConfig bad = config;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(Train(init, train, train, bad), UsageError);
  bad = config;
  bad.epochs = 0;
  CHECK_THROWS_AS(Train(init, train, train, bad), UsageError);
  bad = config;
  bad.batch_size = 0;
  CHECK_THROWS_AS(Train(init, train, train, bad), UsageError);
  bad = config;
  bad.loss.temperature = -1.0;
  CHECK_THROWS_AS(Train(init, train, train, bad), UsageError);

  // Huge labels with MSE and a huge step overflow.
  std::vector<QueryList> lists;
  for (const auto& list : train.lists()) {
    std::vector<double> labels(list.size(), 1e200);
    lists.emplace_back(list.qid(), list.context(), 3,
                       std::vector<double>(list.features().begin(), list.features().end()),
                       labels);
  }
  const RankingDataset overflow(train.schema(), lists);
  TrainConfig diverge = config;
  diverge.loss = LossKind::Mse();
  diverge.learning_rate = 1e10;
  CHECK_THROWS_AS(Train(init, overflow, train, diverge), NumericError);
}

TEST_CASE("gradient clipping bounds the update") {
  testing::WarningCapture quiet;
  const RankingDataset train = Synthetic(10, 5, 0);
  TrainConfig config;
  config.loss = LossKind::Mse();
  config.epochs = 1;
  config.clip_norm = 1e-3;
  const GamModel init = SmallModel(train.schema(), ModelMode::kContextAbsent, 1);
  CHECK_NOTHROW(Train(init, train, train, config));
}

TEST_CASE("metrics log csv") {
  EpochMetrics m;
  m.epoch = 1;
  m.train_loss = -0.5;
  m.valid_ndcg1 = 0.25;
  m.valid_ndcg5 = 0.5;
  m.valid_ndcg10 = 0.75;
  m.elapsed_seconds = 2;
  std::ostringstream out;
  WriteMetricsLog({m}, out);
  CHECK(out.str() ==
        "epoch,train_loss,valid_ndcg1,valid_ndcg5,valid_ndcg10,elapsed_seconds\n"
        "1,-0.5,0.25,0.5,0.75,2\n");
}
