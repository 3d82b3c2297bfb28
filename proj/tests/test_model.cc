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

#include <algorithm>
#include <cmath>

#include "rankgam/metrics.h"
#include "rankgam/model.h"
#include "rankgam/pwl.h"
#include "test_util.h"

using namespace rankgam;
using rankgam::testing::ContextSchema;

namespace {

// One hidden unit, W1 = [1], b1 = [0], head W = [w], b = 0: f(x) = w relu(x).
SubNetwork OneUnit(double head_weight) {
  SubNetwork net = SubNetwork::Numeric({1});
  auto p = net.net().params();
  REQUIRE(p.size() == 4);
  p[0] = 1.0;
  p[1] = 0.0;
  p[2] = head_weight;
  p[3] = 0.0;
  return net;
}

void ZeroHead(ContextTower& tower) {
  FeedForward& net = tower.net();
  const size_t in = net.hidden().empty() ? net.embedding_dim() : net.hidden().back();
  auto p = net.params();
  std::fill(p.end() - static_cast<std::ptrdiff_t>(in * net.outputs()), p.end(), 0.0);
}

// Straight-line forward pass over the documented parameter layout.
double OracleForward(std::span<const double> p, const std::vector<size_t>& hidden,
                     double x) {
  std::vector<double> a = {x};
  size_t offset = 0;
  for (size_t width : hidden) {
    std::vector<double> next(width);
    for (size_t o = 0; o < width; ++o) {
      double z = 0.0;
      for (size_t i = 0; i < a.size(); ++i) z += p[offset + o * a.size() + i] * a[i];
      next[o] = z;
    }
    offset += width * a.size();
    for (size_t o = 0; o < width; ++o) next[o] = std::max(0.0, next[o] + p[offset + o]);
    offset += width;
    a = next;
  }
  double out = 0.0;
  for (size_t i = 0; i < a.size(); ++i) out += p[offset + i] * a[i];
  return out + p[offset + a.size()];
}

Schema PlainSchema(size_t n) {
  Schema s;
  s.num_features = n;
  return s;
}

}  // namespace

TEST_CASE("zero network scores zero") {
  const SubNetwork net = SubNetwork::Numeric({16, 8});
  for (double x : {-3.0, 0.0, 0.37, 1e6}) CHECK(net(x) == 0.0);
}

TEST_CASE("one-unit network is hand evaluable") {
  const SubNetwork net = OneUnit(1.0);
  CHECK(net(2.0) == 2.0);
  CHECK(net(-2.0) == 0.0);
  CHECK(net.Evaluate(FeatureValue::Numeric(2.0)) == 2.0);
  CHECK_THROWS_AS(net.Evaluate(FeatureValue::Categorical("a")), UsageError);
}

TEST_CASE("seeded network matches an independent forward pass") {
  for (uint64_t seed : {1, 2, 3}) {
    SubNetwork net = SubNetwork::Numeric({16, 8});
    Rng rng(seed);
    net.net().Initialize(rng);
    const auto p = net.net().params();
    CHECK(p.size() == 16 + 16 + 16 * 8 + 8 + 8 + 1);
    for (double x : {0.37, -1.2, 4.5}) {
      CHECK(net(x) == doctest::Approx(OracleForward(p, {16, 8}, x)).epsilon(1e-14));
    }
  }
}

TEST_CASE("initialization is glorot uniform with a zero head bias") {
  SubNetwork net = SubNetwork::Numeric({16, 8});
  Rng rng(4);
  net.net().Initialize(rng);
  const auto p = net.net().params();
  const double r1 = std::sqrt(6.0 / (1 + 16));
  for (size_t i = 0; i < 16; ++i) CHECK(std::abs(p[i]) <= r1);
  CHECK(p.back() == 0.0);
  SubNetwork again = SubNetwork::Numeric({16, 8});
  Rng rng2(4);
  again.net().Initialize(rng2);
  CHECK(again == net);
}

TEST_CASE("categorical sub-network uses the oov row for unknown tokens") {
  SubNetwork net = SubNetwork::Categorical(Vocabulary({"a", "b"}), 4, {16});
  Rng rng(9);
  net.net().Initialize(rng);
  CHECK(net.Evaluate(FeatureValue::Categorical("zzz")) ==
        net.Evaluate(FeatureValue::Categorical(Vocabulary::kOovToken)));
  CHECK(net.Evaluate(FeatureValue::Categorical("a")) !=
        net.Evaluate(FeatureValue::Categorical("b")));
  CHECK_THROWS_AS(net.Evaluate(FeatureValue::Numeric(1.0)), UsageError);
}

TEST_CASE("zero-headed towers give uniform weights") {
  const Schema one = ContextSchema(4, {"x", "y"}, false);
  ModelConfig config;
  config.mode = ModelMode::kContextPresent;
  config.context_hidden = {5};
  config.embedding_dim = 3;
  config.seed = 2;
  GamModel model(one, config);
  ZeroHead(model.mutable_towers()[0]);
  const std::vector<FeatureValue> ctx = {FeatureValue::Categorical("y")};
  for (double a : model.ContextWeights(ctx)) CHECK(a == doctest::Approx(0.25));

  const Schema two = ContextSchema(4, {"x", "y"}, true);
  GamModel model2(two, config);
  ZeroHead(model2.mutable_towers()[0]);
  ZeroHead(model2.mutable_towers()[1]);
  const std::vector<FeatureValue> ctx2 = {FeatureValue::Categorical("x"),
                                          FeatureValue::Numeric(0.3)};
  for (double a : model2.ContextWeights(ctx2)) CHECK(a == doctest::Approx(0.5));
}

TEST_CASE("context weights sum to the number of towers") {
  Rng rng(11);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Schema schema = ContextSchema(5, {"a", "b", "c"}, true);
    ModelConfig config;
    config.mode = ModelMode::kContextPresent;
    config.context_hidden = {8, 4};
    config.embedding_dim = 6;
    config.seed = seed;
    const GamModel model(schema, config);
    const std::vector<FeatureValue> ctx = {
        FeatureValue::Categorical(rng.UniformInt(2) ? "a" : "q"),
        FeatureValue::Numeric(rng.Uniform(-5, 5))};
    const auto alpha = model.ContextWeights(ctx);
    double total = 0.0;
    for (double a : alpha) {
      CHECK(a > 0.0);
      CHECK(a < 2.0);
      total += a;
    }
    CHECK(total == doctest::Approx(2.0).epsilon(1e-6));
    for (size_t k = 0; k < 2; ++k) {
      const auto ak = model.TowerWeights(k, ctx[k]);
      double sum = 0.0;
      for (double a : ak) {
        CHECK(a > 0.0);
        CHECK(a < 1.0);
        sum += a;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("context weights require context-present mode") {
  const GamModel model(ContextSchema(2, {"a"}, false), ModelConfig{});
  CHECK(model.towers().empty());
  CHECK_THROWS_AS(model.ContextWeights(std::vector<FeatureValue>{FeatureValue::Categorical("a")}),
                  UsageError);
}

TEST_CASE("softmax is stable for large logits") {
  std::vector<double> v = {1000.0, 1000.0, -1000.0};
  Softmax(v);
  CHECK(v[0] == doctest::Approx(0.5));
  CHECK(v[1] == doctest::Approx(0.5));
  CHECK(v[2] >= 0.0);
}

TEST_CASE("hand-built additive scores") {
  const Schema schema = ContextSchema(2, {"a"}, false);
  std::vector<SubNetwork> items = {OneUnit(1.0), OneUnit(2.0)};
  const std::vector<double> item = {1.0, 1.0};
  const std::vector<FeatureValue> ctx = {FeatureValue::Categorical("a")};

  const GamModel absent(schema, ModelMode::kContextAbsent, items, {}, {});
  CHECK(absent.ScoreItem(ctx, item) == 3.0);

  ContextTower tower(FeatureKind::kCategorical, schema.vocabularies[0], 3, {4}, 2);
  Rng rng(1);
  tower.net().Initialize(rng);
  ZeroHead(tower);
  const GamModel present(schema, ModelMode::kContextPresent, items, {tower}, {});
  CHECK(present.ScoreItem(ctx, item) == doctest::Approx(1.5));
}

TEST_CASE("changing one feature changes only its own term") {
  const Schema schema = ContextSchema(4, {"a", "b"}, false);
  for (ModelMode mode : {ModelMode::kContextAbsent, ModelMode::kContextPresent,
                         ModelMode::kNaiveContext}) {
    ModelConfig config;
    config.mode = mode;
    config.context_hidden = {6};
    config.embedding_dim = 4;
    config.seed = 5;
    const GamModel model(schema, config);
    const std::vector<FeatureValue> ctx = {FeatureValue::Categorical("b")};
    std::vector<double> item = {0.1, -0.4, 1.3, 0.8};
    const auto before = model.Attribution(ctx, item);
    double sum = 0.0;
    for (double t : before) sum += t;
    CHECK(sum == model.ScoreItem(ctx, item));

    item[1] = 2.5;
    const auto after = model.Attribution(ctx, item);
    for (size_t j = 0; j < before.size(); ++j) {
      if (j == 1) continue;
      CHECK(after[j] == before[j]);
    }
    double weight = 1.0;
    if (mode == ModelMode::kContextPresent) weight = model.ContextWeights(ctx)[1];
    CHECK(after[1] - before[1] ==
          doctest::Approx(weight * (model.Contribution(1, 2.5) - model.Contribution(1, -0.4))));
  }
}

TEST_CASE("score list is pointwise and permutation equivariant") {
  Rng rng(21);
  const Schema schema = ContextSchema(3, {"a", "b"}, false);
  ModelConfig config;
  config.mode = ModelMode::kContextPresent;
  config.context_hidden = {4};
  config.embedding_dim = 2;
  const GamModel model(schema, config);
  const std::vector<FeatureValue> ctx = {FeatureValue::Categorical("a")};

  QueryList single = testing::RandomList(rng, "1", 1, 3, ctx);
  CHECK(model.ScoreList(single) ==
        std::vector<double>{model.ScoreItem(ctx, single.item(0))});

  QueryList list = testing::RandomList(rng, "2", 6, 3, ctx);
  const auto scores = model.ScoreList(list);
  for (size_t i = 0; i < list.size(); ++i) {
    CHECK(scores[i] == model.ScoreItem(ctx, list.item(i)));
  }
  std::vector<double> reversed_features;
  std::vector<double> reversed_labels;
  for (size_t i = list.size(); i-- > 0;) {
    auto it = list.item(i);
    reversed_features.insert(reversed_features.end(), it.begin(), it.end());
    reversed_labels.push_back(list.labels()[i]);
  }
  const QueryList reversed("2", ctx, 3, reversed_features, reversed_labels);
  auto reversed_scores = model.ScoreList(reversed);
  std::reverse(reversed_scores.begin(), reversed_scores.end());
  CHECK(reversed_scores == scores);

  const std::vector<double> dup = {0.3, 0.3, 0.1, 0.3, 0.3, 0.1};
  const QueryList twins("3", ctx, 3, dup, {1.0, 0.0});
  const auto twin_scores = model.ScoreList(twins);
  CHECK(twin_scores[0] == twin_scores[1]);
}

TEST_CASE("scoring rejects length mismatches") {
  const GamModel model(PlainSchema(3), ModelConfig{});
  const std::vector<double> short_item = {1.0, 2.0};
  CHECK_THROWS_AS(model.ScoreItem({}, short_item), UsageError);
  Schema other = PlainSchema(4);
  CHECK_THROWS_AS(model.CheckCompatible(other), DataError);
}

TEST_CASE("naive context never changes the within-list ordering") {
  Rng rng(8);
  const Schema schema = ContextSchema(3, {"a", "b", "c"}, true);
  ModelConfig config;
  config.mode = ModelMode::kNaiveContext;
  config.embedding_dim = 4;
  const GamModel model(schema, config);
  QueryList list = testing::RandomList(rng, "1", 8, 3);
  std::vector<size_t> reference;
  for (const char* token : {"a", "b", "c", "unseen"}) {
    for (double v : {-2.0, 0.0, 3.5}) {
      const std::vector<FeatureValue> ctx = {FeatureValue::Categorical(token),
                                             FeatureValue::Numeric(v)};
      std::vector<double> scores(list.size());
      model.ScoreItems(ctx, list.features(), scores);
      const auto order = RankOrder(scores);
      if (reference.empty()) reference = order;
      CHECK(order == reference);
    }
  }
}

TEST_CASE("pwl evaluation") {
  const PwlFunction f({0.0, 1.0}, {0.0, 1.0});
  CHECK(f(0.5) == 0.5);
  CHECK(f(-3.0) == 0.0);
  CHECK(f(7.0) == 1.0);
  const PwlFunction c({2.0}, {5.0});
  for (double x : {-10.0, 2.0, 1e9}) CHECK(c(x) == 5.0);

  const PwlFunction g({-1.0, 0.5, 2.0, 3.0}, {4.0, -2.0, 1.0, 1.5});
  for (size_t k = 0; k < g.num_knots(); ++k) CHECK(g(g.xs()[k]) == g.ys()[k]);
  CHECK(g(-0.25) == doctest::Approx(1.0));
  CHECK(g(2.5) == doctest::Approx(1.25));

  CHECK_THROWS_AS(PwlFunction({}, {}), UsageError);
  CHECK_THROWS_AS(PwlFunction({1.0, 1.0}, {0.0, 1.0}), UsageError);
  CHECK_THROWS_AS(PwlFunction({0.0, 1.0}, {0.0}), UsageError);
  CHECK_THROWS_AS(PwlFunction({0.0, NAN}, {0.0, 1.0}), UsageError);
}

TEST_CASE("pwl is continuous at every knot") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t k = 1 + rng.UniformInt(8);
    std::vector<double> xs, ys;
    double x = rng.Uniform(-5, 5);
    for (size_t i = 0; i < k; ++i) {
      x += rng.Uniform(0.01, 2.0);
      xs.push_back(x);
      ys.push_back(rng.Uniform(-10, 10));
    }
    const PwlFunction f(xs, ys);
    double max_slope = 0.0;
    for (size_t i = 0; i + 1 < k; ++i) {
      max_slope = std::max(max_slope, std::abs((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])));
    }
    const double eps = 1e-9;
    for (double knot : xs) {
      CHECK(std::abs(f(knot - eps) - f(knot + eps)) <= 1e-6 * std::max(1.0, max_slope));
    }
  }
}

TEST_CASE("curve export") {
  const GamModel model(PlainSchema(2), ModelConfig{.seed = 3});
  const std::vector<double> one = {0.4};
  CHECK(ExportCurve(model, 0, one).size() == 1);
  const std::vector<double> grid = {-1.0, 0.0, 0.5, 2.0};
  const auto curve = ExportCurve(model, 1, grid);
  for (size_t g = 0; g < grid.size(); ++g) {
    CHECK(curve[g].x == grid[g]);
    CHECK(curve[g].f == model.item_nets()[1](grid[g]));
  }
  CHECK_THROWS_AS(ExportCurve(model, 2, grid), UsageError);

  const DistilledModel distilled(PlainSchema(2), ModelMode::kContextAbsent,
                                 {PwlFunction({0.0, 1.0}, {0.0, 2.0}),
                                  PwlFunction::Constant(0.0, 1.0)},
                                 {}, {});
  const auto pwl_curve = ExportCurve(distilled, 0, grid);
  for (size_t g = 0; g < grid.size(); ++g) {
    CHECK(pwl_curve[g].f == distilled.item_functions()[0](grid[g]));
  }
}

TEST_CASE("weight table export lists every vocabulary entry") {
  const Schema schema = ContextSchema(3, {"east", "west"}, false);
  ModelConfig config;
  config.mode = ModelMode::kContextPresent;
  config.context_hidden = {4};
  config.embedding_dim = 2;
  const GamModel model(schema, config);
  const auto rows = ExportWeightTable(model, 0);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].context_value == Vocabulary::kOovToken);
  CHECK(rows[1].context_value == "east");
  CHECK(rows[2].weights == model.TowerWeights(0, FeatureValue::Categorical("west")));
  CHECK_THROWS_AS(ExportWeightTable(model, 1), UsageError);
}

TEST_CASE("distilled weight table matches the towers bit for bit") {
  Rng rng(31);
  const Schema schema = ContextSchema(3, {"a", "b", "c"}, false);
  ModelConfig config;
  config.mode = ModelMode::kContextPresent;
  config.context_hidden = {8};
  config.embedding_dim = 5;
  const GamModel model(schema, config);
  std::vector<PwlFunction> functions;
  for (size_t j = 0; j < 3; ++j) {
    functions.push_back(PwlFunction({-1.0, 0.0, 1.0},
                                    {rng.Uniform(-1, 1), rng.Uniform(-1, 1), rng.Uniform(-1, 1)}));
  }
  const DistilledModel with_table(schema, ModelMode::kContextPresent, functions,
                                  model.towers(), {});
  CHECK(with_table.has_weight_table());
  for (const char* token : {"a", "b", "c", "other"}) {
    const std::vector<FeatureValue> ctx = {FeatureValue::Categorical(token)};
    CHECK(with_table.ContextWeights(ctx) == model.ContextWeights(ctx));
  }
}
