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

#include <sstream>

#include "rankgam/serialize.h"
#include "test_util.h"

using namespace rankgam;

namespace {

GamModel SeededModel(ModelMode mode, uint64_t seed) {
  Schema schema = testing::ContextSchema(4, {"north", "south"}, true);
  ModelConfig config;
  config.mode = mode;
  config.context_hidden = {6, 3};
  config.embedding_dim = 4;
  config.seed = seed;
  return GamModel(schema, config);
}

std::string Bytes(const GamModel& model) {
  std::ostringstream out;
  SaveModel(model, out);
  return out.str();
}

AnyModel Load(const std::string& bytes) {
  std::istringstream in(bytes);
  return LoadModel(in);
}

void ExpectSameScores(const Ranker& a, const Ranker& b) {
  Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    const std::vector<FeatureValue> ctx = {
        FeatureValue::Categorical(rng.UniformInt(3) == 0 ? "east" : "north"),
        FeatureValue::Numeric(rng.Uniform(-2, 2))};
    std::vector<double> item(4);
    for (double& v : item) v = rng.Uniform(-3, 3);
    CHECK(a.ScoreItem(ctx, item) == b.ScoreItem(ctx, item));
  }
}

}  // namespace

TEST_CASE("neural round trip scores bit-identically") {
  for (ModelMode mode : {ModelMode::kContextAbsent, ModelMode::kContextPresent,
                         ModelMode::kNaiveContext}) {
    const GamModel model = SeededModel(mode, 7);
    const AnyModel loaded = Load(Bytes(model));
    REQUIRE(KindOf(loaded) == ModelKind::kNeural);
    CHECK(std::get<GamModel>(loaded) == model);
    ExpectSameScores(model, AsRanker(loaded));
  }
}

TEST_CASE("distilled round trip scores bit-identically") {
  const GamModel neural = SeededModel(ModelMode::kContextPresent, 3);
  std::vector<PwlFunction> functions;
  for (size_t j = 0; j < 4; ++j) {
    functions.push_back(PwlFunction({-1.0, 0.1 * j, 2.0}, {0.5, -0.25 * j, 1.0 / 3.0}));
  }
  const DistilledModel distilled(neural.schema(), neural.mode(), functions,
                                 neural.towers(), {});
  std::ostringstream out;
  SaveModel(distilled, out);
  const AnyModel loaded = Load(out.str());
  REQUIRE(KindOf(loaded) == ModelKind::kDistilled);
  CHECK(std::get<DistilledModel>(loaded) == distilled);
  ExpectSameScores(distilled, AsRanker(loaded));
}

TEST_CASE("saving is deterministic") {
  CHECK(Bytes(SeededModel(ModelMode::kContextPresent, 5)) ==
        Bytes(SeededModel(ModelMode::kContextPresent, 5)));
}

TEST_CASE("every truncation is rejected") {
  const std::string bytes = Bytes(SeededModel(ModelMode::kNaiveContext, 2));
  for (size_t cut = 0; cut < bytes.size(); cut += 1 + cut / 16) {
    CHECK_THROWS_AS(Load(bytes.substr(0, cut)), DataError);
  }
}

TEST_CASE("corruption is detected") {
  const std::string bytes = Bytes(SeededModel(ModelMode::kContextPresent, 2));
  SUBCASE("bad magic") {
    std::string bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_WITH_AS(Load(bad), doctest::Contains("magic"), DataError);
  }
  SUBCASE("version mismatch") {
    std::string bad = bytes;
    bad[8] = static_cast<char>(kModelFormatVersion + 1);
    CHECK_THROWS_WITH_AS(Load(bad), doctest::Contains("version"), DataError);
  }
  SUBCASE("payload bit flip") {
    std::string bad = bytes;
    bad[bytes.size() / 2] ^= 0x10;
    CHECK_THROWS_WITH_AS(Load(bad), doctest::Contains("checksum"), DataError);
  }
  SUBCASE("trailing garbage") {
    CHECK_THROWS_AS(Load(bytes + "x"), DataError);
  }
}

TEST_CASE("missing model file") {
  CHECK_THROWS_AS(LoadModelFile("/nonexistent/model.rgam"), DataError);
}
