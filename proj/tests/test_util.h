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

#ifndef RANKGAM_TESTS_TEST_UTIL_H_
#define RANKGAM_TESTS_TEST_UTIL_H_

#include <sstream>
#include <string>
#include <vector>

#include "rankgam/common.h"
#include "rankgam/dataset.h"
#include "rankgam/model.h"
#include "rankgam/rng.h"

namespace rankgam::testing {

// Collects warnings for the lifetime of the object.
class WarningCapture {
 public:
  WarningCapture()
      : previous_(SetWarningHandler(
            [this](std::string_view m) { messages.emplace_back(m); })) {}
  ~WarningCapture() { SetWarningHandler(std::move(previous_)); }
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;
  bool Contains(const std::string& needle) const {
    for (const auto& m : messages) {
      if (m.find(needle) != std::string::npos) return true;
    }
    return false;
  }
  std::vector<std::string> messages;

 private:
  WarningHandler previous_;
};

inline RankingDataset ParseText(const std::string& text) {
  std::istringstream in(text);
  return ParseLetor(in);
}

// Random list with l items, n features and the given context.
inline QueryList RandomList(Rng& rng, const std::string& qid, size_t l,
                            size_t n, std::vector<FeatureValue> context = {}) {
  std::vector<double> features(l * n);
  for (double& v : features) v = rng.Uniform(-1.5, 1.5);
  std::vector<double> labels(l);
  for (double& y : labels) y = static_cast<double>(rng.UniformInt(5));
  labels[rng.UniformInt(l)] = 1.0 + static_cast<double>(rng.UniformInt(4));
  return QueryList(qid, std::move(context), n, std::move(features),
                   std::move(labels));
}

// Schema with one categorical context column over `tokens` and optionally
// one numeric column.
inline Schema ContextSchema(size_t n, const std::vector<std::string>& tokens,
                            bool with_numeric) {
  Schema schema;
  schema.num_features = n;
  schema.context_kinds.push_back(FeatureKind::kCategorical);
  schema.vocabularies.emplace_back(tokens);
  if (with_numeric) {
    schema.context_kinds.push_back(FeatureKind::kNumeric);
    schema.vocabularies.emplace_back();
  }
  return schema;
}

}  // namespace rankgam::testing

#endif  // RANKGAM_TESTS_TEST_UTIL_H_
