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

#ifndef RANKGAM_DATASET_H_
#define RANKGAM_DATASET_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace rankgam {

enum class FeatureKind : uint8_t { kNumeric = 0, kCategorical = 1 };

const char* FeatureKindName(FeatureKind kind);

// A single feature value: a finite real or a non-empty categorical token.
class FeatureValue {
 public:
  FeatureValue() : value_(0.0) {}

  // Throws DataError for non-finite values.
  static FeatureValue Numeric(double value);
  // Throws DataError for empty tokens.
  static FeatureValue Categorical(std::string token);

  FeatureKind kind() const {
    return value_.index() == 0 ? FeatureKind::kNumeric
                               : FeatureKind::kCategorical;
  }
  bool is_numeric() const { return value_.index() == 0; }
  double numeric() const;
  const std::string& token() const;

  friend bool operator==(const FeatureValue&, const FeatureValue&) = default;

 private:
  std::variant<double, std::string> value_;
};

// Token table for one categorical column. Id 0 is the reserved
// out-of-vocabulary entry; observed tokens follow in sorted order.
class Vocabulary {
 public:
  static constexpr const char* kOovToken = "<oov>";
  static constexpr int32_t kOovId = 0;

  Vocabulary() : tokens_{kOovToken} {}
  explicit Vocabulary(std::vector<std::string> observed);

  // Returns kOovId for unknown tokens.
  int32_t Lookup(const std::string& token) const;
  const std::string& Token(int32_t id) const { return tokens_.at(id); }
  // Number of rows including the OOV entry.
  size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int32_t> index_;
};

struct Schema {
  size_t num_features = 0;                 // n: item features per item
  std::vector<FeatureKind> context_kinds;  // m entries
  std::vector<Vocabulary> vocabularies;    // one per context column

  size_t num_context() const { return context_kinds.size(); }
  bool all_context_categorical() const;

  friend bool operator==(const Schema&, const Schema&) = default;
};

// One ranked list: shared context plus l items with n numeric features each.
// Item features are stored row-major.
class QueryList {
 public:
  QueryList() = default;
  QueryList(std::string qid, std::vector<FeatureValue> context,
            size_t num_features, std::vector<double> features,
            std::vector<double> labels);

  const std::string& qid() const { return qid_; }
  const std::vector<FeatureValue>& context() const { return context_; }
  size_t size() const { return labels_.size(); }
  size_t num_features() const { return num_features_; }

  std::span<const double> item(size_t i) const {
    return {features_.data() + i * num_features_, num_features_};
  }
  double feature(size_t i, size_t j) const {
    return features_[i * num_features_ + j];
  }
  double& mutable_feature(size_t i, size_t j) {
    return features_[i * num_features_ + j];
  }
  std::span<const double> labels() const { return labels_; }
  std::span<const double> features() const { return features_; }

  void set_context(std::vector<FeatureValue> context) {
    context_ = std::move(context);
  }

  friend bool operator==(const QueryList&, const QueryList&) = default;

 private:
  std::string qid_;
  std::vector<FeatureValue> context_;
  size_t num_features_ = 0;
  std::vector<double> features_;
  std::vector<double> labels_;
};

// Immutable collection of query lists sharing one schema.
class RankingDataset {
 public:
  RankingDataset() = default;

  // Validates every list against the schema. Throws DataError.
  RankingDataset(Schema schema, std::vector<QueryList> lists);

  const Schema& schema() const { return schema_; }
  const std::vector<QueryList>& lists() const { return lists_; }
  size_t size() const { return lists_.size(); }
  bool empty() const { return lists_.empty(); }
  size_t num_items() const;

  friend bool operator==(const RankingDataset&,
                         const RankingDataset&) = default;

 private:
  Schema schema_;
  std::vector<QueryList> lists_;
};

// Parses LETOR / SVMLight ranking text:
//   <label> qid:<id> <idx>:<value> ... [# comment]
// Contiguous runs of one qid form one list. Missing indices are 0.0 and the
// feature count is the largest index seen, or `feature_count_hint` if larger.
// Throws DataError naming the offending line.
RankingDataset ParseLetor(std::istream& in,
                          std::optional<size_t> feature_count_hint = {});
RankingDataset ReadLetorFile(const std::string& path,
                             std::optional<size_t> feature_count_hint = {});

// Writes every feature densely; ParseLetor(WriteLetor(d)) == d for
// context-free datasets.
void WriteLetor(const RankingDataset& dataset, std::ostream& out);

// Attaches list contexts from a header-less TSV sidecar:
//   <qid>\t<ctx_1>\t...\t<ctx_m>
// Fully numeric columns are numeric; all others categorical. Rows for
// qids absent from the dataset are ignored with a warning.
RankingDataset ParseContextSidecar(std::istream& in,
                                   const RankingDataset& dataset);
RankingDataset ReadContextSidecarFile(const std::string& path,
                                      const RankingDataset& dataset);
void WriteContextSidecar(const RankingDataset& dataset, std::ostream& out);

// Builds sorted vocabularies for the categorical columns of `lists`.
std::vector<Vocabulary> BuildVocabularies(
    const std::vector<QueryList>& lists,
    const std::vector<FeatureKind>& kinds);

enum class FeatureTransform { kIdentity, kLog1p };

// kLog1p maps x to sign(x) * log1p(|x|), i.e. log1p on non-negative values.
FeatureTransform ParseFeatureTransform(const std::string& name);
RankingDataset ApplyTransform(const RankingDataset& dataset,
                              FeatureTransform transform);

struct SplitFractions {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  RankingDataset train;
  RankingDataset validation;
  RankingDataset test;
};

// Assigns whole lists to partitions after a seeded shuffle. Sizes follow
// largest-remainder rounding; each partition keeps input order.
DatasetSplit Split(const RankingDataset& dataset, SplitFractions fractions,
                   uint64_t seed);

// Partition sizes used by Split.
std::array<size_t, 3> SplitSizes(size_t num_lists, SplitFractions fractions);

}  // namespace rankgam

#endif  // RANKGAM_DATASET_H_
