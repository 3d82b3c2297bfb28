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

#include "rankgam/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_set>

#include "rankgam/common.h"
#include "rankgam/rng.h"

namespace rankgam {
namespace {

std::optional<double> ParseDouble(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto result =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' ||
                                 line[pos] == '\r')) {
      ++pos;
    }
    const size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' &&
           line[pos] != '\r') {
      ++pos;
    }
    if (pos > start) tokens.push_back(line.substr(start, pos - start));
  }
  return tokens;
}

[[noreturn]] void LineError(size_t line_number, const std::string& what) {
  throw DataError("line " + std::to_string(line_number) + ": " + what);
}

struct SparseItem {
  double label;
  std::vector<std::pair<size_t, double>> entries;  // 1-based index, value
};

struct PendingList {
  std::string qid;
  std::vector<SparseItem> items;
};

}  // namespace

const char* FeatureKindName(FeatureKind kind) {
  return kind == FeatureKind::kNumeric ? "numeric" : "categorical";
}

FeatureValue FeatureValue::Numeric(double value) {
  if (!std::isfinite(value)) {
    throw DataError("non-finite feature value");
  }
  FeatureValue result;
  result.value_ = value;
  return result;
}

FeatureValue FeatureValue::Categorical(std::string token) {
  if (token.empty()) throw DataError("empty categorical token");
  FeatureValue result;
  result.value_ = std::move(token);
  return result;
}

double FeatureValue::numeric() const {
  if (!is_numeric()) throw DataError("categorical value used as numeric");
  return std::get<double>(value_);
}

const std::string& FeatureValue::token() const {
  if (is_numeric()) throw DataError("numeric value used as categorical");
  return std::get<std::string>(value_);
}

Vocabulary::Vocabulary(std::vector<std::string> observed) {
  std::sort(observed.begin(), observed.end());
  observed.erase(std::unique(observed.begin(), observed.end()),
                 observed.end());
  tokens_.reserve(observed.size() + 1);
  tokens_.push_back(kOovToken);
  for (auto& token : observed) {
    if (token == kOovToken) continue;
    tokens_.push_back(std::move(token));
  }
  for (size_t i = 1; i < tokens_.size(); ++i) {
    index_.emplace(tokens_[i], static_cast<int32_t>(i));
  }
}

int32_t Vocabulary::Lookup(const std::string& token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? kOovId : it->second;
}

bool Schema::all_context_categorical() const {
  return std::all_of(context_kinds.begin(), context_kinds.end(),
                     [](FeatureKind k) { return k == FeatureKind::kCategorical; });
}

QueryList::QueryList(std::string qid, std::vector<FeatureValue> context,
                     size_t num_features, std::vector<double> features,
                     std::vector<double> labels)
    : qid_(std::move(qid)),
      context_(std::move(context)),
      num_features_(num_features),
      features_(std::move(features)),
      labels_(std::move(labels)) {
  if (labels_.empty()) throw DataError("list " + qid_ + " has no items");
  if (features_.size() != labels_.size() * num_features_) {
    throw DataError("list " + qid_ + ": feature matrix shape mismatch");
  }
  for (double label : labels_) {
    if (!std::isfinite(label) || label < 0.0) {
      throw DataError("list " + qid_ + ": label must be finite and >= 0");
    }
  }
  for (double value : features_) {
    if (!std::isfinite(value)) {
      throw DataError("list " + qid_ + ": non-finite feature value");
    }
  }
}

RankingDataset::RankingDataset(Schema schema, std::vector<QueryList> lists)
    : schema_(std::move(schema)), lists_(std::move(lists)) {
  const size_t m = schema_.num_context();
  if (schema_.vocabularies.size() != m) {
    throw DataError("schema: vocabulary count differs from context count");
  }
  for (const auto& list : lists_) {
    if (list.num_features() != schema_.num_features) {
      throw DataError("list " + list.qid() + " has " +
                      std::to_string(list.num_features()) +
                      " features, schema expects " +
                      std::to_string(schema_.num_features));
    }
    if (list.context().size() != m) {
      throw DataError("list " + list.qid() + " has " +
                      std::to_string(list.context().size()) +
                      " context features, schema expects " +
                      std::to_string(m));
    }
    for (size_t k = 0; k < m; ++k) {
      if (list.context()[k].kind() != schema_.context_kinds[k]) {
        throw DataError("list " + list.qid() + ": context column " +
                        std::to_string(k + 1) + " is not " +
                        FeatureKindName(schema_.context_kinds[k]));
      }
    }
  }
}

size_t RankingDataset::num_items() const {
  size_t total = 0;
  for (const auto& list : lists_) total += list.size();
  return total;
}

RankingDataset ParseLetor(std::istream& in,
                          std::optional<size_t> feature_count_hint) {
  std::vector<PendingList> pending;
  std::unordered_set<std::string> seen_qids;
  size_t max_index = 0;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view view(line);
    if (const size_t hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    const auto tokens = SplitWhitespace(view);
    if (tokens.empty()) continue;
    if (tokens.size() < 2) LineError(line_number, "missing qid");

    SparseItem item;
    const auto label = ParseDouble(tokens[0]);
    if (!label) LineError(line_number, "bad label '" + std::string(tokens[0]) + "'");
    if (!std::isfinite(*label)) LineError(line_number, "non-finite label");
    if (*label < 0.0) LineError(line_number, "negative label");
    item.label = *label;

    if (tokens[1].substr(0, 4) != "qid:" || tokens[1].size() == 4) {
      LineError(line_number, "expected qid:<id>");
    }
    std::string qid(tokens[1].substr(4));

    size_t previous = 0;
    for (size_t t = 2; t < tokens.size(); ++t) {
      const auto colon = tokens[t].find(':');
      if (colon == std::string_view::npos) {
        LineError(line_number, "expected idx:value, got '" +
                                   std::string(tokens[t]) + "'");
      }
      const auto idx_text = tokens[t].substr(0, colon);
      size_t index = 0;
      const auto idx_result = std::from_chars(
          idx_text.data(), idx_text.data() + idx_text.size(), index);
      if (idx_result.ec != std::errc() ||
          idx_result.ptr != idx_text.data() + idx_text.size() || index == 0) {
        LineError(line_number, "bad feature index '" + std::string(idx_text) + "'");
      }
      if (index <= previous) {
        LineError(line_number, "feature indices must be strictly increasing");
      }
      previous = index;
      const auto value = ParseDouble(tokens[t].substr(colon + 1));
      if (!value) {
        LineError(line_number, "bad feature value '" +
                                   std::string(tokens[t].substr(colon + 1)) + "'");
      }
      if (!std::isfinite(*value)) LineError(line_number, "non-finite value");
      item.entries.emplace_back(index, *value);
      max_index = std::max(max_index, index);
    }

    if (pending.empty() || pending.back().qid != qid) {
      if (!seen_qids.insert(qid).second) {
        Warn("qid " + qid + " reappears at line " +
             std::to_string(line_number) + "; starting a new list");
      }
      pending.push_back(PendingList{qid, {}});
    }
    pending.back().items.push_back(std::move(item));
  }
  if (pending.empty()) throw DataError("empty dataset");

  const size_t n = std::max(max_index, feature_count_hint.value_or(0));
  std::vector<QueryList> lists;
  lists.reserve(pending.size());
  for (auto& p : pending) {
    std::vector<double> features(p.items.size() * n, 0.0);
    std::vector<double> labels;
    labels.reserve(p.items.size());
    for (size_t i = 0; i < p.items.size(); ++i) {
      labels.push_back(p.items[i].label);
      for (const auto& [index, value] : p.items[i].entries) {
        features[i * n + index - 1] = value;
      }
    }
    lists.emplace_back(std::move(p.qid), std::vector<FeatureValue>{}, n,
                       std::move(features), std::move(labels));
  }
  Schema schema;
  schema.num_features = n;
  return RankingDataset(std::move(schema), std::move(lists));
}

RankingDataset ReadLetorFile(const std::string& path,
                             std::optional<size_t> feature_count_hint) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    return ParseLetor(in, feature_count_hint);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void WriteLetor(const RankingDataset& dataset, std::ostream& out) {
  for (const auto& list : dataset.lists()) {
    for (size_t i = 0; i < list.size(); ++i) {
      out << FormatDouble(list.labels()[i]) << " qid:" << list.qid();
      const auto item = list.item(i);
      for (size_t j = 0; j < item.size(); ++j) {
        out << ' ' << (j + 1) << ':' << FormatDouble(item[j]);
      }
      out << '\n';
    }
  }
}

std::vector<Vocabulary> BuildVocabularies(
    const std::vector<QueryList>& lists,
    const std::vector<FeatureKind>& kinds) {
  std::vector<Vocabulary> vocabularies;
  vocabularies.reserve(kinds.size());
  for (size_t k = 0; k < kinds.size(); ++k) {
    if (kinds[k] != FeatureKind::kCategorical) {
      vocabularies.emplace_back();
      continue;
    }
    std::set<std::string> tokens;
    for (const auto& list : lists) tokens.insert(list.context()[k].token());
    vocabularies.emplace_back(
        std::vector<std::string>(tokens.begin(), tokens.end()));
  }
  return vocabularies;
}

RankingDataset ParseContextSidecar(std::istream& in,
                                   const RankingDataset& dataset) {
  std::unordered_set<std::string> dataset_qids;
  for (const auto& list : dataset.lists()) dataset_qids.insert(list.qid());

  std::map<std::string, std::vector<std::string>> rows;
  std::optional<size_t> width;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      const size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    const std::string qid = fields.front();
    if (qid.empty()) LineError(line_number, "empty qid");
    fields.erase(fields.begin());
    if (!width) {
      width = fields.size();
    } else if (*width != fields.size()) {
      LineError(line_number, "expected " + std::to_string(*width) +
                                 " context values, got " +
                                 std::to_string(fields.size()));
    }
    for (const auto& field : fields) {
      if (field.empty()) LineError(line_number, "empty context value");
    }
    if (!dataset_qids.count(qid)) {
      Warn("context sidecar row for unknown qid " + qid + " ignored");
      continue;
    }
    if (!rows.emplace(qid, std::move(fields)).second) {
      LineError(line_number, "duplicate context row for qid " + qid);
    }
  }

  const size_t m = width.value_or(0);
  std::vector<FeatureKind> kinds(m, FeatureKind::kNumeric);
  for (size_t k = 0; k < m; ++k) {
    bool any_numeric = false;
    bool any_categorical = false;
    for (const auto& [qid, fields] : rows) {
      const auto value = ParseDouble(fields[k]);
      if (value && std::isfinite(*value)) {
        any_numeric = true;
      } else {
        any_categorical = true;
      }
    }
    if (any_numeric && any_categorical) {
      throw DataError("context column " + std::to_string(k + 1) +
                      " mixes numeric and categorical values");
    }
    if (any_categorical) kinds[k] = FeatureKind::kCategorical;
  }

  std::vector<QueryList> lists = dataset.lists();
  for (auto& list : lists) {
    const auto it = rows.find(list.qid());
    if (it == rows.end()) {
      throw DataError("no context row for qid " + list.qid());
    }
    std::vector<FeatureValue> context;
    context.reserve(m);
    for (size_t k = 0; k < m; ++k) {
      context.push_back(kinds[k] == FeatureKind::kNumeric
                            ? FeatureValue::Numeric(*ParseDouble(it->second[k]))
                            : FeatureValue::Categorical(it->second[k]));
    }
    list.set_context(std::move(context));
  }
  Schema schema;
  schema.num_features = dataset.schema().num_features;
  schema.context_kinds = kinds;
  schema.vocabularies = BuildVocabularies(lists, kinds);
  return RankingDataset(std::move(schema), std::move(lists));
}

RankingDataset ReadContextSidecarFile(const std::string& path,
                                      const RankingDataset& dataset) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    return ParseContextSidecar(in, dataset);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void WriteContextSidecar(const RankingDataset& dataset, std::ostream& out) {
  std::unordered_set<std::string> written;
  for (const auto& list : dataset.lists()) {
    if (!written.insert(list.qid()).second) continue;
    out << list.qid();
    for (const auto& value : list.context()) {
      out << '\t'
          << (value.is_numeric() ? FormatDouble(value.numeric()) : value.token());
    }
    out << '\n';
  }
}

FeatureTransform ParseFeatureTransform(const std::string& name) {
  if (name == "identity") return FeatureTransform::kIdentity;
  if (name == "log1p") return FeatureTransform::kLog1p;
  throw UsageError("unknown transform '" + name + "' (identity|log1p)");
}

RankingDataset ApplyTransform(const RankingDataset& dataset,
                              FeatureTransform transform) {
  if (transform == FeatureTransform::kIdentity) return dataset;
  std::vector<QueryList> lists;
  lists.reserve(dataset.size());
  for (const auto& list : dataset.lists()) {
    std::vector<double> features(list.features().begin(),
                                 list.features().end());
    for (double& x : features) {
      x = x >= 0.0 ? std::log1p(x) : -std::log1p(-x);
    }
    lists.emplace_back(list.qid(), list.context(), list.num_features(),
                       std::move(features),
                       std::vector<double>(list.labels().begin(),
                                           list.labels().end()));
  }
  return RankingDataset(dataset.schema(), std::move(lists));
}

std::array<size_t, 3> SplitSizes(size_t num_lists, SplitFractions fractions) {
  const std::array<double, 3> f = {fractions.train, fractions.validation,
                                   fractions.test};
  for (double value : f) {
    if (!(value > 0.0)) throw UsageError("split fractions must be positive");
  }
  if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) {
    throw UsageError("split fractions must sum to 1");
  }
  if (num_lists < 3) {
    throw DataError("cannot split " + std::to_string(num_lists) +
                    " lists into 3 partitions");
  }
  std::array<size_t, 3> sizes{};
  std::array<double, 3> remainders{};
  size_t assigned = 0;
  for (size_t p = 0; p < 3; ++p) {
    const double exact = f[p] * static_cast<double>(num_lists);
    sizes[p] = static_cast<size_t>(std::floor(exact));
    remainders[p] = exact - static_cast<double>(sizes[p]);
    assigned += sizes[p];
  }
  std::array<size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return remainders[a] > remainders[b];
  });
  for (size_t r = 0; assigned < num_lists; ++r, ++assigned) {
    ++sizes[order[r % 3]];
  }
  // Every partition receives at least one list, taken from the largest.
  for (size_t p = 0; p < 3; ++p) {
    if (sizes[p] == 0) {
      const auto largest = std::max_element(sizes.begin(), sizes.end());
      --*largest;
      ++sizes[p];
    }
  }
  return sizes;
}

DatasetSplit Split(const RankingDataset& dataset, SplitFractions fractions,
                   uint64_t seed) {
  const auto sizes = SplitSizes(dataset.size(), fractions);
  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  rng.Shuffle(std::span<size_t>(order));

  std::array<std::vector<QueryList>, 3> parts;
  size_t offset = 0;
  for (size_t p = 0; p < 3; ++p) {
    std::vector<size_t> members(order.begin() + offset,
                                order.begin() + offset + sizes[p]);
    std::sort(members.begin(), members.end());
    for (size_t index : members) parts[p].push_back(dataset.lists()[index]);
    offset += sizes[p];
  }
  return DatasetSplit{RankingDataset(dataset.schema(), std::move(parts[0])),
                      RankingDataset(dataset.schema(), std::move(parts[1])),
                      RankingDataset(dataset.schema(), std::move(parts[2]))};
}

}  // namespace rankgam
