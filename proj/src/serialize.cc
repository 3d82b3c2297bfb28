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

#include "rankgam/serialize.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "rankgam/common.h"

namespace rankgam {
namespace {

constexpr char kMagic[8] = {'R', 'G', 'A', 'M', 'M', 'O', 'D', 'L'};

uint64_t Fnv1a64(const std::string& bytes) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

class Writer {
 public:
  void U8(uint8_t v) { bytes_.push_back(static_cast<char>(v)); }
  void U32(uint32_t v) {
    for (int i = 0; i < 4; ++i) U8(static_cast<uint8_t>(v >> (8 * i)));
  }
  void U64(uint64_t v) {
    for (int i = 0; i < 8; ++i) U8(static_cast<uint8_t>(v >> (8 * i)));
  }
  void F64(double v) { U64(std::bit_cast<uint64_t>(v)); }
  void Str(const std::string& s) {
    U64(s.size());
    bytes_.append(s);
  }
  const std::string& bytes() const { return bytes_; }

 private:
  std::string bytes_;
};

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  uint8_t U8() {
    Need(1);
    return static_cast<uint8_t>(bytes_[pos_++]);
  }
  uint32_t U32() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(U8()) << (8 * i);
    return v;
  }
  uint64_t U64() {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(U8()) << (8 * i);
    return v;
  }
  double F64() { return std::bit_cast<double>(U64()); }
  std::string Str() {
    const uint64_t size = Count(1);
    std::string s = bytes_.substr(pos_, size);
    pos_ += size;
    return s;
  }
  // Element count whose elements occupy at least `min_bytes` each.
  uint64_t Count(uint64_t min_bytes) {
    const uint64_t count = U64();
    if (min_bytes > 0 && count > (bytes_.size() - pos_) / min_bytes) {
      throw DataError("model file truncated or corrupt: implausible count");
    }
    return count;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void Need(size_t n) {
    if (bytes_.size() - pos_ < n) throw DataError("model file truncated");
  }
  const std::string& bytes_;
  size_t pos_ = 0;
};

void WriteVocabulary(Writer& w, const Vocabulary& vocabulary) {
  w.U64(vocabulary.size());
  for (const auto& token : vocabulary.tokens()) w.Str(token);
}

Vocabulary ReadVocabulary(Reader& r) {
  const uint64_t count = r.Count(8);
  if (count == 0) throw DataError("model payload: empty vocabulary");
  std::vector<std::string> tokens;
  for (uint64_t i = 0; i < count; ++i) tokens.push_back(r.Str());
  if (tokens.front() != Vocabulary::kOovToken) {
    throw DataError("model payload: vocabulary lacks the OOV entry");
  }
  std::vector<std::string> observed(tokens.begin() + 1, tokens.end());
  Vocabulary vocabulary(observed);
  if (vocabulary.tokens() != tokens) {
    throw DataError("model payload: vocabulary not in canonical order");
  }
  return vocabulary;
}

void WriteSchema(Writer& w, const Schema& schema) {
  w.U64(schema.num_features);
  w.U64(schema.num_context());
  for (size_t k = 0; k < schema.num_context(); ++k) {
    w.U8(static_cast<uint8_t>(schema.context_kinds[k]));
    WriteVocabulary(w, schema.vocabularies[k]);
  }
}

FeatureKind ReadKind(Reader& r) {
  const uint8_t kind = r.U8();
  if (kind > 1) throw DataError("model payload: bad feature kind");
  return static_cast<FeatureKind>(kind);
}

Schema ReadSchema(Reader& r) {
  Schema schema;
  schema.num_features = r.U64();
  const uint64_t m = r.Count(9);
  for (uint64_t k = 0; k < m; ++k) {
    schema.context_kinds.push_back(ReadKind(r));
    schema.vocabularies.push_back(ReadVocabulary(r));
  }
  return schema;
}

void WriteNet(Writer& w, const FeedForward& net) {
  w.U8(static_cast<uint8_t>(net.input_kind()));
  WriteVocabulary(w, net.vocabulary());
  w.U64(net.embedding_dim());
  w.U64(net.hidden().size());
  for (size_t width : net.hidden()) w.U64(width);
  w.U64(net.outputs());
  w.U8(net.output_bias() ? 1 : 0);
  w.U64(net.num_params());
  for (double p : net.params()) w.F64(p);
}

FeedForward ReadNet(Reader& r) {
  const FeatureKind kind = ReadKind(r);
  Vocabulary vocabulary = ReadVocabulary(r);
  const uint64_t dim = r.U64();
  const uint64_t depth = r.Count(8);
  std::vector<size_t> hidden;
  for (uint64_t h = 0; h < depth; ++h) hidden.push_back(r.U64());
  const uint64_t outputs = r.U64();
  const uint8_t bias = r.U8();
  if (bias > 1) throw DataError("model payload: bad bias flag");
  FeedForward net(kind, std::move(vocabulary), dim, std::move(hidden), outputs,
                  bias == 1);
  const uint64_t count = r.Count(8);
  if (count != net.num_params()) {
    throw DataError("model payload: parameter count does not match topology");
  }
  for (double& p : net.params()) p = r.F64();
  return net;
}

template <typename T>
void WriteNets(Writer& w, const std::vector<T>& nets) {
  w.U64(nets.size());
  for (const auto& net : nets) WriteNet(w, net.net());
}

std::vector<SubNetwork> ReadSubNetworks(Reader& r) {
  const uint64_t count = r.Count(8);
  std::vector<SubNetwork> nets;
  for (uint64_t i = 0; i < count; ++i) {
    FeedForward net = ReadNet(r);
    if (net.outputs() != 1 || !net.output_bias()) {
      throw DataError("model payload: sub-network must have one biased output");
    }
    SubNetwork sub = net.input_kind() == FeatureKind::kNumeric
                         ? SubNetwork::Numeric(net.hidden())
                         : SubNetwork::Categorical(net.vocabulary(),
                                                   net.embedding_dim(),
                                                   net.hidden());
    sub.net() = std::move(net);
    nets.push_back(std::move(sub));
  }
  return nets;
}

std::vector<ContextTower> ReadTowers(Reader& r) {
  const uint64_t count = r.Count(8);
  std::vector<ContextTower> towers;
  for (uint64_t i = 0; i < count; ++i) {
    FeedForward net = ReadNet(r);
    if (net.output_bias()) {
      throw DataError("model payload: context tower head must be bias-free");
    }
    ContextTower tower(net.input_kind(), net.vocabulary(), net.embedding_dim(),
                       net.hidden(), net.outputs());
    tower.net() = std::move(net);
    towers.push_back(std::move(tower));
  }
  return towers;
}

ModelMode ReadMode(Reader& r) {
  const uint8_t mode = r.U8();
  if (mode > 2) throw DataError("model payload: bad mode");
  return static_cast<ModelMode>(mode);
}

void WriteContainer(ModelKind kind, const std::string& payload,
                    std::ostream& out) {
  Writer header;
  for (char c : kMagic) header.U8(static_cast<uint8_t>(c));
  header.U32(kModelFormatVersion);
  header.U8(static_cast<uint8_t>(kind));
  header.U64(payload.size());
  Writer trailer;
  trailer.U64(Fnv1a64(payload));
  out.write(header.bytes().data(), static_cast<std::streamsize>(header.bytes().size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  out.write(trailer.bytes().data(), static_cast<std::streamsize>(trailer.bytes().size()));
  if (!out) throw DataError("failed to write model");
}

AnyModel ParsePayload(ModelKind kind, const std::string& payload) {
  Reader r(payload);
  Schema schema = ReadSchema(r);
  const ModelMode mode = ReadMode(r);
  if (kind == ModelKind::kNeural) {
    auto item_nets = ReadSubNetworks(r);
    auto towers = ReadTowers(r);
    auto context_nets = ReadSubNetworks(r);
    if (!r.done()) throw DataError("model payload: trailing bytes");
    return GamModel(std::move(schema), mode, std::move(item_nets),
                    std::move(towers), std::move(context_nets));
  }
  const uint64_t count = r.Count(8);
  std::vector<PwlFunction> functions;
  for (uint64_t j = 0; j < count; ++j) {
    const uint64_t knots = r.Count(16);
    std::vector<double> xs(knots), ys(knots);
    for (uint64_t k = 0; k < knots; ++k) {
      xs[k] = r.F64();
      ys[k] = r.F64();
    }
    functions.emplace_back(std::move(xs), std::move(ys));
  }
  auto towers = ReadTowers(r);
  auto context_nets = ReadSubNetworks(r);
  if (!r.done()) throw DataError("model payload: trailing bytes");
  return DistilledModel(std::move(schema), mode, std::move(functions),
                        std::move(towers), std::move(context_nets));
}

}  // namespace

void SaveModel(const GamModel& model, std::ostream& out) {
  Writer w;
  WriteSchema(w, model.schema());
  w.U8(static_cast<uint8_t>(model.mode()));
  WriteNets(w, model.item_nets());
  WriteNets(w, model.towers());
  WriteNets(w, model.context_nets());
  WriteContainer(ModelKind::kNeural, w.bytes(), out);
}

void SaveModel(const DistilledModel& model, std::ostream& out) {
  Writer w;
  WriteSchema(w, model.schema());
  w.U8(static_cast<uint8_t>(model.mode()));
  w.U64(model.item_functions().size());
  for (const auto& f : model.item_functions()) {
    w.U64(f.num_knots());
    for (size_t k = 0; k < f.num_knots(); ++k) {
      w.F64(f.xs()[k]);
      w.F64(f.ys()[k]);
    }
  }
  WriteNets(w, model.towers());
  WriteNets(w, model.context_nets());
  WriteContainer(ModelKind::kDistilled, w.bytes(), out);
}

AnyModel LoadModel(std::istream& in) {
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  Reader r(bytes);
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a model file (bad magic)");
  }
  for (size_t i = 0; i < sizeof(kMagic); ++i) r.U8();
  const uint32_t version = r.U32();
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model format version " +
                    std::to_string(version) + " (expected " +
                    std::to_string(kModelFormatVersion) + ")");
  }
  const uint8_t kind = r.U8();
  if (kind > 1) throw DataError("unknown model kind " + std::to_string(kind));
  const uint64_t size = r.U64();
  const size_t header = sizeof(kMagic) + 4 + 1 + 8;
  if (bytes.size() < header || bytes.size() - header < 8 ||
      size != bytes.size() - header - 8) {
    throw DataError("model file truncated");
  }
  const std::string payload = bytes.substr(header, size);
  uint64_t checksum = 0;
  for (int i = 0; i < 8; ++i) {
    checksum |= static_cast<uint64_t>(
                    static_cast<unsigned char>(bytes[header + size + i]))
                << (8 * i);
  }
  if (checksum != Fnv1a64(payload)) {
    throw DataError("model file corrupt (checksum mismatch)");
  }
  try {
    return ParsePayload(static_cast<ModelKind>(kind), payload);
  } catch (const UsageError& e) {
    throw DataError(std::string("model payload inconsistent: ") + e.what());
  }
}

void SaveModelFile(const GamModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  SaveModel(model, out);
}

void SaveModelFile(const DistilledModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  SaveModel(model, out);
}

AnyModel LoadModelFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  try {
    return LoadModel(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

const Ranker& AsRanker(const AnyModel& model) {
  return std::visit([](const auto& m) -> const Ranker& { return m; }, model);
}

ModelKind KindOf(const AnyModel& model) {
  return model.index() == 0 ? ModelKind::kNeural : ModelKind::kDistilled;
}

}  // namespace rankgam
