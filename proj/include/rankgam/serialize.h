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

#ifndef RANKGAM_SERIALIZE_H_
#define RANKGAM_SERIALIZE_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>

#include "rankgam/model.h"

namespace rankgam {

// Model container, version 1. All integers are little-endian, doubles are
// IEEE-754 binary64 bit patterns stored as u64.
//
//   magic    8 bytes  "RGAMMODL"
//   version  u32      kModelFormatVersion
//   kind     u8       0 = neural GamModel, 1 = DistilledModel
//   size     u64      payload byte count
//   payload  size bytes
//   checksum u64      FNV-1a 64 over the payload
//
// The payload holds the schema, the mode and every sub-model (topology,
// vocabulary and parameters); see docs/model_format.md.
inline constexpr uint32_t kModelFormatVersion = 1;

enum class ModelKind : uint8_t { kNeural = 0, kDistilled = 1 };

using AnyModel = std::variant<GamModel, DistilledModel>;

void SaveModel(const GamModel& model, std::ostream& out);
void SaveModel(const DistilledModel& model, std::ostream& out);

// Throws DataError on bad magic, version mismatch, truncation, checksum
// failure or an inconsistent payload. Never returns a partial model.
AnyModel LoadModel(std::istream& in);

void SaveModelFile(const GamModel& model, const std::string& path);
void SaveModelFile(const DistilledModel& model, const std::string& path);
AnyModel LoadModelFile(const std::string& path);

const Ranker& AsRanker(const AnyModel& model);
ModelKind KindOf(const AnyModel& model);

}  // namespace rankgam

#endif  // RANKGAM_SERIALIZE_H_
