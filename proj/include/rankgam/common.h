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

#ifndef RANKGAM_COMMON_H_
#define RANKGAM_COMMON_H_

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rankgam {

// Error taxonomy. The CLI maps each kind onto a distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments or configuration supplied by the caller.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed, inconsistent, or missing input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite losses, divergence, or other numerical breakdown.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Sink for non-fatal diagnostics. Defaults to stderr. Returns the handler
// being replaced; a null handler drops warnings.
using WarningHandler = std::function<void(std::string_view)>;
WarningHandler SetWarningHandler(WarningHandler handler);
void Warn(std::string_view message);

// Shortest decimal form that parses back to the identical double.
std::string FormatDouble(double value);

}  // namespace rankgam

#endif  // RANKGAM_COMMON_H_
