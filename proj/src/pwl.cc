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

#include "rankgam/pwl.h"

#include <algorithm>
#include <cmath>

#include "rankgam/common.h"

namespace rankgam {

PwlFunction::PwlFunction(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.empty()) throw UsageError("PWL function needs at least one knot");
  if (xs_.size() != ys_.size()) {
    throw UsageError("PWL knot x and y counts differ");
  }
  for (size_t k = 0; k < xs_.size(); ++k) {
    if (!std::isfinite(xs_[k]) || !std::isfinite(ys_[k])) {
      throw UsageError("PWL knots must be finite");
    }
    if (k > 0 && !(xs_[k - 1] < xs_[k])) {
      throw UsageError("PWL knot x values must be strictly increasing");
    }
  }
}

double PwlFunction::operator()(double x) const {
  if (x <= xs_.front()) return ys_.front();
  if (x >= xs_.back()) return ys_.back();
  // First knot strictly greater than x; x lies in [x_k, x_{k+1}).
  const size_t upper = static_cast<size_t>(
      std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
  const size_t k = upper - 1;
  if (x == xs_[k]) return ys_[k];
  const double slope = (ys_[upper] - ys_[k]) / (xs_[upper] - xs_[k]);
  return slope * (x - xs_[k]) + ys_[k];
}

}  // namespace rankgam
