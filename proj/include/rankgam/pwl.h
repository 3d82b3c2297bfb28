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

#ifndef RANKGAM_PWL_H_
#define RANKGAM_PWL_H_

#include <cstddef>
#include <span>
#include <vector>

namespace rankgam {

// Continuous piecewise-linear function through K knots with strictly
// increasing x, held constant at y_1 left of x_1 and at y_K right of x_K.
class PwlFunction {
 public:
  PwlFunction() : xs_{0.0}, ys_{0.0} {}
  // Throws UsageError unless K >= 1, xs strictly increasing, all finite.
  PwlFunction(std::vector<double> xs, std::vector<double> ys);

  static PwlFunction Constant(double x, double y) { return PwlFunction({x}, {y}); }

  double operator()(double x) const;

  size_t num_knots() const { return xs_.size(); }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }

  friend bool operator==(const PwlFunction&, const PwlFunction&) = default;

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

}  // namespace rankgam

#endif  // RANKGAM_PWL_H_
