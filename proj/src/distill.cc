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

#include "rankgam/distill.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "rankgam/common.h"
#include "rankgam/rng.h"

namespace rankgam {
namespace {

constexpr double kRidge = 1e-9;

// Cholesky solve of a symmetric tridiagonal system. Returns false when a
// pivot is not safely positive.
template <typename T>
bool SolveTridiagonal(const std::vector<T>& diag, const std::vector<T>& off,
                      const std::vector<T>& rhs, T tolerance,
                      std::vector<T>& solution) {
  const size_t k = diag.size();
  std::vector<T> l(k), m(k > 0 ? k - 1 : 0), z(k);
  for (size_t i = 0; i < k; ++i) {
    T pivot = diag[i];
    if (i > 0) pivot -= m[i - 1] * m[i - 1];
    if (!(pivot > tolerance)) return false;
    l[i] = std::sqrt(pivot);
    if (i + 1 < k) m[i] = off[i] / l[i];
    z[i] = (rhs[i] - (i > 0 ? m[i - 1] * z[i - 1] : T(0))) / l[i];
  }
  solution.assign(k, T(0));
  for (size_t i = k; i-- > 0;) {
    solution[i] = (z[i] - (i + 1 < k ? m[i] * solution[i + 1] : T(0))) / l[i];
  }
  return true;
}

template <typename T>
bool SolveWithFallback(std::vector<T> diag, const std::vector<T>& off,
                       const std::vector<T>& rhs, std::vector<T>& solution) {
  T trace = 0;
  for (T d : diag) trace += d;
  const T tolerance = T(1e-14) * std::max(trace, T(1e-300));
  if (SolveTridiagonal(diag, off, rhs, tolerance, solution)) return false;
  const T ridge = T(kRidge) * std::max(trace, T(1e-300));
  for (T& d : diag) d += ridge;
  SolveTridiagonal(diag, off, rhs, T(0), solution);
  return true;
}

// O(K) evaluation of the least-squares PWL loss for knots drawn from a
// fixed candidate set, using prefix sums over the x-sorted sample. x and y
// are centered to limit cancellation.
class CandidateLoss {
 public:
  CandidateLoss(const DistillSample& sample, std::span<const double> candidates)
      : candidates_(candidates.begin(), candidates.end()) {
    const size_t n = sample.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return sample.x[a] < sample.x[b]; });
    long double mean_x = 0, mean_y = 0;
    for (size_t i = 0; i < n; ++i) {
      mean_x += sample.x[i];
      mean_y += sample.y[i];
    }
    shift_ = mean_x / n;
    const long double y_shift = mean_y / n;
    sorted_x_.resize(n);
    su_.assign(n + 1, 0);
    suu_.assign(n + 1, 0);
    sv_.assign(n + 1, 0);
    suv_.assign(n + 1, 0);
    svv_.assign(n + 1, 0);
    for (size_t r = 0; r < n; ++r) {
      const size_t i = order[r];
      sorted_x_[r] = sample.x[i];
      const long double u = sample.x[i] - shift_;
      const long double v = sample.y[i] - y_shift;
      su_[r + 1] = su_[r] + u;
      suu_[r + 1] = suu_[r] + u * u;
      sv_[r + 1] = sv_[r] + v;
      suv_[r + 1] = suv_[r] + u * v;
      svv_[r + 1] = svv_[r] + v * v;
    }
    for (double c : candidates_) {
      positions_.push_back(static_cast<size_t>(
          std::lower_bound(sorted_x_.begin(), sorted_x_.end(), c) -
          sorted_x_.begin()));
    }
  }

  // Loss for the sorted candidate indices `chosen`.
  double Loss(const std::vector<size_t>& chosen) const {
    const size_t k = chosen.size();
    const size_t n = sorted_x_.size();
    std::vector<long double> diag(k, 0), off(k > 0 ? k - 1 : 0, 0), rhs(k, 0);
    const size_t first = positions_[chosen.front()];
    diag[0] += first;
    rhs[0] += sv_[first];
    for (size_t s = 0; s + 1 < k; ++s) {
      const size_t lo = positions_[chosen[s]];
      const size_t hi = positions_[chosen[s + 1]];
      const long double cnt = hi - lo;
      const long double xk = candidates_[chosen[s]] - shift_;
      const long double h = static_cast<long double>(candidates_[chosen[s + 1]]) -
                            candidates_[chosen[s]];
      const long double sw = (su_[hi] - su_[lo]) - cnt * xk;
      const long double sww =
          (suu_[hi] - suu_[lo]) - 2 * xk * (su_[hi] - su_[lo]) + cnt * xk * xk;
      const long double sv = sv_[hi] - sv_[lo];
      const long double swv = (suv_[hi] - suv_[lo]) - xk * sv;
      const long double st = sw / h;
      const long double stt = sww / (h * h);
      const long double stv = swv / h;
      diag[s] += cnt - 2 * st + stt;
      off[s] += st - stt;
      diag[s + 1] += stt;
      rhs[s] += sv - stv;
      rhs[s + 1] += stv;
    }
    const size_t last = positions_[chosen.back()];
    diag[k - 1] += static_cast<long double>(n - last);
    rhs[k - 1] += sv_[n] - sv_[last];
    std::vector<long double> heights;
    SolveWithFallback(diag, off, rhs, heights);
    long double explained = 0;
    for (size_t s = 0; s < k; ++s) explained += heights[s] * rhs[s];
    const long double loss = (svv_[n] - explained) / static_cast<long double>(n);
    return static_cast<double>(std::max(loss, 0.0L));
  }

 private:
  std::vector<double> candidates_;
  std::vector<size_t> positions_;
  std::vector<double> sorted_x_;
  long double shift_ = 0;
  std::vector<long double> su_, suu_, sv_, suv_, svv_;
};

std::vector<size_t> WithInserted(const std::vector<size_t>& sorted, size_t value) {
  std::vector<size_t> result;
  result.reserve(sorted.size() + 1);
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), value);
  result.insert(result.end(), sorted.begin(), it);
  result.push_back(value);
  result.insert(result.end(), it, sorted.end());
  return result;
}

std::vector<size_t> WithReplaced(const std::vector<size_t>& sorted,
                                 size_t removed, size_t added) {
  std::vector<size_t> rest;
  rest.reserve(sorted.size());
  for (size_t v : sorted) {
    if (v != removed) rest.push_back(v);
  }
  return WithInserted(rest, added);
}

double MedianOf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid]
                                 : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

void DistillSample::Validate() const {
  if (x.size() != y.size()) throw UsageError("distill sample: x/y length mismatch");
  if (x.empty()) throw UsageError("distill sample is empty");
  for (size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw UsageError("distill sample contains non-finite values");
    }
  }
}

std::vector<double> BuildCandidates(std::span<const double> xs) {
  if (xs.empty()) throw UsageError("cannot build knot candidates from an empty sample");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  std::vector<double> candidates;
  for (size_t p = 0; p <= 100; ++p) {
    const size_t rank = std::max<size_t>(1, (p * n + 99) / 100);
    candidates.push_back(sorted[rank - 1]);
  }
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  return candidates;
}

KnotFit SolveKnotValues(const DistillSample& sample,
                        std::span<const double> knot_xs) {
  sample.Validate();
  const size_t k = knot_xs.size();
  if (k == 0) throw UsageError("at least one knot is required");
  for (size_t s = 0; s < k; ++s) {
    if (!std::isfinite(knot_xs[s])) throw UsageError("knot x must be finite");
    if (s > 0 && !(knot_xs[s - 1] < knot_xs[s])) {
      throw UsageError("knot x values must be strictly increasing");
    }
  }
  {
    std::vector<double> distinct(sample.x);
    std::sort(distinct.begin(), distinct.end());
    const size_t count = static_cast<size_t>(
        std::unique(distinct.begin(), distinct.end()) - distinct.begin());
    if (k > count) {
      Warn("PWL fit with " + std::to_string(k) + " knots on " +
           std::to_string(count) + " distinct x values is underdetermined");
    }
  }

  std::vector<double> diag(k, 0.0), off(k > 0 ? k - 1 : 0, 0.0), rhs(k, 0.0);
  for (size_t i = 0; i < sample.size(); ++i) {
    const double x = sample.x[i];
    const double y = sample.y[i];
    if (x < knot_xs.front()) {
      diag[0] += 1.0;
      rhs[0] += y;
      continue;
    }
    if (x >= knot_xs.back()) {
      diag[k - 1] += 1.0;
      rhs[k - 1] += y;
      continue;
    }
    const size_t upper = static_cast<size_t>(
        std::upper_bound(knot_xs.begin(), knot_xs.end(), x) - knot_xs.begin());
    const size_t s = upper - 1;
    const double t = (x - knot_xs[s]) / (knot_xs[upper] - knot_xs[s]);
    const double a = 1.0 - t;
    diag[s] += a * a;
    off[s] += a * t;
    diag[upper] += t * t;
    rhs[s] += a * y;
    rhs[upper] += t * y;
  }
  std::vector<double> heights;
  KnotFit fit;
  fit.regularized = SolveWithFallback(diag, off, rhs, heights);
  if (fit.regularized) {
    Warn("PWL normal equations are singular (a knot interval holds no data); "
         "solved with ridge regularization");
  }
  fit.function = PwlFunction(std::vector<double>(knot_xs.begin(), knot_xs.end()),
                             std::move(heights));
  double total = 0.0;
  for (size_t i = 0; i < sample.size(); ++i) {
    const double residual = sample.y[i] - fit.function(sample.x[i]);
    total += residual * residual;
  }
  fit.loss = total / static_cast<double>(sample.size());
  return fit;
}

KnotSearchResult FitKnots(const DistillSample& sample,
                          std::span<const double> candidates,
                          size_t num_knots) {
  sample.Validate();
  if (num_knots == 0) throw UsageError("number of knots must be >= 1");
  if (candidates.empty()) throw UsageError("empty knot candidate set");
  for (size_t c = 1; c < candidates.size(); ++c) {
    if (!(candidates[c - 1] < candidates[c])) {
      throw UsageError("knot candidates must be sorted and distinct");
    }
  }

  KnotSearchResult result;
  if (candidates.size() <= num_knots) {
    KnotFit fit = SolveKnotValues(sample, candidates);
    result.function = std::move(fit.function);
    result.loss = fit.loss;
    result.refine_trace.push_back(fit.loss);
    return result;
  }

  const CandidateLoss evaluator(sample, candidates);
  const size_t num_candidates = candidates.size();
  std::vector<bool> used(num_candidates, false);
  std::vector<size_t> chosen = {0};
  used[0] = true;
  double current = evaluator.Loss(chosen);
  result.init_trace.push_back(current);

  while (chosen.size() < num_knots) {
    size_t best = num_candidates;
    double best_loss = 0.0;
    for (size_t c = 0; c < num_candidates; ++c) {
      if (used[c]) continue;
      const double loss = evaluator.Loss(WithInserted(chosen, c));
      if (best == num_candidates || loss < best_loss) {
        best = c;
        best_loss = loss;
      }
    }
    chosen = WithInserted(chosen, best);
    used[best] = true;
    current = best_loss;
    result.init_trace.push_back(current);
  }

  result.refine_trace.push_back(current);
  bool improved = true;
  while (improved) {
    improved = false;
    ++result.refinement_passes;
    const std::vector<size_t> snapshot = chosen;
    for (size_t knot : snapshot) {
      size_t best = num_candidates;
      double best_loss = 0.0;
      for (size_t c = 0; c < num_candidates; ++c) {
        if (used[c]) continue;
        const double loss = evaluator.Loss(WithReplaced(chosen, knot, c));
        if (best == num_candidates || loss < best_loss) {
          best = c;
          best_loss = loss;
        }
      }
      if (best_loss < current) {
        chosen = WithReplaced(chosen, knot, best);
        used[knot] = false;
        used[best] = true;
        current = best_loss;
        result.refine_trace.push_back(current);
        improved = true;
      }
    }
  }

  std::vector<double> knot_xs;
  for (size_t c : chosen) knot_xs.push_back(candidates[c]);
  KnotFit fit = SolveKnotValues(sample, knot_xs);
  result.function = std::move(fit.function);
  result.loss = fit.loss;
  return result;
}

DistillSample BuildDistillSample(const GamModel& model,
                                 const RankingDataset& train_set, size_t j,
                                 size_t sample_cap, uint64_t seed) {
  std::vector<double> xs;
  xs.reserve(train_set.num_items());
  for (const auto& list : train_set.lists()) {
    for (size_t i = 0; i < list.size(); ++i) xs.push_back(list.feature(i, j));
  }
  if (sample_cap > 0 && xs.size() > sample_cap) {
    // Partial Fisher-Yates: a uniform subset without replacement.
    Rng rng(MixSeed(seed, j));
    for (size_t i = 0; i < sample_cap; ++i) {
      const size_t pick = i + static_cast<size_t>(rng.UniformInt(xs.size() - i));
      std::swap(xs[i], xs[pick]);
    }
    xs.resize(sample_cap);
  }
  DistillSample sample;
  sample.y.reserve(xs.size());
  for (double x : xs) sample.y.push_back(model.Contribution(j, x));
  sample.x = std::move(xs);
  return sample;
}

DistilledModel DistillModel(const GamModel& model,
                            const RankingDataset& train_set,
                            const DistillConfig& config) {
  if (config.num_knots == 0) throw UsageError("number of knots must be >= 1");
  if (train_set.empty()) throw DataError("cannot distill on an empty dataset");
  model.CheckCompatible(train_set.schema());
  std::vector<PwlFunction> functions;
  for (size_t j = 0; j < model.num_features(); ++j) {
    DistillSample sample =
        BuildDistillSample(model, train_set, j, config.sample_cap, config.seed);
    const auto [lo, hi] = std::minmax_element(sample.x.begin(), sample.x.end());
    if (*lo == *hi) {
      Warn("feature " + std::to_string(j + 1) +
           " has fewer than 2 distinct values; using a constant PWL");
      double mean = 0.0;
      for (double y : sample.y) mean += y;
      mean /= static_cast<double>(sample.size());
      functions.push_back(PwlFunction::Constant(*lo, mean));
      continue;
    }
    const auto candidates = BuildCandidates(sample.x);
    functions.push_back(FitKnots(sample, candidates, config.num_knots).function);
  }
  return DistilledModel(model.schema(), model.mode(), std::move(functions),
                        model.towers(), model.context_nets());
}

void WriteKnotsCsv(const DistilledModel& model, std::ostream& out) {
  out << "feature,knot_index,x,y\n";
  const auto& functions = model.item_functions();
  for (size_t j = 0; j < functions.size(); ++j) {
    for (size_t k = 0; k < functions[j].num_knots(); ++k) {
      out << (j + 1) << ',' << (k + 1) << ',' << FormatDouble(functions[j].xs()[k])
          << ',' << FormatDouble(functions[j].ys()[k]) << '\n';
    }
  }
}

LatencyReport BenchmarkInference(const Ranker& neural, const Ranker& distilled,
                                 const RankingDataset& dataset,
                                 size_t repetitions) {
  if (repetitions < 3) throw UsageError("benchmark needs at least 3 repetitions");
  if (dataset.empty()) throw DataError("cannot benchmark on an empty dataset");
  neural.CheckCompatible(dataset.schema());
  distilled.CheckCompatible(dataset.schema());

  volatile double sink = 0.0;
  std::vector<double> scores;
  auto run_pass = [&](const Ranker& model) {
    double total = 0.0;
    for (const auto& list : dataset.lists()) {
      scores.resize(list.size());
      model.ScoreItems(list.context(), list.features(), scores);
      total += scores[0];
    }
    sink = sink + total;
  };
  auto measure = [&](const Ranker& model, const std::string& name) {
    run_pass(model);  // warm-up
    std::vector<double> totals;
    for (size_t r = 0; r < repetitions; ++r) {
      const auto start = std::chrono::steady_clock::now();
      run_pass(model);
      totals.push_back(std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count());
    }
    LatencyEntry entry;
    entry.model = name;
    entry.total_seconds = MedianOf(totals);
    entry.per_query_ms =
        1000.0 * entry.total_seconds / static_cast<double>(dataset.size());
    return entry;
  };

  LatencyReport report;
  report.queries = dataset.size();
  report.repetitions = repetitions;
  report.neural = measure(neural, "neural");
  report.distilled = measure(distilled, "distilled");
  report.speedup = report.distilled.per_query_ms > 0.0
                       ? report.neural.per_query_ms / report.distilled.per_query_ms
                       : 0.0;
  return report;
}

void WriteLatencyCsv(const LatencyReport& report, std::ostream& out) {
  out << "model,total_seconds,per_query_ms\n";
  for (const auto* entry : {&report.neural, &report.distilled}) {
    out << entry->model << ',' << FormatDouble(entry->total_seconds) << ','
        << FormatDouble(entry->per_query_ms) << '\n';
  }
}

}  // namespace rankgam
