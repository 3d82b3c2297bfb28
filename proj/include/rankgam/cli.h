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

#ifndef RANKGAM_CLI_H_
#define RANKGAM_CLI_H_

#include <cstddef>
#include <cstdint>
#include <exception>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rankgam {

// Exit statuses of the rankgam tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

// Every setting a command may read. Each subcommand binds the subset it
// uses; the resolved values are written to <output_dir>/config.toml.
struct RunConfig {
  std::string command;
  std::string output_dir;
  uint64_t seed = 0;

  // Data.
  std::string train_path;
  std::string valid_path;
  std::string test_path;
  std::string train_context;
  std::string valid_context;
  std::string test_context;
  std::string data_path;
  std::string data_context;
  std::string transform = "identity";

  // Model.
  std::string model_path;
  std::string mode = "context-absent";
  std::vector<size_t> item_hidden{16, 8};
  std::vector<size_t> context_hidden{128, 64};
  size_t embedding_dim = 300;

  // Training.
  std::string loss = "approx_ndcg";
  double temperature = 0.1;
  double learning_rate = 0.1;
  size_t epochs = 100;
  size_t batch_size = 128;
  double initial_accumulator = 0.1;
  std::optional<double> clip_norm;

  // Evaluation and diagnostics.
  std::vector<size_t> cutoffs{1, 5, 10};
  size_t repetitions = 10;
  std::vector<size_t> features;  // 1-based; empty means all
  size_t grid_size = 101;

  // Distillation.
  size_t num_knots = 5;
  size_t sample_cap = 100000;
  std::string latency_data;
  std::string latency_context;
  size_t latency_repetitions = 5;

  // Synthetic data.
  size_t num_features = 6;
  size_t num_context = 1;
  size_t num_lists = 1000;
  size_t items_per_list = 10;
  bool context_interaction = false;
  size_t num_context_values = 4;
  double noise = 0.2;
  double train_fraction = 0.8;
  double valid_fraction = 0.1;
  double test_fraction = 0.1;
};

// Parses argv-style arguments (without the program name) and runs one
// subcommand. Normal output goes to `out`; failures print a single line
//   error: <usage|data|numeric>: <message>
// to `err` and map onto the exit codes above.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// Exit status for an exception escaping a command.
int ExitCodeFor(const std::exception& e);

}  // namespace rankgam

#endif  // RANKGAM_CLI_H_
