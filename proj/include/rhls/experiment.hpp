// Copyright (c) 2026 The RHLS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment driver: subject-exclusive k-fold evaluation repeated over
// seeds, nested validation for the beta sweep, and the four-way ablation.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rhls/config.hpp"
#include "rhls/data.hpp"
#include "rhls/eval.hpp"
#include "rhls/model.hpp"

namespace rhls {

/// splitmix64 of (parent, tag); the seed tree is master -> repeat -> fold.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag);

struct TaskOutcome {
  double frequency = 0.0;      // training-split positive frequency
  double smoothed_mean = 0.0;  // mean training target after smoothing
  BinaryScores scores;
  std::size_t eval_positive = 0;
  std::size_t eval_negative = 0;
  ClassHistogram hist;
};

/// One trained model evaluated on one held-out subject set.
struct FoldOutcome {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::uint64_t seed = 0;
  std::vector<TaskOutcome> tasks;
  double mean_f1 = 0.0;
};

struct RunRecord {
  std::string id;
  std::uint64_t fold_digest = 0;
  std::vector<FoldOutcome> folds;
  /// Mean over folds of each repeat's mean F1, one entry per repeat.
  std::vector<double> repeat_scores;
  AggregateReport summary;
  double wall_seconds = 0.0;
};

/// Method variant run under an otherwise fixed configuration.
struct Method {
  std::string id;
  SmoothingSpec smoothing;
  TaskWeighting weighting = TaskWeighting::kUniform;
};

Method method_from_config(const ExperimentConfig& config, std::string id);

/// The dataset named by the configuration (synthetic data seeded from it).
Dataset load_dataset(const ExperimentConfig& config);

/// Standardizes columns with statistics of `fit` rows only.
struct FeatureScaler {
  std::vector<double> mean, scale;
  static FeatureScaler fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;
};

/// Minibatch AdamW training on soft targets.
ModelParams train_model(const Matrix& features, const Matrix& targets, const LossSpec& loss,
                        const ModelConfig& model, const OptimConfig& optim,
                        std::uint64_t seed);

/// Fits on `train_rows` and scores on `eval_rows`. Frequencies, smoothing and
/// weighting only ever see the training rows.
FoldOutcome train_and_evaluate(const Dataset& data, const std::vector<std::size_t>& train_rows,
                               const std::vector<std::size_t>& eval_rows,
                               const ExperimentConfig& config, const Method& method,
                               std::uint64_t seed);

/// Outer protocol: for every repeat and every held-out fold, train on the
/// other folds and evaluate on it. folds * repeats models.
RunRecord run_protocol(const Dataset& data, const ExperimentConfig& config,
                       const Method& method);

/// Nested validation: for every repeat and every outer arrangement, val_folds
/// inner (train, validation) runs; the test fold is never used.
RunRecord run_validation(const Dataset& data, const ExperimentConfig& config,
                         const Method& method);

// Run-record CSV: one row per (repeat, fold, task) with columns
//   repeat,fold,seed,task,frequency,smoothed_mean,precision,recall,f1,
//   eval_pos,eval_neg,hist_pos,hist_neg
// where hist_* hold 20 space-separated bin counts.
void write_run_record(const RunRecord& record, const std::string& path);
RunRecord read_run_record(const std::string& path);

/// Per-task histograms summed over every fold row of a record.
std::vector<ClassHistogram> merged_histograms(const RunRecord& record);

/// Writes <dir>/hist_<id>_t<task>.csv with bin_lo,bin_hi,count_pos,count_neg.
std::vector<std::string> write_histograms(const RunRecord& record, const std::string& dir);

}  // namespace rhls
