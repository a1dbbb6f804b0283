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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rhls/matrix.hpp"

namespace rhls {

/// Synthetic subject-structured, imbalanced, noisy multi-task data.
///
/// Every subject has a latent offset; each frame draws a latent vector around
/// it. Task i is clean-positive when a task-specific linear score of the
/// latent exceeds the empirical quantile matching frequency i. Features are a
/// noisy linear view of the latent plus a per-subject appearance shift.
/// Observed labels flip clean positives with probability fn_rate and clean
/// negatives with probability fp_rate.
struct SynthConfig {
  std::size_t subject_count = 27;
  std::size_t frames_per_subject = 740;
  std::size_t input_dim = 32;
  std::vector<double> frequencies = {0.05, 0.07, 0.1, 0.12, 0.15, 0.2, 0.3, 0.45};
  double fn_rate = 0.1;
  double fp_rate = 0.01;
  double task_correlation = 0.3;
  std::size_t latent_dim = 8;
  double feature_noise = 2.0;
  double subject_spread = 0.5;
  double subject_shift = 0.5;
  std::uint64_t seed = 0;

  std::size_t task_count() const { return frequencies.size(); }
  void validate() const;
};

struct Dataset {
  Matrix features;           // N x D
  LabelMatrix clean_labels;  // hard
  LabelMatrix observed_labels;  // hard
  std::vector<std::string> subject_ids;

  std::size_t rows() const { return features.rows(); }
  std::size_t tasks() const { return observed_labels.tasks(); }
};

Dataset generate(const SynthConfig& config);

/// Intensity in 0..5 becomes positive iff it is above 2.
LabelMatrix binarize_intensity(const Matrix& intensities,
                               std::vector<std::string> subject_ids = {});

/// Subject-exclusive folds.
struct FoldPlan {
  std::vector<std::vector<std::string>> folds;

  std::size_t size() const { return folds.size(); }
  /// Subjects of every fold except `held_out`, in fold order.
  std::vector<std::string> training_subjects(std::size_t held_out) const;
  /// FNV-1a digest of the plan, for logging controlled comparisons.
  std::uint64_t digest() const;
};

FoldPlan make_folds(const std::vector<std::string>& subject_ids, std::size_t k,
                    std::uint64_t seed);

struct SubjectSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
};

/// v subject-exclusive (train, validation) splits of one training set.
std::vector<SubjectSplit> validation_splits(const std::vector<std::string>& subjects,
                                            std::size_t v, std::uint64_t seed);

struct ValidationRun {
  std::size_t outer_fold = 0;  // the held-out test fold, never touched
  std::size_t inner_fold = 0;
  SubjectSplit split;
};

/// For each outer arrangement of `plan`, v nested validation splits of its
/// training folds: plan.size() * v runs in total.
std::vector<ValidationRun> nested_validation_plan(const FoldPlan& plan, std::size_t v,
                                                  std::uint64_t seed);

/// Row indices whose subject is in `subjects`, ascending.
std::vector<std::size_t> rows_for_subjects(const std::vector<std::string>& row_subjects,
                                           const std::vector<std::string>& subjects);

enum class LabelEncoding { kBinary, kIntensity };

struct CsvSchema {
  std::string subject_column = "subject";
  std::string feature_prefix = "f";
  std::string task_prefix = "t";
  LabelEncoding labels = LabelEncoding::kBinary;
};

Dataset load_csv(const std::string& path, const CsvSchema& schema = {});
Dataset read_csv(std::istream& in, const CsvSchema& schema = {});

/// Writes features and observed labels as subject,f0..,t0.. (binary labels).
void write_csv(const Dataset& data, const std::string& path);
void write_csv(const Dataset& data, std::ostream& out);

}  // namespace rhls
