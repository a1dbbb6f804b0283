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

// Experiment configuration, stored as `key = value` lines. Lines starting
// with '#' are comments; list values are comma-separated. Unknown and
// repeated keys are rejected. to_text() emits every key, so its output is a
// complete snapshot that parses back to an identical configuration.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rhls/data.hpp"
#include "rhls/loss.hpp"
#include "rhls/model.hpp"
#include "rhls/optimizer.hpp"
#include "rhls/smoothing.hpp"

namespace rhls {

enum class DataSource { kSynthetic, kCsv };
enum class EvalLabels { kObserved, kClean };
enum class SmoothingKind { kNone, kVanilla, kTwoSided, kRhls };

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  DataSource source = DataSource::kSynthetic;
  std::string csv_path;
  LabelEncoding csv_labels = LabelEncoding::kBinary;
  SynthConfig synth;

  SmoothingKind smoothing = SmoothingKind::kNone;
  double alpha = 0.1;
  double beta = 0.25;
  std::vector<double> lambda_pos;
  std::vector<double> lambda_neg;

  TaskWeighting weighting = TaskWeighting::kUniform;

  std::size_t tokens = 8;
  std::size_t model_dim = 16;
  OptimConfig optim;

  std::size_t folds = 3;
  std::size_t val_folds = 6;
  std::size_t repeats = 5;
  EvalLabels eval_labels = EvalLabels::kObserved;

  std::vector<double> sweep_betas = {0.0, 0.1, 0.25, 0.5, 0.75, 1.0};
  double ablate_alpha = 0.1;
  double ablate_beta = 0.25;

  SmoothingSpec smoothing_spec() const;
  void validate() const;

  std::string to_text() const;
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig parse_text(const std::string& text);
  static ExperimentConfig load(const std::string& path);
};

/// Keys whose serialized values differ between two configurations.
std::vector<std::string> config_diff(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace rhls
