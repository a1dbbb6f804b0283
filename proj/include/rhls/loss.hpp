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

#include <vector>

#include "rhls/matrix.hpp"
#include "rhls/smoothing.hpp"

namespace rhls {

inline constexpr double kProbabilityEpsilon = 1e-7;

enum class TaskWeighting { kUniform, kFrequency };

/// Per-task weights of the multi-task loss. Always sums to 1.
struct LossSpec {
  std::vector<double> weights;

  static LossSpec uniform(std::size_t tasks);
  static LossSpec frequency(const TaskFrequencies& freqs);
  static LossSpec make(TaskWeighting weighting, const TaskFrequencies& freqs);
};

double sigmoid(double z);

/// Soft-target binary cross-entropy; `p` is clamped to [1e-7, 1 - 1e-7].
double bce_soft(double p, double target);

/// sum_t w_t * mean_b bce(sigmoid(z_bt), y_bt).
double batch_loss(const Matrix& logits, const Matrix& targets, const LossSpec& spec);

/// dL/dz_bt = w_t * (sigmoid(z_bt) - y_bt) / B.
Matrix batch_loss_grad(const Matrix& logits, const Matrix& targets,
                       const LossSpec& spec);

}  // namespace rhls
