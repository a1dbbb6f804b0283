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

// Label transformations for imbalanced multi-task binary targets.
//
// Vanilla smoothing moves every target toward 1/2 by the same amount.
// Two-sided smoothing uses separate per-task coefficients for positive and
// negative entries:
//
//   y' = y * (1 - lambda_pos / 2) + (1 - y) * lambda_neg / 2
//
// RHLS picks those coefficients from the task's
// positive frequency f so that only the majority class is softened:
//
//   lambda_neg = beta * max(0, (1 - 2f) / (1 - f))
//   lambda_pos = beta * max(0, (2f - 1) / f)
//
// With beta = 1 the expected smoothed label of every task is exactly 1/2.

#pragma once

#include <span>
#include <variant>
#include <vector>

#include "rhls/matrix.hpp"

namespace rhls {

inline constexpr double kFrequencyEpsilon = 1e-6;

/// Per-task positive frequencies, clamped to [eps, 1 - eps].
struct TaskFrequencies {
  std::vector<double> f;

  std::size_t task_count() const { return f.size(); }
};

/// Builds frequencies from raw values, clamping each into [eps, 1 - eps].
TaskFrequencies make_frequencies(std::span<const double> raw);

struct NoSmoothing {};
struct VanillaSmoothing {
  double alpha = 0.1;
};
struct TwoSidedSmoothing {
  std::vector<double> lambda_pos;
  std::vector<double> lambda_neg;
};
struct RhlsSmoothing {
  double beta = 0.25;
};

using SmoothingSpec =
    std::variant<NoSmoothing, VanillaSmoothing, TwoSidedSmoothing, RhlsSmoothing>;

struct TwoSidedLambdas {
  std::vector<double> lambda_pos;
  std::vector<double> lambda_neg;
};

TaskFrequencies compute_frequencies(const LabelMatrix& labels);

LabelMatrix vanilla_smooth(const LabelMatrix& labels, double alpha);

LabelMatrix two_sided_smooth(const LabelMatrix& labels,
                             std::span<const double> lambda_pos,
                             std::span<const double> lambda_neg);

TwoSidedLambdas rhls_lambdas(const TaskFrequencies& freqs, double beta);

LabelMatrix rhls_smooth(const LabelMatrix& labels, const TaskFrequencies& freqs,
                        double beta);

/// Normalized inverse-frequency task weights; they sum to 1.
std::vector<double> fw_weights(const TaskFrequencies& freqs);

/// Dispatches on `spec`. `freqs` is only read for RHLS.
LabelMatrix apply_smoothing(const LabelMatrix& labels, const SmoothingSpec& spec,
                            const TaskFrequencies& freqs);

/// Short stable name of the variant: none, vanilla, two_sided, rhls.
const char* smoothing_name(const SmoothingSpec& spec);

}  // namespace rhls
