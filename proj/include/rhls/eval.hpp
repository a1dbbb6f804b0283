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

#include <array>
#include <span>
#include <vector>

#include "rhls/matrix.hpp"

namespace rhls {

inline constexpr double kDecisionThreshold = 0.5;
inline constexpr std::size_t kHistogramBins = 20;

struct BinaryScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Positive iff p >= threshold. Any 0/0 ratio is reported as 0.
BinaryScores f1(std::span<const double> predictions, std::span<const double> labels,
                double threshold = kDecisionThreshold);

struct TaskScores {
  std::vector<BinaryScores> per_task;
  double mean_f1 = 0.0;
};

double mean_f1(std::span<const double> per_task_f1);

/// Column-wise f1 of an N x T prediction matrix against hard labels.
TaskScores score_tasks(const Matrix& predictions, const LabelMatrix& labels,
                       double threshold = kDecisionThreshold);

/// 20 equal bins on [0, 1]; bin i covers [i/20, (i+1)/20), the last bin is
/// closed on the right.
struct ClassHistogram {
  std::array<std::size_t, kHistogramBins> positive{};
  std::array<std::size_t, kHistogramBins> negative{};
};

std::size_t histogram_bin(double p);

ClassHistogram histogram(std::span<const double> predictions,
                         std::span<const double> labels);

/// One histogram per task column.
std::vector<ClassHistogram> task_histograms(const Matrix& predictions,
                                            const LabelMatrix& labels);

struct AggregateReport {
  std::size_t runs = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single run
};

AggregateReport aggregate(std::span<const double> values);

}  // namespace rhls
