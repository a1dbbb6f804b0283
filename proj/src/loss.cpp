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

#include "rhls/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rhls {
namespace {

void check_shapes(const Matrix& logits, const Matrix& targets, const LossSpec& spec) {
  if (logits.rows() != targets.rows() || logits.cols() != targets.cols() ||
      logits.cols() != spec.weights.size()) {
    throw std::invalid_argument(
        "loss shape mismatch: logits " + std::to_string(logits.rows()) + "x" +
        std::to_string(logits.cols()) + ", targets " +
        std::to_string(targets.rows()) + "x" + std::to_string(targets.cols()) +
        ", weights " + std::to_string(spec.weights.size()));
  }
  if (logits.rows() == 0) throw std::invalid_argument("empty batch");
}

}  // namespace

LossSpec LossSpec::uniform(std::size_t tasks) {
  if (tasks == 0) throw std::invalid_argument("no tasks");
  return LossSpec{std::vector<double>(tasks, 1.0 / static_cast<double>(tasks))};
}

LossSpec LossSpec::frequency(const TaskFrequencies& freqs) {
  return LossSpec{fw_weights(freqs)};
}

LossSpec LossSpec::make(TaskWeighting weighting, const TaskFrequencies& freqs) {
  return weighting == TaskWeighting::kUniform ? uniform(freqs.task_count())
                                              : frequency(freqs);
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double bce_soft(double p, double target) {
  p = std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
  return -(target * std::log(p) + (1.0 - target) * std::log1p(-p));
}

double batch_loss(const Matrix& logits, const Matrix& targets, const LossSpec& spec) {
  check_shapes(logits, targets, spec);
  const std::size_t batch = logits.rows();
  double total = 0.0;
  for (std::size_t t = 0; t < logits.cols(); ++t) {
    double task_sum = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      task_sum += bce_soft(sigmoid(logits(b, t)), targets(b, t));
    }
    total += spec.weights[t] * task_sum / static_cast<double>(batch);
  }
  return total;
}

Matrix batch_loss_grad(const Matrix& logits, const Matrix& targets,
                       const LossSpec& spec) {
  check_shapes(logits, targets, spec);
  const double inv_batch = 1.0 / static_cast<double>(logits.rows());
  Matrix grad(logits.rows(), logits.cols());
  for (std::size_t b = 0; b < logits.rows(); ++b) {
    for (std::size_t t = 0; t < logits.cols(); ++t) {
      grad(b, t) = spec.weights[t] * (sigmoid(logits(b, t)) - targets(b, t)) * inv_batch;
    }
  }
  return grad;
}

}  // namespace rhls
