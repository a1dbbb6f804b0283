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

#include "rhls/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rhls {
namespace {

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1], got " +
                                std::to_string(v));
  }
}

void require_hard(const LabelMatrix& labels) {
  if (labels.kind() != LabelKind::kHard) {
    throw std::invalid_argument("smoothing expects hard labels");
  }
}

LabelMatrix soft_like(const LabelMatrix& labels, Matrix values) {
  return LabelMatrix(std::move(values), LabelKind::kSoft, labels.subject_ids());
}

}  // namespace

TaskFrequencies make_frequencies(std::span<const double> raw) {
  TaskFrequencies out;
  out.f.reserve(raw.size());
  for (double v : raw) {
    out.f.push_back(std::clamp(v, kFrequencyEpsilon, 1.0 - kFrequencyEpsilon));
  }
  return out;
}

TaskFrequencies compute_frequencies(const LabelMatrix& labels) {
  require_hard(labels);
  if (labels.rows() == 0 || labels.tasks() == 0) {
    throw std::invalid_argument("empty dataset");
  }
  std::vector<double> counts(labels.tasks(), 0.0);
  for (std::size_t r = 0; r < labels.rows(); ++r) {
    for (std::size_t t = 0; t < labels.tasks(); ++t) counts[t] += labels(r, t);
  }
  for (double& c : counts) c /= static_cast<double>(labels.rows());
  return make_frequencies(counts);
}

LabelMatrix vanilla_smooth(const LabelMatrix& labels, double alpha) {
  require_hard(labels);
  check_unit(alpha, "alpha");
  Matrix out = labels.values();
  // (1 - alpha) y + alpha / 2, written so both endpoints round exactly
  for (double& y : out.data()) y = y * (1.0 - alpha / 2.0) + (1.0 - y) * alpha / 2.0;
  return soft_like(labels, std::move(out));
}

LabelMatrix two_sided_smooth(const LabelMatrix& labels,
                             std::span<const double> lambda_pos,
                             std::span<const double> lambda_neg) {
  require_hard(labels);
  const std::size_t tasks = labels.tasks();
  if (lambda_pos.size() != tasks || lambda_neg.size() != tasks) {
    throw std::invalid_argument(
        "two-sided smoothing needs one coefficient pair per task: expected " +
        std::to_string(tasks) + ", got " + std::to_string(lambda_pos.size()) +
        "/" + std::to_string(lambda_neg.size()));
  }
  for (std::size_t t = 0; t < tasks; ++t) {
    check_unit(lambda_pos[t], "lambda_pos");
    check_unit(lambda_neg[t], "lambda_neg");
  }
  Matrix out = labels.values();
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t t = 0; t < tasks; ++t) {
      const double y = row[t];
      row[t] = y * (1.0 - lambda_pos[t] / 2.0) + (1.0 - y) * lambda_neg[t] / 2.0;
    }
  }
  return soft_like(labels, std::move(out));
}

TwoSidedLambdas rhls_lambdas(const TaskFrequencies& freqs, double beta) {
  check_unit(beta, "beta");
  TwoSidedLambdas out;
  out.lambda_pos.reserve(freqs.f.size());
  out.lambda_neg.reserve(freqs.f.size());
  for (double f : freqs.f) {
    if (!(f > 0.0 && f < 1.0)) {
      throw std::invalid_argument("task frequency must lie in (0, 1)");
    }
    out.lambda_neg.push_back(beta * std::max(0.0, (1.0 - 2.0 * f) / (1.0 - f)));
    out.lambda_pos.push_back(beta * std::max(0.0, (2.0 * f - 1.0) / f));
  }
  return out;
}

LabelMatrix rhls_smooth(const LabelMatrix& labels, const TaskFrequencies& freqs,
                        double beta) {
  if (freqs.task_count() != labels.tasks()) {
    throw std::invalid_argument("frequency count does not match task count");
  }
  const auto lambdas = rhls_lambdas(freqs, beta);
  return two_sided_smooth(labels, lambdas.lambda_pos, lambdas.lambda_neg);
}

std::vector<double> fw_weights(const TaskFrequencies& freqs) {
  if (freqs.f.empty()) throw std::invalid_argument("no tasks");
  std::vector<double> w;
  w.reserve(freqs.f.size());
  double total = 0.0;
  for (double f : freqs.f) {
    if (!(f > 0.0)) throw std::invalid_argument("task frequency must be positive");
    w.push_back(1.0 / f);
    total += 1.0 / f;
  }
  for (double& v : w) v /= total;
  return w;
}

LabelMatrix apply_smoothing(const LabelMatrix& labels, const SmoothingSpec& spec,
                            const TaskFrequencies& freqs) {
  struct Visitor {
    const LabelMatrix& labels;
    const TaskFrequencies& freqs;
    LabelMatrix operator()(const NoSmoothing&) const { return labels; }
    LabelMatrix operator()(const VanillaSmoothing& s) const {
      return vanilla_smooth(labels, s.alpha);
    }
    LabelMatrix operator()(const TwoSidedSmoothing& s) const {
      return two_sided_smooth(labels, s.lambda_pos, s.lambda_neg);
    }
    LabelMatrix operator()(const RhlsSmoothing& s) const {
      return rhls_smooth(labels, freqs, s.beta);
    }
  };
  return std::visit(Visitor{labels, freqs}, spec);
}

const char* smoothing_name(const SmoothingSpec& spec) {
  switch (spec.index()) {
    case 0: return "none";
    case 1: return "vanilla";
    case 2: return "two_sided";
    default: return "rhls";
  }
}

}  // namespace rhls
