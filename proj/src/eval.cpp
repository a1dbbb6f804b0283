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

#include "rhls/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rhls {
namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

BinaryScores f1(std::span<const double> predictions, std::span<const double> labels,
                double threshold) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("predictions and labels differ in length");
  }
  if (predictions.empty()) throw std::invalid_argument("f1 of an empty set");
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool predicted = predictions[i] >= threshold;
    const bool actual = labels[i] == 1.0;
    tp += predicted && actual;
    fp += predicted && !actual;
    fn += !predicted && actual;
  }
  BinaryScores s;
  s.precision = ratio(tp, tp + fp);
  s.recall = ratio(tp, tp + fn);
  s.f1 = ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
  return s;
}

double mean_f1(std::span<const double> per_task_f1) {
  if (per_task_f1.empty()) throw std::invalid_argument("mean_f1 needs at least one task");
  double sum = 0.0;
  for (double v : per_task_f1) sum += v;
  return sum / static_cast<double>(per_task_f1.size());
}

TaskScores score_tasks(const Matrix& predictions, const LabelMatrix& labels,
                       double threshold) {
  if (predictions.rows() != labels.rows() || predictions.cols() != labels.tasks()) {
    throw std::invalid_argument("prediction and label shapes differ");
  }
  TaskScores out;
  std::vector<double> p(predictions.rows()), y(predictions.rows()), f(labels.tasks());
  for (std::size_t t = 0; t < labels.tasks(); ++t) {
    for (std::size_t r = 0; r < predictions.rows(); ++r) {
      p[r] = predictions(r, t);
      y[r] = labels(r, t);
    }
    out.per_task.push_back(rhls::f1(p, y, threshold));
    f[t] = out.per_task.back().f1;
  }
  out.mean_f1 = mean_f1(f);
  return out;
}

std::size_t histogram_bin(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("prediction outside [0, 1]");
  const auto bin = static_cast<std::size_t>(p * static_cast<double>(kHistogramBins));
  return std::min(bin, kHistogramBins - 1);
}

ClassHistogram histogram(std::span<const double> predictions,
                         std::span<const double> labels) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("predictions and labels differ in length");
  }
  ClassHistogram h;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    auto& counts = labels[i] == 1.0 ? h.positive : h.negative;
    ++counts[histogram_bin(predictions[i])];
  }
  return h;
}

std::vector<ClassHistogram> task_histograms(const Matrix& predictions,
                                            const LabelMatrix& labels) {
  if (predictions.rows() != labels.rows() || predictions.cols() != labels.tasks()) {
    throw std::invalid_argument("prediction and label shapes differ");
  }
  std::vector<ClassHistogram> out(labels.tasks());
  for (std::size_t r = 0; r < predictions.rows(); ++r) {
    for (std::size_t t = 0; t < labels.tasks(); ++t) {
      auto& counts = labels(r, t) == 1.0 ? out[t].positive : out[t].negative;
      ++counts[histogram_bin(predictions(r, t))];
    }
  }
  return out;
}

AggregateReport aggregate(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("aggregate needs at least one run");
  AggregateReport r;
  r.runs = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return r;
}

}  // namespace rhls
