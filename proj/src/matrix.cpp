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

#include "rhls/matrix.hpp"

#include <algorithm>

namespace rhls {

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= m.rows()) throw std::out_of_range("row index out of range");
    auto src = m.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

LabelMatrix::LabelMatrix(Matrix values, LabelKind kind,
                         std::vector<std::string> subject_ids)
    : values_(std::move(values)), kind_(kind), subject_ids_(std::move(subject_ids)) {
  if (subject_ids_.size() != values_.rows()) {
    throw std::invalid_argument("subject id count " +
                                std::to_string(subject_ids_.size()) +
                                " does not match row count " +
                                std::to_string(values_.rows()));
  }
  for (std::size_t r = 0; r < values_.rows(); ++r) {
    for (std::size_t t = 0; t < values_.cols(); ++t) {
      const double v = values_(r, t);
      const bool ok = kind_ == LabelKind::kHard ? (v == 0.0 || v == 1.0)
                                                : (v >= 0.0 && v <= 1.0);
      if (!ok) {
        throw std::invalid_argument(
            std::string(kind_ == LabelKind::kHard ? "hard" : "soft") +
            " label out of range at row " + std::to_string(r) + ", task " +
            std::to_string(t));
      }
    }
  }
}

LabelMatrix LabelMatrix::hard(Matrix values) {
  std::vector<std::string> ids(values.rows());
  return LabelMatrix(std::move(values), LabelKind::kHard, std::move(ids));
}

LabelMatrix LabelMatrix::select(std::span<const std::size_t> rows) const {
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (auto r : rows) ids.push_back(subject_ids_.at(r));
  LabelMatrix out;
  out.values_ = select_rows(values_, rows);
  out.kind_ = kind_;
  out.subject_ids_ = std::move(ids);
  return out;
}

double LabelMatrix::column_mean(std::size_t t) const {
  if (rows() == 0) throw std::invalid_argument("empty dataset");
  double sum = 0.0;
  for (std::size_t r = 0; r < rows(); ++r) sum += values_(r, t);
  return sum / static_cast<double>(rows());
}

}  // namespace rhls
