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

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rhls {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw std::invalid_argument("matrix data size does not match shape");
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Copies the given rows of `m` into a new matrix, in order.
Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows);

enum class LabelKind { kHard, kSoft };

/// N x T labels with one subject identifier per row.
class LabelMatrix {
 public:
  LabelMatrix() = default;
  LabelMatrix(Matrix values, LabelKind kind, std::vector<std::string> subject_ids);

  /// Hard labels without subject information (ids are left empty strings).
  static LabelMatrix hard(Matrix values);

  const Matrix& values() const { return values_; }
  LabelKind kind() const { return kind_; }
  const std::vector<std::string>& subject_ids() const { return subject_ids_; }

  std::size_t rows() const { return values_.rows(); }
  std::size_t tasks() const { return values_.cols(); }
  double operator()(std::size_t r, std::size_t t) const { return values_(r, t); }

  LabelMatrix select(std::span<const std::size_t> rows) const;

  /// Mean of column `t`.
  double column_mean(std::size_t t) const;

  bool operator==(const LabelMatrix&) const = default;

 private:
  Matrix values_;
  LabelKind kind_ = LabelKind::kHard;
  std::vector<std::string> subject_ids_;
};

}  // namespace rhls
