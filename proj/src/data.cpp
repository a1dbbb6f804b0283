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

#include "rhls/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "rhls/text.hpp"

namespace rhls {
namespace {

std::string subject_name(std::size_t i, std::size_t count) {
  std::string digits = std::to_string(i);
  const std::size_t width = std::to_string(count > 0 ? count - 1 : 0).size();
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return "s" + digits;
}

std::vector<std::string> distinct_sorted(const std::vector<std::string>& ids) {
  std::set<std::string> s(ids.begin(), ids.end());
  return {s.begin(), s.end()};
}

class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& what)
      : std::runtime_error("csv line " + std::to_string(line) + ": " + what) {}
};

bool indexed_column(const std::string& name, const std::string& prefix) {
  if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0) {
    return false;
  }
  return std::all_of(name.begin() + static_cast<std::ptrdiff_t>(prefix.size()), name.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

void SynthConfig::validate() const {
  if (subject_count < 3) throw std::invalid_argument("synthetic data needs at least 3 subjects");
  if (frames_per_subject == 0) throw std::invalid_argument("frames_per_subject must be positive");
  if (input_dim == 0 || latent_dim == 0) throw std::invalid_argument("dimensions must be positive");
  if (frequencies.empty()) throw std::invalid_argument("at least one task frequency is required");
  for (double f : frequencies) {
    if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument("task frequencies must lie in (0, 1)");
  }
  if (!(fn_rate >= 0.0 && fn_rate < 1.0) || !(fp_rate >= 0.0 && fp_rate < 1.0)) {
    throw std::invalid_argument("noise rates must lie in [0, 1)");
  }
  if (!(task_correlation >= 0.0 && task_correlation <= 1.0)) {
    throw std::invalid_argument("task_correlation must lie in [0, 1]");
  }
  if (feature_noise < 0.0 || subject_spread < 0.0 || subject_shift < 0.0) {
    throw std::invalid_argument("noise scales must be nonnegative");
  }
}

Dataset generate(const SynthConfig& config) {
  config.validate();
  const std::size_t S = config.subject_count, F = config.frames_per_subject;
  const std::size_t N = S * F, D = config.input_dim, L = config.latent_dim;
  const std::size_t T = config.task_count();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  // Task directions share a common component of weight task_correlation.
  std::vector<double> common(L);
  for (double& c : common) c = normal(rng);
  std::vector<double> directions(T * L);
  for (std::size_t t = 0; t < T; ++t) {
    double norm = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      double& a = directions[t * L + l];
      a = std::sqrt(config.task_correlation) * common[l] +
          std::sqrt(1.0 - config.task_correlation) * normal(rng);
      norm += a * a;
    }
    norm = std::sqrt(norm);
    for (std::size_t l = 0; l < L; ++l) directions[t * L + l] /= norm;
  }
  std::vector<double> mixing(L * D);
  for (double& m : mixing) m = normal(rng) / std::sqrt(static_cast<double>(L));

  Dataset data;
  data.features = Matrix(N, D);
  data.subject_ids.resize(N);
  Matrix scores(N, T);
  std::vector<double> offset(L), shift(D), z(L);
  for (std::size_t s = 0; s < S; ++s) {
    for (double& o : offset) o = config.subject_spread * normal(rng);
    for (double& v : shift) v = config.subject_shift * normal(rng);
    const std::string id = subject_name(s, S);
    for (std::size_t f = 0; f < F; ++f) {
      const std::size_t r = s * F + f;
      data.subject_ids[r] = id;
      for (std::size_t l = 0; l < L; ++l) z[l] = offset[l] + normal(rng);
      auto x = data.features.row(r);
      for (std::size_t j = 0; j < D; ++j) {
        double acc = shift[j] + config.feature_noise * normal(rng);
        for (std::size_t l = 0; l < L; ++l) acc += z[l] * mixing[l * D + j];
        x[j] = acc;
      }
      for (std::size_t t = 0; t < T; ++t) {
        double acc = 0.0;
        for (std::size_t l = 0; l < L; ++l) acc += z[l] * directions[t * L + l];
        scores(r, t) = acc;
      }
    }
  }

  Matrix clean(N, T), observed(N, T);
  std::vector<double> column(N);
  for (std::size_t t = 0; t < T; ++t) {
    const auto positives =
        static_cast<std::size_t>(std::llround(config.frequencies[t] * static_cast<double>(N)));
    if (positives == 0 || positives >= N) {
      throw std::invalid_argument("task " + std::to_string(t) + " frequency " +
                                  format_double(config.frequencies[t]) +
                                  " is infeasible for " + std::to_string(N) + " rows");
    }
    for (std::size_t r = 0; r < N; ++r) column[r] = scores(r, t);
    std::sort(column.begin(), column.end());
    const double threshold = 0.5 * (column[N - positives - 1] + column[N - positives]);
    for (std::size_t r = 0; r < N; ++r) clean(r, t) = scores(r, t) > threshold ? 1.0 : 0.0;
  }
  for (std::size_t r = 0; r < N; ++r) {
    for (std::size_t t = 0; t < T; ++t) {
      const double y = clean(r, t);
      const double u = uniform(rng);
      const bool flip = y == 1.0 ? u < config.fn_rate : u < config.fp_rate;
      observed(r, t) = flip ? 1.0 - y : y;
    }
  }
  data.clean_labels = LabelMatrix(std::move(clean), LabelKind::kHard, data.subject_ids);
  data.observed_labels = LabelMatrix(std::move(observed), LabelKind::kHard, data.subject_ids);
  return data;
}

LabelMatrix binarize_intensity(const Matrix& intensities,
                               std::vector<std::string> subject_ids) {
  if (subject_ids.empty()) subject_ids.resize(intensities.rows());
  Matrix out(intensities.rows(), intensities.cols());
  for (std::size_t r = 0; r < intensities.rows(); ++r) {
    for (std::size_t t = 0; t < intensities.cols(); ++t) {
      const double v = intensities(r, t);
      if (!(v >= 0.0 && v <= 5.0) || v != std::floor(v)) {
        throw std::invalid_argument("intensity " + format_double(v) + " at row " +
                                    std::to_string(r) + ", column " + std::to_string(t) +
                                    " is not an integer in 0..5");
      }
      out(r, t) = v > 2.0 ? 1.0 : 0.0;
    }
  }
  return LabelMatrix(std::move(out), LabelKind::kHard, std::move(subject_ids));
}

std::vector<std::string> FoldPlan::training_subjects(std::size_t held_out) const {
  if (held_out >= folds.size()) throw std::out_of_range("fold index out of range");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    if (i != held_out) out.insert(out.end(), folds[i].begin(), folds[i].end());
  }
  return out;
}

std::uint64_t FoldPlan::digest() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ull;
  };
  for (const auto& fold : folds) {
    for (const auto& s : fold) {
      for (char c : s) mix(static_cast<unsigned char>(c));
      mix(',');
    }
    mix('|');
  }
  return h;
}

FoldPlan make_folds(const std::vector<std::string>& subject_ids, std::size_t k,
                    std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("fold count must be positive");
  auto subjects = distinct_sorted(subject_ids);
  if (subjects.size() < k) {
    throw std::invalid_argument("cannot split " + std::to_string(subjects.size()) +
                                " subjects into " + std::to_string(k) + " folds");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(subjects.begin(), subjects.end(), rng);
  FoldPlan plan;
  plan.folds.resize(k);
  for (std::size_t i = 0; i < subjects.size(); ++i) plan.folds[i % k].push_back(subjects[i]);
  return plan;
}

std::vector<SubjectSplit> validation_splits(const std::vector<std::string>& subjects,
                                            std::size_t v, std::uint64_t seed) {
  if (v < 2) throw std::invalid_argument("nested validation needs at least 2 folds");
  const FoldPlan inner = make_folds(subjects, v, seed);
  std::vector<SubjectSplit> out;
  for (std::size_t i = 0; i < v; ++i) {
    out.push_back({inner.training_subjects(i), inner.folds[i]});
  }
  return out;
}

std::vector<ValidationRun> nested_validation_plan(const FoldPlan& plan, std::size_t v,
                                                  std::uint64_t seed) {
  std::vector<ValidationRun> runs;
  for (std::size_t outer = 0; outer < plan.size(); ++outer) {
    auto splits = validation_splits(plan.training_subjects(outer), v, seed + outer);
    for (std::size_t inner = 0; inner < splits.size(); ++inner) {
      runs.push_back({outer, inner, std::move(splits[inner])});
    }
  }
  return runs;
}

std::vector<std::size_t> rows_for_subjects(const std::vector<std::string>& row_subjects,
                                           const std::vector<std::string>& subjects) {
  const std::unordered_set<std::string> keep(subjects.begin(), subjects.end());
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < row_subjects.size(); ++r) {
    if (keep.contains(row_subjects[r])) rows.push_back(r);
  }
  return rows;
}

Dataset read_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw CsvError(1, "empty file");
  ++line_no;
  const auto header = split(trim(line), ',');
  std::ptrdiff_t subject_col = -1;
  std::vector<std::size_t> feature_cols, task_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name(trim(header[c]));
    if (name == schema.subject_column) {
      subject_col = static_cast<std::ptrdiff_t>(c);
    } else if (indexed_column(name, schema.feature_prefix)) {
      feature_cols.push_back(c);
    } else if (indexed_column(name, schema.task_prefix)) {
      task_cols.push_back(c);
    } else {
      throw CsvError(line_no, "unexpected column '" + name + "'");
    }
  }
  if (subject_col < 0) {
    throw CsvError(line_no, "missing column '" + schema.subject_column + "'");
  }
  if (feature_cols.empty()) {
    throw CsvError(line_no, "no feature columns '" + schema.feature_prefix + "<i>'");
  }
  if (task_cols.empty()) {
    throw CsvError(line_no, "no label columns '" + schema.task_prefix + "<i>'");
  }

  std::vector<double> features, labels;
  std::vector<std::string> subjects;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != header.size()) {
      throw CsvError(line_no, "expected " + std::to_string(header.size()) + " cells, got " +
                                  std::to_string(cells.size()));
    }
    subjects.emplace_back(trim(cells[static_cast<std::size_t>(subject_col)]));
    for (auto c : feature_cols) {
      auto v = parse_double(cells[c]);
      if (!v || !std::isfinite(*v)) {
        throw CsvError(line_no, "non-numeric cell '" + cells[c] + "' in column " + header[c]);
      }
      features.push_back(*v);
    }
    for (auto c : task_cols) {
      auto v = parse_double(cells[c]);
      if (!v) throw CsvError(line_no, "non-numeric cell '" + cells[c] + "' in column " + header[c]);
      if (schema.labels == LabelEncoding::kBinary) {
        if (*v != 0.0 && *v != 1.0) {
          throw CsvError(line_no, "label " + cells[c] + " in column " + header[c] + " is not 0/1");
        }
        labels.push_back(*v);
      } else {
        if (!(*v >= 0.0 && *v <= 5.0) || *v != std::floor(*v)) {
          throw CsvError(line_no, "intensity " + cells[c] + " in column " + header[c] +
                                      " is not an integer in 0..5");
        }
        labels.push_back(*v);
      }
    }
  }
  if (subjects.empty()) throw CsvError(line_no, "no data rows");

  const std::size_t n = subjects.size();
  Dataset data;
  data.features = Matrix(n, feature_cols.size(), std::move(features));
  Matrix raw(n, task_cols.size(), std::move(labels));
  data.observed_labels = schema.labels == LabelEncoding::kIntensity
                             ? binarize_intensity(raw, subjects)
                             : LabelMatrix(std::move(raw), LabelKind::kHard, subjects);
  data.clean_labels = data.observed_labels;
  data.subject_ids = std::move(subjects);
  return data;
}

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return read_csv(in, schema);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_csv(const Dataset& data, std::ostream& out) {
  out << "subject";
  for (std::size_t j = 0; j < data.features.cols(); ++j) out << ",f" << j;
  for (std::size_t t = 0; t < data.tasks(); ++t) out << ",t" << t;
  out << '\n';
  for (std::size_t r = 0; r < data.rows(); ++r) {
    out << data.subject_ids[r];
    for (double v : data.features.row(r)) out << ',' << format_double(v);
    for (std::size_t t = 0; t < data.tasks(); ++t) {
      out << ',' << (data.observed_labels(r, t) == 1.0 ? '1' : '0');
    }
    out << '\n';
  }
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_csv(data, out);
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace rhls
