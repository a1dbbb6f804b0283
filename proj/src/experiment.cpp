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

#include "rhls/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rhls/loss.hpp"
#include "rhls/optimizer.hpp"
#include "rhls/smoothing.hpp"
#include "rhls/text.hpp"

namespace rhls {
namespace {

constexpr std::uint64_t kDataTag = 1;
constexpr std::uint64_t kFoldTag = 2;
constexpr std::uint64_t kNestedTag = 3;
constexpr std::uint64_t kRepeatTag = 100;
constexpr std::uint64_t kValidationRunTag = 1000;

struct Job {
  std::size_t repeat;
  std::size_t fold;
  std::uint64_t seed;
  const std::vector<std::size_t>* train;
  const std::vector<std::size_t>* eval;
};

std::vector<FoldOutcome> run_jobs(const Dataset& data, const std::vector<Job>& jobs,
                                  const ExperimentConfig& config, const Method& method) {
  std::vector<FoldOutcome> out(jobs.size());
  const auto n = static_cast<std::int64_t>(jobs.size());
  // Each job owns its model and optimizer; results land in fixed slots.
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    const Job& job = jobs[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] =
        train_and_evaluate(data, *job.train, *job.eval, config, method, job.seed);
    out[static_cast<std::size_t>(i)].repeat = job.repeat;
    out[static_cast<std::size_t>(i)].fold = job.fold;
  }
  return out;
}

void summarize(RunRecord& record, std::size_t repeats) {
  record.repeat_scores.assign(repeats, 0.0);
  std::vector<std::size_t> counts(repeats, 0);
  for (const auto& f : record.folds) {
    record.repeat_scores[f.repeat] += f.mean_f1;
    ++counts[f.repeat];
  }
  for (std::size_t r = 0; r < repeats; ++r) {
    record.repeat_scores[r] /= static_cast<double>(std::max<std::size_t>(counts[r], 1));
  }
  record.summary = aggregate(record.repeat_scores);
}

std::string join_counts(const std::array<std::size_t, kHistogramBins>& counts) {
  std::string s;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(counts[i]);
  }
  return s;
}

std::array<std::size_t, kHistogramBins> parse_counts(const std::string& s, std::size_t line) {
  std::array<std::size_t, kHistogramBins> out{};
  std::istringstream in(s);
  for (auto& c : out) {
    if (!(in >> c)) {
      throw std::runtime_error("run record line " + std::to_string(line) +
                               ": histogram needs " + std::to_string(kHistogramBins) +
                               " counts");
    }
  }
  return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
  std::uint64_t z = parent + 0x9e3779b97f4a7c15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Method method_from_config(const ExperimentConfig& config, std::string id) {
  return Method{std::move(id), config.smoothing_spec(), config.weighting};
}

Dataset load_dataset(const ExperimentConfig& config) {
  if (config.source == DataSource::kCsv) {
    CsvSchema schema;
    schema.labels = config.csv_labels;
    return load_csv(config.csv_path, schema);
  }
  SynthConfig synth = config.synth;
  synth.seed = derive_seed(config.seed, kDataTag);
  return generate(synth);
}

FeatureScaler FeatureScaler::fit(const Matrix& x) {
  FeatureScaler s;
  s.mean.assign(x.cols(), 0.0);
  s.scale.assign(x.cols(), 1.0);
  if (x.rows() == 0) return s;
  const double n = static_cast<double>(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) s.mean[c] += x(r, c);
  }
  for (double& m : s.mean) m /= n;
  std::vector<double> var(x.cols(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double d = x(r, c) - s.mean[c];
      var[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < x.cols(); ++c) {
    const double sd = std::sqrt(var[c] / n);
    s.scale[c] = sd > 0.0 ? 1.0 / sd : 1.0;
  }
  return s;
}

Matrix FeatureScaler::apply(const Matrix& x) const {
  Matrix out = x;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - mean[c]) * scale[c];
  }
  return out;
}

ModelParams train_model(const Matrix& features, const Matrix& targets, const LossSpec& loss,
                        const ModelConfig& model, const OptimConfig& optim,
                        std::uint64_t seed) {
  optim.validate();
  if (features.rows() != targets.rows() || features.rows() == 0) {
    throw std::invalid_argument("training features and targets disagree or are empty");
  }
  ModelConfig mc = model;
  mc.seed = seed;
  ModelParams params = init_params(mc);
  OptimState state = OptimState::for_params(params);
  std::mt19937_64 rng(derive_seed(seed, 1));
  std::vector<std::size_t> order(features.rows());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < optim.epochs; ++epoch) {
    state.epoch = epoch;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += optim.batch_size) {
      const std::size_t stop = std::min(order.size(), start + optim.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, stop - start);
      const Matrix xb = select_rows(features, batch);
      const Matrix yb = select_rows(targets, batch);
      auto fwd = forward(params, xb);
      const Matrix g = batch_loss_grad(fwd.logits, yb, loss);
      const ModelParams grads = backward(params, fwd.cache, g);
      adamw_step(params, grads, state, optim);
    }
  }
  return params;
}

FoldOutcome train_and_evaluate(const Dataset& data, const std::vector<std::size_t>& train_rows,
                               const std::vector<std::size_t>& eval_rows,
                               const ExperimentConfig& config, const Method& method,
                               std::uint64_t seed) {
  if (train_rows.empty() || eval_rows.empty()) {
    throw std::invalid_argument("empty training or evaluation split");
  }
  const LabelMatrix train_labels = data.observed_labels.select(train_rows);
  const TaskFrequencies freqs = compute_frequencies(train_labels);
  const LabelMatrix targets = apply_smoothing(train_labels, method.smoothing, freqs);
  const LossSpec loss = LossSpec::make(method.weighting, freqs);

  const Matrix train_raw = select_rows(data.features, train_rows);
  const FeatureScaler scaler = FeatureScaler::fit(train_raw);
  ModelConfig mc;
  mc.input_dim = data.features.cols();
  mc.token_count = config.tokens;
  mc.model_dim = config.model_dim;
  mc.task_count = data.tasks();
  OptimConfig optim = config.optim;
  optim.scale_queries = mc.task_count;
  optim.scale_model_dim = mc.model_dim;
  const ModelParams params =
      train_model(scaler.apply(train_raw), targets.values(), loss, mc, optim, seed);

  const Matrix probs = predict(params, scaler.apply(select_rows(data.features, eval_rows)));
  const LabelMatrix eval_labels = (config.eval_labels == EvalLabels::kClean
                                       ? data.clean_labels
                                       : data.observed_labels)
                                      .select(eval_rows);
  const TaskScores scores = score_tasks(probs, eval_labels);
  const auto hists = task_histograms(probs, eval_labels);

  FoldOutcome out;
  out.seed = seed;
  out.mean_f1 = scores.mean_f1;
  for (std::size_t t = 0; t < data.tasks(); ++t) {
    TaskOutcome task;
    task.frequency = freqs.f[t];
    task.smoothed_mean = targets.column_mean(t);
    task.scores = scores.per_task[t];
    for (std::size_t r = 0; r < eval_labels.rows(); ++r) {
      (eval_labels(r, t) == 1.0 ? task.eval_positive : task.eval_negative) += 1;
    }
    task.hist = hists[t];
    out.tasks.push_back(task);
  }
  return out;
}

RunRecord run_protocol(const Dataset& data, const ExperimentConfig& config,
                       const Method& method) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const FoldPlan plan = make_folds(data.subject_ids, config.folds,
                                   derive_seed(config.seed, kFoldTag));
  std::vector<std::vector<std::size_t>> test_rows, train_rows;
  for (std::size_t f = 0; f < plan.size(); ++f) {
    test_rows.push_back(rows_for_subjects(data.subject_ids, plan.folds[f]));
    train_rows.push_back(rows_for_subjects(data.subject_ids, plan.training_subjects(f)));
  }
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < config.repeats; ++r) {
    const std::uint64_t repeat_seed = derive_seed(config.seed, kRepeatTag + r);
    for (std::size_t f = 0; f < plan.size(); ++f) {
      jobs.push_back({r, f, derive_seed(repeat_seed, f), &train_rows[f], &test_rows[f]});
    }
  }
  RunRecord record;
  record.id = method.id;
  record.fold_digest = plan.digest();
  record.folds = run_jobs(data, jobs, config, method);
  summarize(record, config.repeats);
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

RunRecord run_validation(const Dataset& data, const ExperimentConfig& config,
                         const Method& method) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const FoldPlan plan = make_folds(data.subject_ids, config.folds,
                                   derive_seed(config.seed, kFoldTag));
  const auto runs =
      nested_validation_plan(plan, config.val_folds, derive_seed(config.seed, kNestedTag));
  std::vector<std::vector<std::size_t>> val_rows, train_rows;
  for (const auto& run : runs) {
    val_rows.push_back(rows_for_subjects(data.subject_ids, run.split.validation));
    train_rows.push_back(rows_for_subjects(data.subject_ids, run.split.train));
  }
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < config.repeats; ++r) {
    const std::uint64_t repeat_seed = derive_seed(config.seed, kRepeatTag + r);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      jobs.push_back({r, i, derive_seed(repeat_seed, kValidationRunTag + i), &train_rows[i],
                      &val_rows[i]});
    }
  }
  RunRecord record;
  record.id = method.id;
  record.fold_digest = plan.digest();
  record.folds = run_jobs(data, jobs, config, method);
  summarize(record, config.repeats);
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

void write_run_record(const RunRecord& record, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write run record " + path);
  out << "# fold_digest " << record.fold_digest << '\n';
  out << "repeat,fold,seed,task,frequency,smoothed_mean,precision,recall,f1,eval_pos,"
         "eval_neg,hist_pos,hist_neg\n";
  for (const auto& f : record.folds) {
    for (std::size_t t = 0; t < f.tasks.size(); ++t) {
      const auto& k = f.tasks[t];
      out << f.repeat << ',' << f.fold << ',' << f.seed << ',' << t << ','
          << format_double(k.frequency) << ',' << format_double(k.smoothed_mean) << ','
          << format_double(k.scores.precision) << ',' << format_double(k.scores.recall)
          << ',' << format_double(k.scores.f1) << ',' << k.eval_positive << ','
          << k.eval_negative << ',' << join_counts(k.hist.positive) << ','
          << join_counts(k.hist.negative) << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing run record " + path);
}

RunRecord read_run_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing run record " + path);
  RunRecord record;
  record.id = std::filesystem::path(path).stem().string();
  std::string line;
  std::size_t line_no = 1;
  if (std::getline(in, line) && line.rfind("# fold_digest ", 0) == 0) {
    record.fold_digest = std::stoull(line.substr(14));
    std::getline(in, line);
    ++line_no;
  }
  if (!in || line.rfind("repeat,fold,seed,task", 0) != 0) {
    throw std::runtime_error(path + ": not a run record");
  }
  std::size_t max_repeat = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != 13) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               " has " + std::to_string(cells.size()) + " cells, expected 13");
    }
    auto num = [&](std::size_t i) {
      auto v = parse_double(cells[i]);
      if (!v) throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                       ": bad number '" + cells[i] + "'");
      return *v;
    };
    const auto repeat = static_cast<std::size_t>(num(0));
    const auto fold = static_cast<std::size_t>(num(1));
    const std::uint64_t seed = std::stoull(cells[2]);
    if (record.folds.empty() || record.folds.back().repeat != repeat ||
        record.folds.back().fold != fold) {
      record.folds.push_back(FoldOutcome{repeat, fold, seed, {}, 0.0});
    }
    TaskOutcome k;
    k.frequency = num(4);
    k.smoothed_mean = num(5);
    k.scores = {num(6), num(7), num(8)};
    k.eval_positive = static_cast<std::size_t>(num(9));
    k.eval_negative = static_cast<std::size_t>(num(10));
    k.hist.positive = parse_counts(cells[11], line_no);
    k.hist.negative = parse_counts(cells[12], line_no);
    record.folds.back().tasks.push_back(k);
    max_repeat = std::max(max_repeat, repeat);
  }
  if (record.folds.empty()) throw std::runtime_error(path + ": run record has no rows");
  for (auto& f : record.folds) {
    std::vector<double> f1s;
    for (const auto& k : f.tasks) f1s.push_back(k.scores.f1);
    f.mean_f1 = mean_f1(f1s);
  }
  summarize(record, max_repeat + 1);
  return record;
}

std::vector<ClassHistogram> merged_histograms(const RunRecord& record) {
  std::vector<ClassHistogram> out;
  for (const auto& f : record.folds) {
    if (out.empty()) out.resize(f.tasks.size());
    for (std::size_t t = 0; t < f.tasks.size(); ++t) {
      for (std::size_t b = 0; b < kHistogramBins; ++b) {
        out[t].positive[b] += f.tasks[t].hist.positive[b];
        out[t].negative[b] += f.tasks[t].hist.negative[b];
      }
    }
  }
  return out;
}

std::vector<std::string> write_histograms(const RunRecord& record, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  const auto hists = merged_histograms(record);
  for (std::size_t t = 0; t < hists.size(); ++t) {
    const std::string path =
        (std::filesystem::path(dir) / ("hist_" + record.id + "_t" + std::to_string(t) + ".csv"))
            .string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "bin_lo,bin_hi,count_pos,count_neg\n";
    for (std::size_t b = 0; b < kHistogramBins; ++b) {
      out << format_fixed(static_cast<double>(b) / kHistogramBins, 2) << ','
          << format_fixed(static_cast<double>(b + 1) / kHistogramBins, 2) << ','
          << hists[t].positive[b] << ',' << hists[t].negative[b] << '\n';
    }
    paths.push_back(path);
  }
  return paths;
}

}  // namespace rhls
