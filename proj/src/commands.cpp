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

#include "rhls/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rhls/smoothing.hpp"
#include "rhls/text.hpp"

namespace fs = std::filesystem;

namespace rhls {
namespace {

struct OutputDir {
  fs::path root;

  explicit OutputDir(const ExperimentConfig& config) : root(config.out_dir) {
    std::error_code ec;
    fs::create_directories(root / "runs", ec);
    fs::create_directories(root / "tables", ec);
    if (ec || !fs::is_directory(root / "tables")) {
      throw std::runtime_error("cannot create output directory " + root.string());
    }
    write("config_snapshot", config.to_text());
  }

  std::string path(const std::string& rel) const { return (root / rel).string(); }

  void write(const std::string& rel, const std::string& text) const {
    std::ofstream out(root / rel);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path(rel));
  }
};

std::string pct(double v) { return format_fixed(100.0 * v, 1); }

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << v;
  return s.str();
}

std::string per_task_table(const RunRecord& record) {
  std::string out = "task,frequency,smoothed_mean,precision,recall,f1\n";
  if (record.folds.empty()) return out;
  const std::size_t tasks = record.folds.front().tasks.size();
  const double n = static_cast<double>(record.folds.size());
  for (std::size_t t = 0; t < tasks; ++t) {
    double freq = 0, smoothed = 0, precision = 0, recall = 0, f1 = 0;
    for (const auto& f : record.folds) {
      freq += f.tasks[t].frequency;
      smoothed += f.tasks[t].smoothed_mean;
      precision += f.tasks[t].scores.precision;
      recall += f.tasks[t].scores.recall;
      f1 += f.tasks[t].scores.f1;
    }
    out += std::to_string(t) + ',' + format_double(freq / n) + ',' +
           format_double(smoothed / n) + ',' + format_double(precision / n) + ',' +
           format_double(recall / n) + ',' + format_double(f1 / n) + '\n';
  }
  return out;
}

std::string repeat_table(const RunRecord& record) {
  std::string out = "repeat,mean_f1\n";
  for (std::size_t r = 0; r < record.repeat_scores.size(); ++r) {
    out += std::to_string(r) + ',' + format_double(record.repeat_scores[r]) + '\n';
  }
  out += "mean," + format_double(record.summary.mean) + '\n';
  out += "std," + format_double(record.summary.std) + '\n';
  return out;
}

std::string beta_id(double beta) { return "sweep_beta_" + format_double(beta); }

}  // namespace

std::string format_frequency_table(const std::vector<FrequencyRow>& rows) {
  std::ostringstream out;
  out << "task  target  clean   observed\n";
  for (const auto& r : rows) {
    out << 't' << r.task << "    "
        << (std::isnan(r.target) ? std::string("  -   ") : format_fixed(r.target, 4)) << "  "
        << format_fixed(r.clean, 4) << "  " << format_fixed(r.observed, 4) << '\n';
  }
  return out.str();
}

GenResult cmd_gen(const ExperimentConfig& config) {
  config.validate();
  const Dataset data = load_dataset(config);
  const OutputDir out(config);
  GenResult result;
  result.dataset_path = out.path("dataset.csv");
  write_csv(data, result.dataset_path);

  const auto clean = compute_frequencies(data.clean_labels);
  const auto observed = compute_frequencies(data.observed_labels);
  std::string table = "task,target,clean,observed\n";
  for (std::size_t t = 0; t < data.tasks(); ++t) {
    FrequencyRow row;
    row.task = t;
    row.target = config.source == DataSource::kSynthetic
                     ? config.synth.frequencies[t]
                     : std::numeric_limits<double>::quiet_NaN();
    row.clean = clean.f[t];
    row.observed = observed.f[t];
    result.frequencies.push_back(row);
    table += std::to_string(t) + ',' +
             (std::isnan(row.target) ? std::string() : format_double(row.target)) + ',' +
             format_double(row.clean) + ',' + format_double(row.observed) + '\n';
  }
  out.write("tables/frequencies.csv", table);
  out.write("report.md", "# Dataset\n\n" + std::to_string(data.rows()) + " rows, " +
                             std::to_string(data.features.cols()) + " features, " +
                             std::to_string(data.tasks()) + " tasks.\n\n```\n" +
                             format_frequency_table(result.frequencies) + "```\n");
  return result;
}

RunRecord cmd_train(const ExperimentConfig& config) {
  config.validate();
  const Dataset data = load_dataset(config);
  const OutputDir out(config);
  RunRecord record = run_protocol(data, config, method_from_config(config, "train"));
  write_run_record(record, out.path("runs/train.csv"));
  out.write("tables/train_summary.csv", repeat_table(record));
  out.write("tables/train_per_task.csv", per_task_table(record));
  std::ostringstream md;
  md << "# Train\n\n"
     << "Smoothing: " << smoothing_name(config.smoothing_spec()) << ", loss weighting: "
     << (config.weighting == TaskWeighting::kUniform ? "uniform" : "frequency") << "\n\n"
     << "Mean F1 over " << record.summary.runs << " repeats x " << config.folds
     << " folds: " << pct(record.summary.mean) << " \xC2\xB1 " << pct(record.summary.std)
     << "\n\nFold plan digest: " << hex64(record.fold_digest) << "\n\n"
     << "Wall-clock: " << format_fixed(record.wall_seconds, 1) << " s\n";
  out.write("report.md", md.str());
  return record;
}

std::vector<SweepRow> cmd_sweep_beta(const ExperimentConfig& config,
                                     const std::vector<double>& betas) {
  config.validate();
  if (betas.empty()) throw std::invalid_argument("sweep needs at least one beta");
  for (double b : betas) {
    if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("beta outside [0, 1]");
  }
  const Dataset data = load_dataset(config);
  const OutputDir out(config);
  std::vector<SweepRow> rows;
  std::string table = "beta,mean_f1,std\n";
  std::ostringstream md;
  md << "# RHLS beta sweep (nested validation, " << config.folds << " x "
     << config.val_folds << " runs per repeat)\n\n| beta | mean F1 |\n|---|---|\n";
  double wall = 0.0;
  for (double beta : betas) {
    const RunRecord record =
        run_validation(data, config, Method{beta_id(beta), RhlsSmoothing{beta}, config.weighting});
    write_run_record(record, out.path("runs/" + record.id + ".csv"));
    rows.push_back({beta, record.summary});
    table += format_double(beta) + ',' + format_double(record.summary.mean) + ',' +
             format_double(record.summary.std) + '\n';
    md << "| " << format_double(beta) << " | " << pct(record.summary.mean) << " \xC2\xB1 "
       << pct(record.summary.std) << " |\n";
    wall += record.wall_seconds;
  }
  out.write("tables/sweep_beta.csv", table);
  md << "\nWall-clock: " << format_fixed(wall, 1) << " s\n";
  out.write("report.md", md.str());
  return rows;
}

std::vector<std::pair<std::string, ExperimentConfig>> ablation_variants(
    const ExperimentConfig& config) {
  ExperimentConfig base = config;
  base.smoothing = SmoothingKind::kNone;
  base.weighting = TaskWeighting::kUniform;

  ExperimentConfig vanilla = base;
  vanilla.smoothing = SmoothingKind::kVanilla;
  vanilla.alpha = config.ablate_alpha;

  ExperimentConfig weighted = base;
  weighted.weighting = TaskWeighting::kFrequency;

  ExperimentConfig robin = base;
  robin.smoothing = SmoothingKind::kRhls;
  robin.beta = config.ablate_beta;

  return {{"baseline", base}, {"vanilla_ls", vanilla}, {"fw_bce", weighted}, {"rhls", robin}};
}

AblationResult cmd_ablate(const ExperimentConfig& config) {
  config.validate();
  const Dataset data = load_dataset(config);
  const OutputDir out(config);
  AblationResult result;
  result.variants = ablation_variants(config);
  std::string table = "method,mean_f1,std,repeats,fold_digest\n";
  std::string per_task = "method,task,frequency,smoothed_mean,precision,recall,f1\n";
  std::ostringstream md;
  md << "# Ablation\n\n| Method | Mean F1 | Differs from baseline in |\n|---|---|---|\n";
  double wall = 0.0;
  for (const auto& [id, variant] : result.variants) {
    RunRecord record = run_protocol(data, variant, method_from_config(variant, id));
    write_run_record(record, out.path("runs/" + id + ".csv"));
    table += id + ',' + format_double(record.summary.mean) + ',' +
             format_double(record.summary.std) + ',' + std::to_string(record.summary.runs) +
             ',' + hex64(record.fold_digest) + '\n';
    std::istringstream rows(per_task_table(record));
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) per_task += id + ',' + line + '\n';

    std::string diff;
    for (const auto& key : config_diff(result.variants.front().second, variant)) {
      diff += (diff.empty() ? "" : ", ") + key;
    }
    md << "| " << id << " | " << pct(record.summary.mean) << " \xC2\xB1 "
       << pct(record.summary.std) << " | " << (diff.empty() ? "-" : diff) << " |\n";
    wall += record.wall_seconds;
    result.records.push_back(std::move(record));
  }
  out.write("tables/ablation.csv", table);
  out.write("tables/ablation_per_task.csv", per_task);
  md << "\nAll methods share fold plan " << hex64(result.records.front().fold_digest)
     << " and per-repeat seeds.\n\nWall-clock: " << format_fixed(wall, 1) << " s\n";
  out.write("report.md", md.str());
  return result;
}

std::vector<std::string> cmd_hist(const ExperimentConfig& config, const std::string& run_path) {
  const RunRecord record = read_run_record(run_path);
  const OutputDir out(config);
  return write_histograms(record, out.path("tables"));
}

}  // namespace rhls
