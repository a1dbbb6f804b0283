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

// Subcommands of the `rhls` tool. Every command writes into config.out_dir:
//
//   config_snapshot      the full configuration that produced the outputs
//   runs/<id>.csv        run records (see write_run_record)
//   tables/*.csv         machine-readable tables, deterministic given the config
//   report.md            human-readable summary, including wall-clock time

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rhls/config.hpp"
#include "rhls/experiment.hpp"

namespace rhls {

struct FrequencyRow {
  std::size_t task = 0;
  double target = 0.0;  // NaN for CSV-sourced data
  double clean = 0.0;
  double observed = 0.0;
};

struct GenResult {
  std::string dataset_path;
  std::vector<FrequencyRow> frequencies;
};

GenResult cmd_gen(const ExperimentConfig& config);

RunRecord cmd_train(const ExperimentConfig& config);

struct SweepRow {
  double beta = 0.0;
  AggregateReport score;
};

std::vector<SweepRow> cmd_sweep_beta(const ExperimentConfig& config,
                                     const std::vector<double>& betas);

/// The four controlled variants: each differs from the baseline only in its
/// smoothing or loss-weighting keys.
std::vector<std::pair<std::string, ExperimentConfig>> ablation_variants(
    const ExperimentConfig& config);

struct AblationResult {
  std::vector<std::pair<std::string, ExperimentConfig>> variants;
  std::vector<RunRecord> records;
};

AblationResult cmd_ablate(const ExperimentConfig& config);

/// Per-task histogram CSVs for the record at `run_path`, under out_dir/tables.
std::vector<std::string> cmd_hist(const ExperimentConfig& config, const std::string& run_path);

/// Plain-text frequency table printed by `rhls gen`.
std::string format_frequency_table(const std::vector<FrequencyRow>& rows);

}  // namespace rhls
