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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rhls/commands.hpp"
#include "rhls/text.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> repeats;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "key = value configuration file");
  cmd->add_option("--seed", opts.seed, "master seed (overrides config)");
  cmd->add_option("--out", opts.out, "output directory (overrides config)");
  cmd->add_option("--repeats", opts.repeats, "protocol repeats (overrides config)");
}

rhls::ExperimentConfig resolve(const CommonOptions& opts) {
  rhls::ExperimentConfig config = opts.config_path.empty()
                                      ? rhls::ExperimentConfig{}
                                      : rhls::ExperimentConfig::load(opts.config_path);
  if (opts.seed) config.seed = *opts.seed;
  if (opts.out) config.out_dir = *opts.out;
  if (opts.repeats) config.repeats = *opts.repeats;
  config.validate();
  return config;
}

std::string percent(double v) { return rhls::format_fixed(100.0 * v, 1); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RHLS label smoothing experiments"};
  app.require_subcommand(1);
  CommonOptions opts;

  auto* gen = app.add_subcommand("gen", "generate the dataset and print task frequencies");
  auto* train = app.add_subcommand("train", "k-fold train/evaluate under the configured smoothing");
  auto* sweep = app.add_subcommand("sweep-beta", "nested-validation score for each RHLS beta");
  auto* ablate = app.add_subcommand("ablate", "baseline / vanilla LS / FW-BCE / RHLS comparison");
  auto* hist = app.add_subcommand("hist", "per-task prediction histograms from a run record");
  for (auto* cmd : {gen, train, sweep, ablate, hist}) add_common(cmd, opts);

  std::string betas_arg;
  sweep->add_option("--betas", betas_arg, "comma-separated betas (default: sweep.betas)");
  std::string run_path;
  hist->add_option("--run", run_path, "run record CSV (runs/<id>.csv)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const rhls::ExperimentConfig config = resolve(opts);
    if (*gen) {
      const auto result = rhls::cmd_gen(config);
      std::cout << "wrote " << result.dataset_path << "\n"
                << rhls::format_frequency_table(result.frequencies);
    } else if (*train) {
      const auto record = rhls::cmd_train(config);
      std::cout << "mean F1 " << percent(record.summary.mean) << " +/- "
                << percent(record.summary.std) << " over " << record.summary.runs
                << " repeats\n";
    } else if (*sweep) {
      std::vector<double> betas = config.sweep_betas;
      if (!betas_arg.empty()) {
        betas.clear();
        for (const auto& item : rhls::split(betas_arg, ',')) {
          auto v = rhls::parse_double(item);
          if (!v) throw std::invalid_argument("bad beta '" + item + "'");
          betas.push_back(*v);
        }
      }
      for (const auto& row : rhls::cmd_sweep_beta(config, betas)) {
        std::cout << "beta " << rhls::format_double(row.beta) << ": "
                  << percent(row.score.mean) << " +/- " << percent(row.score.std) << "\n";
      }
    } else if (*ablate) {
      const auto result = rhls::cmd_ablate(config);
      for (std::size_t i = 0; i < result.records.size(); ++i) {
        std::cout << result.variants[i].first << ": "
                  << percent(result.records[i].summary.mean) << " +/- "
                  << percent(result.records[i].summary.std) << "\n";
      }
    } else if (*hist) {
      for (const auto& path : rhls::cmd_hist(config, run_path)) std::cout << path << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "rhls: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
