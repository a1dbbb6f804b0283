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

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "rhls/config.hpp"

using namespace rhls;

TEST_CASE("config text round trip") {
  ExperimentConfig c;
  c.seed = 17;
  c.out_dir = "some/dir";
  c.smoothing = SmoothingKind::kTwoSided;
  c.lambda_pos = {0.1, 0.0};
  c.lambda_neg = {0.0, 1.0 / 3.0};
  c.weighting = TaskWeighting::kFrequency;
  c.synth.frequencies = {0.05, 0.4};
  c.optim.base_lr = {1e-3, 2.5e-4};
  c.optim.lr_scale_enabled = true;
  c.eval_labels = EvalLabels::kClean;
  c.sweep_betas = {0.0, 0.5};
  const auto back = ExperimentConfig::parse_text(c.to_text());
  CHECK(back.to_text() == c.to_text());
  CHECK(config_diff(c, back).empty());
  CHECK(back.lambda_neg[1] == 1.0 / 3.0);
  CHECK(back.optim.lr_scale_enabled);
}

TEST_CASE("config parsing accepts comments and blank lines") {
  const auto c = ExperimentConfig::parse_text(
      "# desk run\n\nseed = 3\n  smoothing.kind = rhls  \nsmoothing.beta=0.5\n");
  CHECK(c.seed == 3);
  CHECK(c.smoothing == SmoothingKind::kRhls);
  CHECK(c.beta == 0.5);
  CHECK(c.folds == 3);
}

TEST_CASE("config parsing rejects bad input with line numbers") {
  CHECK_THROWS_WITH(ExperimentConfig::parse_text("seed = 1\nmodel.depth = 4\n"),
                    doctest::Contains("line 2: unknown key 'model.depth'"));
  CHECK_THROWS_WITH(ExperimentConfig::parse_text("seed = 1\nseed = 2\n"),
                    doctest::Contains("duplicate key"));
  CHECK_THROWS_WITH(ExperimentConfig::parse_text("seed 1\n"), doctest::Contains("line 1"));
  CHECK_THROWS_WITH(ExperimentConfig::parse_text("\nsmoothing.kind = robust\n"),
                    doctest::Contains("line 2"));
  CHECK_THROWS(ExperimentConfig::parse_text("optim.epochs = -3\n"));
  CHECK_THROWS(ExperimentConfig::parse_text("smoothing.alpha = x\n"));
  CHECK_THROWS(ExperimentConfig::load("/nonexistent/rhls.cfg"));
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  c.synth.subject_count = 0;
  CHECK_THROWS(c.validate());
  c = ExperimentConfig{};
  c.beta = 1.5;
  CHECK_THROWS(c.validate());
  c = ExperimentConfig{};
  c.val_folds = 1;
  CHECK_THROWS(c.validate());
  c = ExperimentConfig{};
  c.source = DataSource::kCsv;
  CHECK_THROWS_WITH(c.validate(), doctest::Contains("csv_path"));
}

TEST_CASE("config_diff names changed keys") {
  ExperimentConfig a, b;
  b.smoothing = SmoothingKind::kVanilla;
  b.weighting = TaskWeighting::kFrequency;
  const auto keys = config_diff(a, b);
  REQUIRE(keys.size() == 2);
  CHECK(keys[0] == "smoothing.kind");
  CHECK(keys[1] == "loss.weighting");
}

TEST_CASE("config file load") {
  const auto path = std::filesystem::temp_directory_path() / "rhls_config_test.cfg";
  {
    std::ofstream out(path);
    out << "seed = 9\nprotocol.repeats = 2\n";
  }
  const auto c = ExperimentConfig::load(path.string());
  CHECK(c.seed == 9);
  CHECK(c.repeats == 2);
  std::filesystem::remove(path);
}
