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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rhls/model.hpp"

namespace rhls {

struct OptimConfig {
  /// Initial learning rate per ParamGroup (encoder, transformer).
  std::array<double, 2> base_lr = {3e-3, 3e-3};
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
  /// Per-epoch multiplicative learning-rate decay.
  double decay_rate = 0.75;
  std::size_t epochs = 40;
  std::size_t batch_size = 32;

  /// When set, the transformer rate is transformer_lr0 * B * q / sqrt(d).
  bool lr_scale_enabled = false;
  double transformer_lr0 = 4e-8;
  std::size_t scale_queries = 8;    // q; the harness sets it to the task count
  std::size_t scale_model_dim = 16;  // d; the harness sets it to model.dim

  void validate() const;
  /// Initial rate of `group` after the optional query scaling.
  double initial_lr(ParamGroup group) const;
};

struct OptimState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::uint64_t step = 0;
  std::size_t epoch = 0;

  static OptimState for_params(const ModelParams& params);
};

double scaled_lr(double base_lr, std::size_t batch_size, std::size_t queries,
                 std::size_t model_dim);

double epoch_lr(double base_lr, double decay_rate, std::size_t epoch);

/// One AdamW update of every tensor in `params` (bias-corrected moments,
/// decoupled weight decay). The rate of each tensor is
/// epoch_lr(initial_lr(group), decay_rate, state.epoch).
void adamw_step(ModelParams& params, const ModelParams& grads, OptimState& state,
                const OptimConfig& config);

/// AdamW on a bare vector; used by adamw_step and by tests on toy objectives.
void adamw_update(std::span<double> values, std::span<const double> grads,
                  std::span<double> first_moment, std::span<double> second_moment,
                  std::uint64_t step, double lr, const OptimConfig& config);

}  // namespace rhls
