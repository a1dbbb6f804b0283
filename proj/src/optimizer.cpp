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

#include "rhls/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rhls {

void OptimConfig::validate() const {
  for (double lr : base_lr) {
    if (!(lr > 0.0)) throw std::invalid_argument("learning rates must be positive");
  }
  if (!(decay_rate > 0.0 && decay_rate <= 1.0)) {
    throw std::invalid_argument("decay rate must lie in (0, 1]");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("adam betas must lie in [0, 1)");
  }
  if (!(eps > 0.0) || weight_decay < 0.0) {
    throw std::invalid_argument("eps must be positive and weight decay nonnegative");
  }
  if (epochs == 0 || batch_size == 0) {
    throw std::invalid_argument("epochs and batch size must be positive");
  }
  if (lr_scale_enabled && !(transformer_lr0 > 0.0)) {
    throw std::invalid_argument("transformer_lr0 must be positive");
  }
}

double OptimConfig::initial_lr(ParamGroup group) const {
  if (group == ParamGroup::kTransformer && lr_scale_enabled) {
    return scaled_lr(transformer_lr0, batch_size, scale_queries, scale_model_dim);
  }
  return base_lr[static_cast<std::size_t>(group)];
}

OptimState OptimState::for_params(const ModelParams& params) {
  OptimState s;
  for (const auto& t : params.tensors()) {
    s.first_moment.emplace_back(t.values.size(), 0.0);
    s.second_moment.emplace_back(t.values.size(), 0.0);
  }
  return s;
}

double scaled_lr(double base_lr, std::size_t batch_size, std::size_t queries,
                 std::size_t model_dim) {
  if (!(base_lr > 0.0) || batch_size == 0 || queries == 0 || model_dim == 0) {
    throw std::invalid_argument("scaled_lr inputs must be positive");
  }
  return base_lr * static_cast<double>(batch_size) * static_cast<double>(queries) /
         std::sqrt(static_cast<double>(model_dim));
}

double epoch_lr(double base_lr, double decay_rate, std::size_t epoch) {
  return base_lr * std::pow(decay_rate, static_cast<double>(epoch));
}

void adamw_update(std::span<double> values, std::span<const double> grads,
                  std::span<double> first_moment, std::span<double> second_moment,
                  std::uint64_t step, double lr, const OptimConfig& config) {
  const double b1 = config.beta1, b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double g = grads[i];
    first_moment[i] = b1 * first_moment[i] + (1.0 - b1) * g;
    second_moment[i] = b2 * second_moment[i] + (1.0 - b2) * g * g;
    const double m_hat = first_moment[i] / c1;
    const double v_hat = second_moment[i] / c2;
    values[i] -= lr * (m_hat / (std::sqrt(v_hat) + config.eps)) +
                 lr * config.weight_decay * values[i];
  }
}

void adamw_step(ModelParams& params, const ModelParams& grads, OptimState& state,
                const OptimConfig& config) {
  auto p = params.tensors();
  const auto g = grads.tensors();
  if (g.size() != p.size() || state.first_moment.size() != p.size()) {
    throw std::invalid_argument("optimizer state does not match parameters");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (g[i].values.size() != p[i].values.size() ||
        state.first_moment[i].size() != p[i].values.size()) {
      throw std::invalid_argument("gradient shape mismatch for " + std::string(p[i].name));
    }
    for (double v : g[i].values) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("non-finite gradient in parameter group " +
                                    std::string(p[i].name));
      }
    }
  }
  ++state.step;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double lr = epoch_lr(config.initial_lr(p[i].group), config.decay_rate, state.epoch);
    adamw_update(p[i].values, g[i].values, state.first_moment[i], state.second_moment[i],
                 state.step, lr, config);
  }
  ++params.version;
}

}  // namespace rhls
