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

#include <cmath>
#include <random>

#include "doctest.h"
#include "rhls/optimizer.hpp"

using namespace rhls;
using doctest::Approx;

TEST_CASE("scaled_lr follows base * B * q / sqrt(d)") {
  // initial rate 4e-8 with B = 32, q = P = 196, d = 768
  CHECK(scaled_lr(4e-8, 32, 196, 768) == Approx(9.052852220893333e-06).epsilon(1e-12));
  CHECK(scaled_lr(4e-8, 32, 196, 768) == Approx(9.053e-6).epsilon(1e-4));
  CHECK(scaled_lr(1e-3, 1, 1, 1) == 1e-3);
  CHECK(scaled_lr(1e-3, 4, 16, 9) == 2.0 * scaled_lr(1e-3, 4, 8, 9));
  CHECK_THROWS(scaled_lr(0.0, 1, 1, 1));
  CHECK_THROWS(scaled_lr(1e-3, 0, 1, 1));
  CHECK_THROWS(scaled_lr(1e-3, 1, 0, 1));
  CHECK_THROWS(scaled_lr(1e-3, 1, 1, 0));
}

TEST_CASE("property: scaled_lr is linear in B and q and scales as 1/sqrt(d)") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> small(1, 64);
  for (int i = 0; i < 200; ++i) {
    const std::size_t b = small(rng), q = small(rng), d = small(rng), k = small(rng);
    const double base = scaled_lr(1e-4, b, q, d);
    CHECK(scaled_lr(1e-4, k * b, q, d) == Approx(k * base).epsilon(1e-14));
    CHECK(scaled_lr(1e-4, b, k * q, d) == Approx(k * base).epsilon(1e-14));
    CHECK(scaled_lr(1e-4, b, q, k * k * d) == Approx(base / k).epsilon(1e-14));
  }
}

TEST_CASE("epoch_lr decays exponentially") {
  CHECK(epoch_lr(1e-3, 0.75, 0) == 1e-3);
  CHECK(epoch_lr(1e-3, 0.75, 1) == Approx(7.5e-4).epsilon(1e-15));
  CHECK(epoch_lr(1e-3, 0.75, 2) == Approx(5.625e-4).epsilon(1e-15));
}

TEST_CASE("adamw fixed point with zero gradient and no decay") {
  OptimConfig cfg;
  cfg.weight_decay = 0.0;
  ModelConfig mc;
  mc.seed = 4;
  auto p = init_params(mc);
  const auto before = p;
  auto g = ModelParams::zeros(mc);
  auto state = OptimState::for_params(p);
  for (int i = 0; i < 10; ++i) adamw_step(p, g, state, cfg);
  CHECK(p.same_values(before));
  CHECK(state.step == 10);
  CHECK(p.version == before.version + 10);
}

TEST_CASE("adamw first step moves by the learning rate") {
  OptimConfig cfg;
  cfg.weight_decay = 0.0;
  std::vector<double> p{2.0}, g{1.0}, m{0.0}, v{0.0};
  adamw_update(p, g, m, v, 1, 0.01, cfg);
  // m_hat = v_hat = 1, so the step is lr / (1 + eps)
  CHECK(2.0 - p[0] == Approx(0.01 / (1.0 + 1e-8)).epsilon(1e-12));
  CHECK(std::abs((2.0 - p[0]) - 0.01) <= 1e-9);

  std::vector<double> q{2.0}, gn{-5.0}, m2{0.0}, v2{0.0};
  adamw_update(q, gn, m2, v2, 1, 0.01, cfg);
  CHECK(q[0] - 2.0 == Approx(0.01).epsilon(1e-7));
}

TEST_CASE("weight decay alone shrinks by (1 - lr * wd) per step") {
  OptimConfig cfg;
  cfg.weight_decay = 0.1;
  std::vector<double> p{3.0, -1.5}, g{0.0, 0.0}, m{0.0, 0.0}, v{0.0, 0.0};
  const double lr = 0.05;
  for (std::uint64_t step = 1; step <= 25; ++step) adamw_update(p, g, m, v, step, lr, cfg);
  CHECK(p[0] == Approx(3.0 * std::pow(1.0 - lr * 0.1, 25)).epsilon(1e-13));
  CHECK(p[1] == Approx(-1.5 * std::pow(1.0 - lr * 0.1, 25)).epsilon(1e-13));
}

TEST_CASE("adamw_step rejects non-finite gradients and names the group") {
  ModelConfig mc;
  auto p = init_params(mc);
  auto g = ModelParams::zeros(mc);
  g.key_bias[3] = NAN;
  auto state = OptimState::for_params(p);
  CHECK_THROWS_WITH(adamw_step(p, g, state, OptimConfig{}),
                    doctest::Contains("attention.key_bias"));
  CHECK(state.step == 0);
}

TEST_CASE("adamw trajectories are deterministic") {
  ModelConfig mc;
  mc.seed = 8;
  auto run = [&] {
    auto p = init_params(mc);
    auto state = OptimState::for_params(p);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    for (int i = 0; i < 20; ++i) {
      auto g = ModelParams::zeros(mc);
      for (auto& t : g.tensors()) {
        for (double& v : t.values) v = normal(rng);
      }
      state.epoch = static_cast<std::size_t>(i / 5);
      adamw_step(p, g, state, OptimConfig{});
    }
    return p;
  };
  CHECK(run().same_values(run()));
}

TEST_CASE("adamw minimizes a convex quadratic") {
  // f(x, y) = 0.5 * (4 x^2 + y^2) + x y / 2
  auto f = [](const std::vector<double>& p) {
    return 0.5 * (4.0 * p[0] * p[0] + p[1] * p[1]) + 0.5 * p[0] * p[1];
  };
  OptimConfig cfg;
  cfg.weight_decay = 0.0;
  std::vector<double> p{3.0, -2.0}, m(2, 0.0), v(2, 0.0);
  const double start = f(p);
  for (std::uint64_t step = 1; step <= 500; ++step) {
    const std::vector<double> g{4.0 * p[0] + 0.5 * p[1], p[1] + 0.5 * p[0]};
    adamw_update(p, g, m, v, step, 0.05, cfg);
  }
  CHECK(f(p) <= 0.01 * start);
}

TEST_CASE("transformer group uses the query-scaled rate when enabled") {
  OptimConfig cfg;
  cfg.base_lr = {1e-3, 2e-3};
  CHECK(cfg.initial_lr(ParamGroup::kEncoder) == 1e-3);
  CHECK(cfg.initial_lr(ParamGroup::kTransformer) == 2e-3);
  cfg.lr_scale_enabled = true;
  cfg.transformer_lr0 = 1e-5;
  cfg.batch_size = 32;
  cfg.scale_queries = 8;
  cfg.scale_model_dim = 16;
  CHECK(cfg.initial_lr(ParamGroup::kTransformer) == Approx(1e-5 * 32 * 8 / 4.0).epsilon(1e-15));
  CHECK(cfg.initial_lr(ParamGroup::kEncoder) == 1e-3);

  OptimConfig bad;
  bad.decay_rate = 0.0;
  CHECK_THROWS(bad.validate());
}
