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
#include "oracles.hpp"
#include "rhls/loss.hpp"

using namespace rhls;
using doctest::Approx;

TEST_CASE("sigmoid is stable and symmetric") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(std::log(3.0)) == Approx(0.75).epsilon(1e-15));
  for (double z : {700.0, 800.0, -700.0, -800.0}) {
    const double p = sigmoid(z);
    CHECK(std::isfinite(p));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  CHECK(sigmoid(800.0) > 0.0);
  CHECK(sigmoid(2.5) + sigmoid(-2.5) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("bce_soft hand values") {
  CHECK(bce_soft(0.5, 0.5) == Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(bce_soft(0.5, 1.0) == Approx(0.69315).epsilon(1e-5));
  // -(0.95 ln 0.95 + 0.05 ln 0.05)
  CHECK(bce_soft(0.95, 0.95) == Approx(0.1985152433458726).epsilon(1e-13));
  // p = target is the minimum for a fixed soft target
  for (double p = 0.5; p < 0.9999; p += 0.001) {
    CHECK(bce_soft(p, 0.95) >= bce_soft(0.95, 0.95) - 1e-15);
  }
  // clamping keeps extreme probabilities finite
  CHECK(std::isfinite(bce_soft(0.0, 1.0)));
  CHECK(std::isfinite(bce_soft(1.0, 0.0)));
}

TEST_CASE("batch_loss reductions") {
  const Matrix zeros(3, 4, 0.0), halves(3, 4, 0.5);
  CHECK(batch_loss(zeros, halves, LossSpec::uniform(4)) == Approx(std::log(2.0)).epsilon(1e-14));

  const Matrix z1(1, 1, 0.3), y1(1, 1, 0.8);
  CHECK(batch_loss(z1, y1, LossSpec::uniform(1)) == Approx(bce_soft(sigmoid(0.3), 0.8)).epsilon(1e-15));

  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  Matrix z(5, 2), y(5, 2);
  for (double& v : z.data()) v = normal(rng);
  for (double& v : y.data()) v = unit(rng);
  const LossSpec spec{{0.25, 0.75}};
  double brute = 0.0;
  for (std::size_t b = 0; b < 5; ++b) {
    for (std::size_t t = 0; t < 2; ++t) {
      const double p = 1.0 / (1.0 + std::exp(-z(b, t)));
      brute += spec.weights[t] * -(y(b, t) * std::log(p) + (1 - y(b, t)) * std::log(1 - p)) / 5.0;
    }
  }
  CHECK(std::abs(batch_loss(z, y, spec) - brute) <= 1e-12);
}

TEST_CASE("batch_loss shape errors") {
  CHECK_THROWS(batch_loss(Matrix(2, 3), Matrix(2, 2), LossSpec::uniform(3)));
  CHECK_THROWS(batch_loss(Matrix(2, 3), Matrix(2, 3), LossSpec::uniform(2)));
  CHECK_THROWS(batch_loss_grad(Matrix(1, 3), Matrix(2, 3), LossSpec::uniform(3)));
}

TEST_CASE("batch_loss_grad hand values") {
  const LossSpec one = LossSpec::uniform(1);
  CHECK(batch_loss_grad(Matrix(1, 1, 0.0), Matrix(1, 1, 0.5), one)(0, 0) == 0.0);
  const double z = std::log(0.7 / 0.3);
  CHECK(batch_loss_grad(Matrix(1, 1, z), Matrix(1, 1, 1.0), one)(0, 0) ==
        Approx(-0.3).epsilon(1e-14));
}

TEST_CASE("property: gradient matches central differences") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::uniform_real_distribution<double> unit;
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t B = dim(rng), T = dim(rng);
    Matrix z(B, T), y(B, T);
    for (double& v : z.data()) v = normal(rng);
    for (double& v : y.data()) v = unit(rng);
    LossSpec spec{std::vector<double>(T)};
    double total = 0.0;
    for (double& w : spec.weights) total += (w = unit(rng) + 0.05);
    for (double& w : spec.weights) w /= total;

    const Matrix g = batch_loss_grad(z, y, spec);
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double fd = testing::central_difference([&] { return batch_loss(z, y, spec); },
                                                    z.data()[i], 1e-5);
      CHECK(testing::relative_error(g.data()[i], fd, 1e-8) <= 1e-6);
    }
  }
}

TEST_CASE("property: nonnegativity and per-logit convexity") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit;
  for (int trial = 0; trial < 50; ++trial) {
    const double y = trial % 5 == 0 ? 1.0 : unit(rng);
    const LossSpec spec = LossSpec::uniform(1);
    const double h = 0.05;
    for (double z = -10.0; z <= 10.0; z += 0.25) {
      auto at = [&](double v) { return batch_loss(Matrix(1, 1, v), Matrix(1, 1, y), spec); };
      CHECK(at(z) >= 0.0);
      CHECK(at(z + h) - 2.0 * at(z) + at(z - h) >= -1e-12);
    }
  }
}

TEST_CASE("uniform and frequency weighting agree for equal frequencies") {
  const auto freqs = make_frequencies(std::vector<double>{0.2, 0.2, 0.2});
  const auto u = LossSpec::make(TaskWeighting::kUniform, freqs);
  const auto f = LossSpec::make(TaskWeighting::kFrequency, freqs);
  for (std::size_t i = 0; i < 3; ++i) CHECK(u.weights[i] == Approx(f.weights[i]).epsilon(1e-15));
}
