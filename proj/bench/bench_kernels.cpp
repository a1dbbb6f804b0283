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

// Serial reference vs OpenMP kernels for the model's forward and backward
// passes at several batch sizes.
//
//   bench_kernels [iterations]

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <random>

#include "rhls/model.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_ms(int iterations, F&& fn) {
  const auto start = Clock::now();
  for (int i = 0; i < iterations; ++i) fn();
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count() / iterations;
}

double max_abs_diff(const rhls::ModelParams& a, const rhls::ModelParams& b) {
  double worst = 0.0;
  auto ta = a.tensors();
  auto tb = b.tensors();
  for (std::size_t i = 0; i < ta.size(); ++i) {
    for (std::size_t j = 0; j < ta[i].values.size(); ++j) {
      worst = std::max(worst, std::abs(ta[i].values[j] - tb[i].values[j]));
    }
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  const int iterations = argc > 1 ? std::atoi(argv[1]) : 20;
  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  rhls::ModelConfig config;
  config.seed = 3;
  const rhls::ModelParams params = rhls::init_params(config);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;

  std::cout << "threads " << threads << ", iterations " << iterations << "\n";
  std::cout << std::setw(7) << "batch" << std::setw(14) << "fwd serial" << std::setw(12)
            << "fwd omp" << std::setw(14) << "bwd serial" << std::setw(12) << "bwd omp"
            << std::setw(12) << "max diff" << "\n";
  for (std::size_t batch : {32, 256, 2048, 8192}) {
    rhls::Matrix x(batch, config.input_dim);
    for (double& v : x.data()) v = normal(rng);
    rhls::Matrix g(batch, config.task_count);
    for (double& v : g.data()) v = normal(rng);

    const double fs = time_ms(iterations, [&] { rhls::forward_serial(params, x); });
    const double fo = time_ms(iterations, [&] { rhls::forward(params, x); });
    const auto fwd = rhls::forward(params, x);
    const double bs =
        time_ms(iterations, [&] { rhls::backward_serial(params, fwd.cache, g); });
    const double bo = time_ms(iterations, [&] { rhls::backward(params, fwd.cache, g); });
    const double diff = max_abs_diff(rhls::backward_serial(params, fwd.cache, g),
                                     rhls::backward(params, fwd.cache, g));
    std::cout << std::setw(7) << batch << std::fixed << std::setprecision(3)
              << std::setw(12) << fs << "ms" << std::setw(10) << fo << "ms" << std::setw(12)
              << bs << "ms" << std::setw(10) << bo << "ms" << std::scientific
              << std::setprecision(1) << std::setw(12) << diff << "\n"
              << std::defaultfloat;
  }
  return 0;
}
