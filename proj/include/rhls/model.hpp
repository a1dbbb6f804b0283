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

// Toy multi-task decoder: an affine encoder produces P feature tokens of
// width d, one learned query token per task cross-attends over them, and a
// per-task affine head turns the attended vector into a logit.
//
//   tokens  = reshape(x W_enc + b_enc, P x d)
//   Q = queries W_q + b_q      K = tokens W_k + b_k      V = tokens W_v + b_v
//   A = softmax_rows(Q K^T / sqrt(d))
//   logit_t = (A V)_t . w_head_t + b_head_t
//
// Weight matrices are stored row-major as (fan_in x fan_out).

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rhls/matrix.hpp"

namespace rhls {

struct ModelConfig {
  std::size_t input_dim = 32;
  std::size_t token_count = 8;
  std::size_t model_dim = 16;
  std::size_t task_count = 8;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

/// Learning-rate groups: the encoder, and everything downstream of it.
enum class ParamGroup { kEncoder = 0, kTransformer = 1 };

struct ParamView {
  std::string_view name;
  std::span<double> values;
  std::vector<std::size_t> shape;
  ParamGroup group;
};

struct ConstParamView {
  std::string_view name;
  std::span<const double> values;
  std::vector<std::size_t> shape;
  ParamGroup group;
};

struct ModelParams {
  ModelConfig config;
  std::vector<double> encoder_weight;  // D x (P*d)
  std::vector<double> encoder_bias;    // P*d
  std::vector<double> task_queries;    // T x d
  std::vector<double> query_weight;    // d x d
  std::vector<double> query_bias;      // d
  std::vector<double> key_weight;      // d x d
  std::vector<double> key_bias;        // d
  std::vector<double> value_weight;    // d x d
  std::vector<double> value_bias;      // d
  std::vector<double> head_weight;     // T x d
  std::vector<double> head_bias;       // T

  /// Bumped whenever the values are modified in place by an optimizer step.
  std::uint64_t version = 0;

  /// All-zero parameters with the shapes implied by `config`.
  static ModelParams zeros(const ModelConfig& config);

  std::vector<ParamView> tensors();
  std::vector<ConstParamView> tensors() const;
  std::size_t parameter_count() const;

  void set_zero();
  bool same_values(const ModelParams& other) const;
};

ModelParams init_params(const ModelConfig& config);

/// Activations recorded by forward() and consumed by backward().
struct ForwardCache {
  const ModelParams* params = nullptr;
  std::uint64_t params_version = 0;
  std::size_t batch = 0;
  Matrix input;                 // B x D
  std::vector<double> queries;  // T x d, shared across the batch
  std::vector<double> tokens;   // B x P x d
  std::vector<double> keys;     // B x P x d
  std::vector<double> values;   // B x P x d
  std::vector<double> attention;  // B x T x P
  std::vector<double> attended;   // B x T x d
};

struct ForwardResult {
  Matrix logits;  // B x T
  ForwardCache cache;
};

/// Batch forward pass, rows distributed over OpenMP threads.
ForwardResult forward(const ModelParams& params, const Matrix& x);

/// Single-threaded reference of forward().
ForwardResult forward_serial(const ModelParams& params, const Matrix& x);

/// Parameter gradients of sum_{b,t} grad_logits(b,t) * logit(b,t).
/// Returned as a ModelParams holding gradients in every tensor.
ModelParams backward(const ModelParams& params, const ForwardCache& cache,
                     const Matrix& grad_logits);

/// Single-threaded reference of backward().
ModelParams backward_serial(const ModelParams& params, const ForwardCache& cache,
                            const Matrix& grad_logits);

/// Sigmoid probabilities, evaluated in chunks without keeping a cache.
Matrix predict(const ModelParams& params, const Matrix& x);

// Checkpoint text format (one record per line):
//   rhls-checkpoint 1
//   config <input_dim> <token_count> <model_dim> <task_count> <seed>
//   tensor <name> <rank> <dim0> ... <dimN> <v0> <v1> ...
//   end
// Values use the shortest round-trip decimal representation.
void save_checkpoint(const ModelParams& params, std::ostream& out);
ModelParams load_checkpoint(std::istream& in);
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace rhls
