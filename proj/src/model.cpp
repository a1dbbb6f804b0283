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

#include "rhls/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rhls/loss.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rhls {
namespace {

struct Dims {
  std::size_t D, P, d, T;
  explicit Dims(const ModelConfig& c)
      : D(c.input_dim), P(c.token_count), d(c.model_dim), T(c.task_count) {}
  std::size_t width() const { return P * d; }
};

// out[n] = bias[n] + sum_k in[k] * w[k * n_out + n]
inline void affine(const double* in, std::size_t n_in, const double* w,
                   const double* bias, std::size_t n_out, double* out) {
  std::copy(bias, bias + n_out, out);
  for (std::size_t k = 0; k < n_in; ++k) {
    const double a = in[k];
    const double* wr = w + k * n_out;
    for (std::size_t n = 0; n < n_out; ++n) out[n] += a * wr[n];
  }
}

void compute_queries(const ModelParams& p, const Dims& dm, double* q) {
  for (std::size_t t = 0; t < dm.T; ++t) {
    affine(p.task_queries.data() + t * dm.d, dm.d, p.query_weight.data(),
           p.query_bias.data(), dm.d, q + t * dm.d);
  }
}

// One example through encoder, attention and heads.
void forward_row(const ModelParams& p, const Dims& dm, const double* x,
                 const double* q, double* h, double* k, double* v, double* a,
                 double* o, double* logits) {
  const std::size_t d = dm.d;
  affine(x, dm.D, p.encoder_weight.data(), p.encoder_bias.data(), dm.width(), h);
  for (std::size_t j = 0; j < dm.P; ++j) {
    affine(h + j * d, d, p.key_weight.data(), p.key_bias.data(), d, k + j * d);
    affine(h + j * d, d, p.value_weight.data(), p.value_bias.data(), d, v + j * d);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t t = 0; t < dm.T; ++t) {
    double* arow = a + t * dm.P;
    const double* qt = q + t * d;
    double peak = -INFINITY;
    for (std::size_t j = 0; j < dm.P; ++j) {
      double s = 0.0;
      const double* kj = k + j * d;
      for (std::size_t c = 0; c < d; ++c) s += qt[c] * kj[c];
      arow[j] = s * scale;
      peak = std::max(peak, arow[j]);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < dm.P; ++j) {
      arow[j] = std::exp(arow[j] - peak);
      total += arow[j];
    }
    for (std::size_t j = 0; j < dm.P; ++j) arow[j] /= total;

    double* ot = o + t * d;
    std::fill(ot, ot + d, 0.0);
    for (std::size_t j = 0; j < dm.P; ++j) {
      const double w = arow[j];
      const double* vj = v + j * d;
      for (std::size_t c = 0; c < d; ++c) ot[c] += w * vj[c];
    }
    const double* wh = p.head_weight.data() + t * d;
    double z = p.head_bias[t];
    for (std::size_t c = 0; c < d; ++c) z += ot[c] * wh[c];
    logits[t] = z;
  }
}

struct RowScratch {
  std::vector<double> d_attended, d_attention, d_keys, d_values, d_tokens;
  explicit RowScratch(const Dims& dm)
      : d_attended(dm.T * dm.d),
        d_attention(dm.T * dm.P),
        d_keys(dm.P * dm.d),
        d_values(dm.P * dm.d),
        d_tokens(dm.width()) {}
};

// Accumulates the gradient contribution of row `b` into `g`; the query-side
// gradient is accumulated into `d_queries` (T x d) and expanded once per batch.
void backward_row(const ModelParams& p, const Dims& dm, const ForwardCache& cache,
                  std::size_t b, std::span<const double> grad, ModelParams& g,
                  double* d_queries, RowScratch& s) {
  const std::size_t d = dm.d, P = dm.P, T = dm.T;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  const double* x = cache.input.row(b).data();
  const double* h = cache.tokens.data() + b * P * d;
  const double* k = cache.keys.data() + b * P * d;
  const double* v = cache.values.data() + b * P * d;
  const double* a = cache.attention.data() + b * T * P;
  const double* o = cache.attended.data() + b * T * d;
  const double* q = cache.queries.data();

  std::fill(s.d_keys.begin(), s.d_keys.end(), 0.0);
  std::fill(s.d_values.begin(), s.d_values.end(), 0.0);

  for (std::size_t t = 0; t < T; ++t) {
    const double gt = grad[t];
    const double* wh = p.head_weight.data() + t * d;
    const double* ot = o + t * d;
    double* dwh = g.head_weight.data() + t * d;
    double* dot = s.d_attended.data() + t * d;
    g.head_bias[t] += gt;
    for (std::size_t c = 0; c < d; ++c) {
      dwh[c] += gt * ot[c];
      dot[c] = gt * wh[c];
    }
    const double* at = a + t * P;
    double* dat = s.d_attention.data() + t * P;
    double weighted = 0.0;
    for (std::size_t j = 0; j < P; ++j) {
      const double* vj = v + j * d;
      double* dvj = s.d_values.data() + j * d;
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        acc += dot[c] * vj[c];
        dvj[c] += at[j] * dot[c];
      }
      dat[j] = acc;
      weighted += at[j] * acc;
    }
    // softmax Jacobian, then the 1/sqrt(d) score scale
    const double* qt = q + t * d;
    double* dqt = d_queries + t * d;
    for (std::size_t j = 0; j < P; ++j) {
      const double ds = at[j] * (dat[j] - weighted) * scale;
      const double* kj = k + j * d;
      double* dkj = s.d_keys.data() + j * d;
      for (std::size_t c = 0; c < d; ++c) {
        dqt[c] += ds * kj[c];
        dkj[c] += ds * qt[c];
      }
    }
  }

  std::fill(s.d_tokens.begin(), s.d_tokens.end(), 0.0);
  for (std::size_t j = 0; j < P; ++j) {
    const double* hj = h + j * d;
    const double* dkj = s.d_keys.data() + j * d;
    const double* dvj = s.d_values.data() + j * d;
    double* dhj = s.d_tokens.data() + j * d;
    for (std::size_t l = 0; l < d; ++l) {
      double* dwk = g.key_weight.data() + l * d;
      double* dwv = g.value_weight.data() + l * d;
      const double* wk = p.key_weight.data() + l * d;
      const double* wv = p.value_weight.data() + l * d;
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        dwk[c] += hj[l] * dkj[c];
        dwv[c] += hj[l] * dvj[c];
        acc += dkj[c] * wk[c] + dvj[c] * wv[c];
      }
      dhj[l] = acc;
    }
    for (std::size_t c = 0; c < d; ++c) {
      g.key_bias[c] += dkj[c];
      g.value_bias[c] += dvj[c];
    }
  }

  const std::size_t width = dm.width();
  for (std::size_t i = 0; i < dm.D; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    double* dw = g.encoder_weight.data() + i * width;
    for (std::size_t c = 0; c < width; ++c) dw[c] += xi * s.d_tokens[c];
  }
  for (std::size_t c = 0; c < width; ++c) g.encoder_bias[c] += s.d_tokens[c];
}

// Expands the accumulated query gradient into task_queries, W_q and b_q.
void finish_query_grad(const ModelParams& p, const Dims& dm, const double* d_queries,
                       ModelParams& g) {
  const std::size_t d = dm.d;
  for (std::size_t t = 0; t < dm.T; ++t) {
    const double* dq = d_queries + t * d;
    const double* qtok = p.task_queries.data() + t * d;
    double* dqtok = g.task_queries.data() + t * d;
    for (std::size_t l = 0; l < d; ++l) {
      const double* wq = p.query_weight.data() + l * d;
      double* dwq = g.query_weight.data() + l * d;
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        dwq[c] += qtok[l] * dq[c];
        acc += dq[c] * wq[c];
      }
      dqtok[l] += acc;
    }
    for (std::size_t c = 0; c < d; ++c) g.query_bias[c] += dq[c];
  }
}

void check_input(const ModelParams& p, const Matrix& x) {
  if (x.cols() != p.config.input_dim) {
    throw std::invalid_argument("model input has width " + std::to_string(x.cols()) +
                                ", expected " + std::to_string(p.config.input_dim));
  }
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("model input is not finite");
  }
}

ForwardResult make_forward(const ModelParams& p, const Matrix& x, bool parallel) {
  check_input(p, x);
  const Dims dm(p.config);
  const std::size_t B = x.rows();
  ForwardResult r;
  r.logits = Matrix(B, dm.T);
  ForwardCache& c = r.cache;
  c.params = &p;
  c.params_version = p.version;
  c.batch = B;
  c.input = x;
  c.queries.resize(dm.T * dm.d);
  c.tokens.resize(B * dm.width());
  c.keys.resize(B * dm.width());
  c.values.resize(B * dm.width());
  c.attention.resize(B * dm.T * dm.P);
  c.attended.resize(B * dm.T * dm.d);
  compute_queries(p, dm, c.queries.data());

  const auto n = static_cast<std::int64_t>(B);
#pragma omp parallel for schedule(static) if (parallel && n > 64)
  for (std::int64_t b = 0; b < n; ++b) {
    const auto u = static_cast<std::size_t>(b);
    forward_row(p, dm, x.row(u).data(), c.queries.data(),
                c.tokens.data() + u * dm.width(), c.keys.data() + u * dm.width(),
                c.values.data() + u * dm.width(),
                c.attention.data() + u * dm.T * dm.P,
                c.attended.data() + u * dm.T * dm.d, r.logits.row(u).data());
  }
  return r;
}

void check_cache(const ModelParams& p, const ForwardCache& cache,
                 const Matrix& grad_logits) {
  if (cache.params != &p || cache.params_version != p.version) {
    throw std::invalid_argument("stale forward cache: parameters changed since forward");
  }
  if (grad_logits.rows() != cache.batch || grad_logits.cols() != p.config.task_count) {
    throw std::invalid_argument("grad_logits shape does not match forward cache");
  }
}

void add_into(ModelParams& dst, const ModelParams& src) {
  auto a = dst.tensors();
  auto b = src.tensors();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].values.size(); ++j) a[i].values[j] += b[i].values[j];
  }
}

template <typename T>
std::vector<T> tensor_list(ModelParams& p) {
  const Dims dm(p.config);
  using E = ParamGroup;
  return {
      {"encoder.weight", p.encoder_weight, {dm.D, dm.width()}, E::kEncoder},
      {"encoder.bias", p.encoder_bias, {dm.width()}, E::kEncoder},
      {"attention.task_queries", p.task_queries, {dm.T, dm.d}, E::kTransformer},
      {"attention.query_weight", p.query_weight, {dm.d, dm.d}, E::kTransformer},
      {"attention.query_bias", p.query_bias, {dm.d}, E::kTransformer},
      {"attention.key_weight", p.key_weight, {dm.d, dm.d}, E::kTransformer},
      {"attention.key_bias", p.key_bias, {dm.d}, E::kTransformer},
      {"attention.value_weight", p.value_weight, {dm.d, dm.d}, E::kTransformer},
      {"attention.value_bias", p.value_bias, {dm.d}, E::kTransformer},
      {"head.weight", p.head_weight, {dm.T, dm.d}, E::kTransformer},
      {"head.bias", p.head_bias, {dm.T}, E::kTransformer},
  };
}

}  // namespace

void ModelConfig::validate() const {
  if (input_dim == 0 || token_count == 0 || model_dim == 0 || task_count == 0) {
    throw std::invalid_argument("model dimensions must all be at least 1");
  }
}

ModelParams ModelParams::zeros(const ModelConfig& config) {
  config.validate();
  const Dims dm(config);
  ModelParams p;
  p.config = config;
  p.encoder_weight.assign(dm.D * dm.width(), 0.0);
  p.encoder_bias.assign(dm.width(), 0.0);
  p.task_queries.assign(dm.T * dm.d, 0.0);
  p.query_weight.assign(dm.d * dm.d, 0.0);
  p.query_bias.assign(dm.d, 0.0);
  p.key_weight.assign(dm.d * dm.d, 0.0);
  p.key_bias.assign(dm.d, 0.0);
  p.value_weight.assign(dm.d * dm.d, 0.0);
  p.value_bias.assign(dm.d, 0.0);
  p.head_weight.assign(dm.T * dm.d, 0.0);
  p.head_bias.assign(dm.T, 0.0);
  return p;
}

std::vector<ParamView> ModelParams::tensors() { return tensor_list<ParamView>(*this); }

std::vector<ConstParamView> ModelParams::tensors() const {
  std::vector<ConstParamView> out;
  for (auto& v : tensor_list<ParamView>(const_cast<ModelParams&>(*this))) {
    out.push_back({v.name, v.values, v.shape, v.group});
  }
  return out;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += t.values.size();
  return n;
}

void ModelParams::set_zero() {
  for (auto& t : tensors()) std::fill(t.values.begin(), t.values.end(), 0.0);
}

bool ModelParams::same_values(const ModelParams& other) const {
  if (!(config == other.config)) return false;
  auto a = tensors();
  auto b = other.tensors();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::equal(a[i].values.begin(), a[i].values.end(), b[i].values.begin(),
                    b[i].values.end())) {
      return false;
    }
  }
  return true;
}

ModelParams init_params(const ModelConfig& config) {
  ModelParams p = ModelParams::zeros(config);
  std::mt19937_64 rng(config.seed);
  auto fill = [&rng](std::vector<double>& w, std::size_t fan_in) {
    std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(fan_in)));
    for (double& v : w) v = dist(rng);
  };
  fill(p.encoder_weight, config.input_dim);
  fill(p.task_queries, config.model_dim);
  fill(p.query_weight, config.model_dim);
  fill(p.key_weight, config.model_dim);
  fill(p.value_weight, config.model_dim);
  fill(p.head_weight, config.model_dim);
  return p;
}

ForwardResult forward(const ModelParams& params, const Matrix& x) {
  return make_forward(params, x, true);
}

ForwardResult forward_serial(const ModelParams& params, const Matrix& x) {
  return make_forward(params, x, false);
}

ModelParams backward_serial(const ModelParams& params, const ForwardCache& cache,
                            const Matrix& grad_logits) {
  check_cache(params, cache, grad_logits);
  const Dims dm(params.config);
  ModelParams g = ModelParams::zeros(params.config);
  std::vector<double> d_queries(dm.T * dm.d, 0.0);
  RowScratch scratch(dm);
  for (std::size_t b = 0; b < cache.batch; ++b) {
    backward_row(params, dm, cache, b, grad_logits.row(b), g, d_queries.data(), scratch);
  }
  finish_query_grad(params, dm, d_queries.data(), g);
  return g;
}

ModelParams backward(const ModelParams& params, const ForwardCache& cache,
                     const Matrix& grad_logits) {
#ifdef _OPENMP
  check_cache(params, cache, grad_logits);
  const int threads = omp_in_parallel() ? 1 : omp_get_max_threads();
  if (threads <= 1 || cache.batch <= 64) {
    return backward_serial(params, cache, grad_logits);
  }
  const Dims dm(params.config);
  // Per-thread partial gradients, reduced in thread order for reproducibility.
  std::vector<ModelParams> partial(threads, ModelParams::zeros(params.config));
  std::vector<std::vector<double>> d_queries(threads,
                                             std::vector<double>(dm.T * dm.d, 0.0));
  const auto n = static_cast<std::int64_t>(cache.batch);
#pragma omp parallel num_threads(threads)
  {
    const int tid = omp_get_thread_num();
    RowScratch scratch(dm);
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < n; ++b) {
      const auto u = static_cast<std::size_t>(b);
      backward_row(params, dm, cache, u, grad_logits.row(u), partial[tid],
                   d_queries[tid].data(), scratch);
    }
  }
  for (int t = 1; t < threads; ++t) {
    add_into(partial[0], partial[t]);
    for (std::size_t i = 0; i < d_queries[0].size(); ++i) d_queries[0][i] += d_queries[t][i];
  }
  finish_query_grad(params, dm, d_queries[0].data(), partial[0]);
  return std::move(partial[0]);
#else
  return backward_serial(params, cache, grad_logits);
#endif
}

Matrix predict(const ModelParams& params, const Matrix& x) {
  check_input(params, x);
  const Dims dm(params.config);
  Matrix probs(x.rows(), dm.T);
  std::vector<double> q(dm.T * dm.d);
  compute_queries(params, dm, q.data());
  const auto n = static_cast<std::int64_t>(x.rows());
#pragma omp parallel if (n > 256)
  {
    std::vector<double> h(dm.width()), k(dm.width()), v(dm.width());
    std::vector<double> a(dm.T * dm.P), o(dm.T * dm.d);
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < n; ++b) {
      const auto u = static_cast<std::size_t>(b);
      auto out = probs.row(u);
      forward_row(params, dm, x.row(u).data(), q.data(), h.data(), k.data(), v.data(),
                  a.data(), o.data(), out.data());
      for (double& z : out) z = sigmoid(z);
    }
  }
  return probs;
}

void save_checkpoint(const ModelParams& params, std::ostream& out) {
  const auto& c = params.config;
  out << "rhls-checkpoint 1\n";
  out << "config " << c.input_dim << ' ' << c.token_count << ' ' << c.model_dim << ' '
      << c.task_count << ' ' << c.seed << '\n';
  char buf[32];
  for (const auto& t : params.tensors()) {
    out << "tensor " << t.name << ' ' << t.shape.size();
    for (auto s : t.shape) out << ' ' << s;
    for (double v : t.values) {
      auto res = std::to_chars(buf, buf + sizeof(buf), v);
      out << ' ' << std::string_view(buf, res.ptr - buf);
    }
    out << '\n';
  }
  out << "end\n";
}

ModelParams load_checkpoint(std::istream& in) {
  std::string magic;
  int format = 0;
  in >> magic >> format;
  if (magic != "rhls-checkpoint" || format != 1) {
    throw std::runtime_error("not an rhls checkpoint (format 1)");
  }
  std::string key;
  ModelConfig config;
  in >> key >> config.input_dim >> config.token_count >> config.model_dim >>
      config.task_count >> config.seed;
  if (!in || key != "config") throw std::runtime_error("checkpoint: bad config line");
  ModelParams p = ModelParams::zeros(config);
  for (auto& t : p.tensors()) {
    std::string name;
    std::size_t rank = 0;
    in >> key >> name >> rank;
    if (!in || key != "tensor" || name != t.name) {
      throw std::runtime_error("checkpoint: expected tensor " + std::string(t.name));
    }
    std::vector<std::size_t> shape(rank);
    for (auto& s : shape) in >> s;
    if (shape != t.shape) {
      throw std::runtime_error("checkpoint: shape mismatch for " + name);
    }
    std::string token;
    for (double& v : t.values) {
      in >> token;
      auto res = std::from_chars(token.data(), token.data() + token.size(), v);
      if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw std::runtime_error("checkpoint: bad value '" + token + "' in " + name);
      }
    }
  }
  in >> key;
  if (key != "end") throw std::runtime_error("checkpoint: missing end marker");
  return p;
}

void save_checkpoint(const ModelParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  save_checkpoint(params, out);
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path);
  return load_checkpoint(in);
}

}  // namespace rhls
