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

#include "rhls/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rhls/text.hpp"

namespace rhls {
namespace {

using Getter = std::function<std::string(const ExperimentConfig&)>;
using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

struct Field {
  const char* key;
  Getter get;
  Setter set;
};

double to_double(std::string_view s) {
  auto v = parse_double(s);
  if (!v) throw std::invalid_argument("expected a number, got '" + std::string(s) + "'");
  return *v;
}

std::uint64_t to_uint(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected a nonnegative integer, got '" + std::string(s) + "'");
  }
  return v;
}

bool to_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("expected true/false, got '" + std::string(s) + "'");
}

std::vector<double> to_list(std::string_view s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (const auto& item : split(s, ',')) out.push_back(to_double(item));
  return out;
}

std::string from_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

template <typename E>
E to_enum(std::string_view s, std::initializer_list<std::pair<const char*, E>> names) {
  s = trim(s);
  std::string allowed;
  for (const auto& [name, value] : names) {
    if (s == name) return value;
    allowed += allowed.empty() ? name : std::string("|") + name;
  }
  throw std::invalid_argument("expected one of " + allowed + ", got '" + std::string(s) + "'");
}

template <typename E>
std::string from_enum(E e, std::initializer_list<std::pair<const char*, E>> names) {
  for (const auto& [name, value] : names) {
    if (value == e) return name;
  }
  return "?";
}

#define RHLS_SIZE(KEY, MEMBER)                                               \
  Field{KEY, [](const ExperimentConfig& c) { return std::to_string(c.MEMBER); }, \
        [](ExperimentConfig& c, std::string_view s) { c.MEMBER = to_uint(s); }}
#define RHLS_REAL(KEY, MEMBER)                                                 \
  Field{KEY, [](const ExperimentConfig& c) { return format_double(c.MEMBER); }, \
        [](ExperimentConfig& c, std::string_view s) { c.MEMBER = to_double(s); }}
#define RHLS_LIST(KEY, MEMBER)                                             \
  Field{KEY, [](const ExperimentConfig& c) { return from_list(c.MEMBER); }, \
        [](ExperimentConfig& c, std::string_view s) { c.MEMBER = to_list(s); }}

const std::initializer_list<std::pair<const char*, DataSource>> kSources = {
    {"synthetic", DataSource::kSynthetic}, {"csv", DataSource::kCsv}};
const std::initializer_list<std::pair<const char*, LabelEncoding>> kEncodings = {
    {"binary", LabelEncoding::kBinary}, {"intensity", LabelEncoding::kIntensity}};
const std::initializer_list<std::pair<const char*, SmoothingKind>> kSmoothings = {
    {"none", SmoothingKind::kNone},
    {"vanilla", SmoothingKind::kVanilla},
    {"two_sided", SmoothingKind::kTwoSided},
    {"rhls", SmoothingKind::kRhls}};
const std::initializer_list<std::pair<const char*, TaskWeighting>> kWeightings = {
    {"uniform", TaskWeighting::kUniform}, {"frequency", TaskWeighting::kFrequency}};
const std::initializer_list<std::pair<const char*, EvalLabels>> kEvalLabels = {
    {"observed", EvalLabels::kObserved}, {"clean", EvalLabels::kClean}};

#define RHLS_ENUM(KEY, MEMBER, TABLE)                                              \
  Field{KEY, [](const ExperimentConfig& c) { return from_enum(c.MEMBER, TABLE); }, \
        [](ExperimentConfig& c, std::string_view s) { c.MEMBER = to_enum(s, TABLE); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      RHLS_SIZE("seed", seed),
      Field{"out", [](const ExperimentConfig& c) { return c.out_dir; },
            [](ExperimentConfig& c, std::string_view s) { c.out_dir = std::string(trim(s)); }},
      RHLS_ENUM("data.source", source, kSources),
      Field{"data.csv_path", [](const ExperimentConfig& c) { return c.csv_path; },
            [](ExperimentConfig& c, std::string_view s) { c.csv_path = std::string(trim(s)); }},
      RHLS_ENUM("data.csv_labels", csv_labels, kEncodings),
      RHLS_SIZE("synth.subjects", synth.subject_count),
      RHLS_SIZE("synth.frames_per_subject", synth.frames_per_subject),
      RHLS_SIZE("synth.input_dim", synth.input_dim),
      RHLS_LIST("synth.frequencies", synth.frequencies),
      RHLS_REAL("synth.fn_rate", synth.fn_rate),
      RHLS_REAL("synth.fp_rate", synth.fp_rate),
      RHLS_REAL("synth.task_correlation", synth.task_correlation),
      RHLS_SIZE("synth.latent_dim", synth.latent_dim),
      RHLS_REAL("synth.feature_noise", synth.feature_noise),
      RHLS_REAL("synth.subject_spread", synth.subject_spread),
      RHLS_REAL("synth.subject_shift", synth.subject_shift),
      RHLS_ENUM("smoothing.kind", smoothing, kSmoothings),
      RHLS_REAL("smoothing.alpha", alpha),
      RHLS_REAL("smoothing.beta", beta),
      RHLS_LIST("smoothing.lambda_pos", lambda_pos),
      RHLS_LIST("smoothing.lambda_neg", lambda_neg),
      RHLS_ENUM("loss.weighting", weighting, kWeightings),
      RHLS_SIZE("model.tokens", tokens),
      RHLS_SIZE("model.dim", model_dim),
      RHLS_REAL("optim.lr_encoder", optim.base_lr[0]),
      RHLS_REAL("optim.lr_transformer", optim.base_lr[1]),
      RHLS_REAL("optim.beta1", optim.beta1),
      RHLS_REAL("optim.beta2", optim.beta2),
      RHLS_REAL("optim.eps", optim.eps),
      RHLS_REAL("optim.weight_decay", optim.weight_decay),
      RHLS_REAL("optim.decay_rate", optim.decay_rate),
      RHLS_SIZE("optim.epochs", optim.epochs),
      RHLS_SIZE("optim.batch_size", optim.batch_size),
      Field{"optim.lr_scale",
            [](const ExperimentConfig& c) { return std::string(c.optim.lr_scale_enabled ? "true" : "false"); },
            [](ExperimentConfig& c, std::string_view s) { c.optim.lr_scale_enabled = to_bool(s); }},
      RHLS_REAL("optim.transformer_lr0", optim.transformer_lr0),
      RHLS_SIZE("protocol.folds", folds),
      RHLS_SIZE("protocol.val_folds", val_folds),
      RHLS_SIZE("protocol.repeats", repeats),
      RHLS_ENUM("eval.labels", eval_labels, kEvalLabels),
      RHLS_LIST("sweep.betas", sweep_betas),
      RHLS_REAL("ablate.alpha", ablate_alpha),
      RHLS_REAL("ablate.beta", ablate_beta),
  };
  return table;
}

#undef RHLS_SIZE
#undef RHLS_REAL
#undef RHLS_LIST
#undef RHLS_ENUM

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  }
}

}  // namespace

SmoothingSpec ExperimentConfig::smoothing_spec() const {
  switch (smoothing) {
    case SmoothingKind::kNone: return NoSmoothing{};
    case SmoothingKind::kVanilla: return VanillaSmoothing{alpha};
    case SmoothingKind::kTwoSided: return TwoSidedSmoothing{lambda_pos, lambda_neg};
    case SmoothingKind::kRhls: return RhlsSmoothing{beta};
  }
  return NoSmoothing{};
}

void ExperimentConfig::validate() const {
  if (source == DataSource::kSynthetic) {
    synth.validate();
  } else if (csv_path.empty()) {
    throw std::invalid_argument("data.csv_path is required when data.source = csv");
  }
  check_unit(alpha, "smoothing.alpha");
  check_unit(beta, "smoothing.beta");
  check_unit(ablate_alpha, "ablate.alpha");
  check_unit(ablate_beta, "ablate.beta");
  for (double b : sweep_betas) check_unit(b, "sweep.betas");
  if (smoothing == SmoothingKind::kTwoSided) {
    if (lambda_pos.size() != lambda_neg.size() || lambda_pos.empty()) {
      throw std::invalid_argument("smoothing.lambda_pos and lambda_neg need one value per task");
    }
    for (double v : lambda_pos) check_unit(v, "smoothing.lambda_pos");
    for (double v : lambda_neg) check_unit(v, "smoothing.lambda_neg");
  }
  if (tokens == 0 || model_dim == 0) throw std::invalid_argument("model sizes must be positive");
  optim.validate();
  if (folds < 2) throw std::invalid_argument("protocol.folds must be at least 2");
  if (val_folds < 2) throw std::invalid_argument("protocol.val_folds must be at least 2");
  if (repeats == 0) throw std::invalid_argument("protocol.repeats must be at least 1");
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(*this);
    out += '\n';
  }
  return out;
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  std::map<std::string_view, const Field*> index;
  for (const auto& f : fields()) index.emplace(f.key, &f);
  ExperimentConfig c;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    const std::string key(trim(body.substr(0, eq)));
    const auto it = index.find(key);
    if (it == index.end()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": duplicate key '" + key + "'");
    }
    try {
      it->second->set(c, body.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + " (" + key +
                                  "): " + e.what());
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return parse(in);
}

std::vector<std::string> config_diff(const ExperimentConfig& a, const ExperimentConfig& b) {
  std::vector<std::string> keys;
  for (const auto& f : fields()) {
    if (f.get(a) != f.get(b)) keys.emplace_back(f.key);
  }
  return keys;
}

}  // namespace rhls
