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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "rhls/commands.hpp"
#include "rhls/loss.hpp"
#include "rhls/smoothing.hpp"

using namespace rhls;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// One column with exactly `positives` ones, shuffled.
Matrix column_with(std::mt19937_64& rng, std::size_t rows, std::size_t positives) {
  std::vector<double> v(rows, 0.0);
  std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(positives), 1.0);
  std::shuffle(v.begin(), v.end(), rng);
  return Matrix(rows, 1, std::move(v));
}

Outcome analytic_identities() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> count(1, 999);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_product = 0.0, worst_mean = 0.0, worst_half = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto labels = LabelMatrix::hard(column_with(rng, 1000, count(rng)));
    const auto freqs = compute_frequencies(labels);
    const double f = freqs.f[0];
    const double beta = i == 0 ? 0.0 : i == 1 ? 1.0 : unit(rng);
    const auto lam = rhls_lambdas(freqs, beta);
    worst_product = std::max(worst_product, std::abs(lam.lambda_pos[0] * lam.lambda_neg[0]));
    const double mean = rhls_smooth(labels, freqs, beta).column_mean(0);
    worst_mean = std::max(worst_mean, std::abs(mean - (f + beta * (0.5 - f))));
    const double half = rhls_smooth(labels, freqs, 1.0).column_mean(0);
    worst_half = std::max(worst_half, std::abs(half - 0.5));
  }
  return {worst_product == 0.0 && worst_mean <= 1e-12 && worst_half <= 1e-12,
          "max |l+ * l-| = " + fmt(worst_product) + ", max mean error = " + fmt(worst_mean) +
              ", max |mean - 0.5| at beta 1 = " + fmt(worst_half)};
}

Outcome reduction_identity() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> dim(1, 40);
  int mismatched = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t rows = dim(rng), tasks = dim(rng) % 12 + 1;
    const auto labels = LabelMatrix::hard(testing::random_hard(rng, rows, tasks, unit(rng)));
    const double alpha = unit(rng);
    const std::vector<double> lam(tasks, alpha);
    if (!(two_sided_smooth(labels, lam, lam).values() == vanilla_smooth(labels, alpha).values())) {
      ++mismatched;
    }
  }
  return {mismatched == 0, std::to_string(mismatched) + " of 100 matrices differ"};
}

Outcome minority_preservation() {
  std::mt19937_64 rng(303);
  const std::size_t rows = 10000;
  const std::vector<double> targets{0.05, 0.1, 0.3};
  Matrix m(rows, targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const auto col = column_with(rng, rows, static_cast<std::size_t>(targets[t] * rows));
    for (std::size_t r = 0; r < rows; ++r) m(r, t) = col(r, 0);
  }
  const auto labels = LabelMatrix::hard(m);
  const auto freqs = compute_frequencies(labels);
  std::size_t checked = 0, changed = 0;
  for (double beta : {0.25, 0.5, 1.0}) {
    const auto out = rhls_smooth(labels, freqs, beta);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t t = 0; t < targets.size(); ++t) {
        if (labels(r, t) != 1.0) continue;
        ++checked;
        if (out(r, t) != 1.0) ++changed;
      }
    }
  }
  return {changed == 0 && checked > 0,
          std::to_string(changed) + " of " + std::to_string(checked) + " positives changed"};
}

Outcome gradient_correctness() {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<std::size_t> dim(2, 5);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  double worst = 0.0;
  std::string where;
  for (int instance = 0; instance < 20; ++instance) {
    ModelConfig mc;
    mc.input_dim = dim(rng);
    mc.token_count = dim(rng);
    mc.model_dim = dim(rng);
    mc.task_count = dim(rng);
    mc.seed = 500 + instance;
    auto params = init_params(mc);
    for (auto& t : params.tensors()) {
      for (double& v : t.values) v += 0.2 * normal(rng);
    }
    const std::size_t batch = dim(rng);
    Matrix x(batch, mc.input_dim), y(batch, mc.task_count);
    for (double& v : x.data()) v = normal(rng);
    for (double& v : y.data()) v = unit(rng);
    std::vector<double> f(mc.task_count);
    for (double& v : f) v = unit(rng);
    const LossSpec loss = LossSpec::frequency(make_frequencies(f));

    const auto fwd = forward(params, x);
    const auto grads = backward(params, fwd.cache, batch_loss_grad(fwd.logits, y, loss));
    auto views = params.tensors();
    const auto gviews = grads.tensors();
    for (std::size_t i = 0; i < views.size(); ++i) {
      for (std::size_t j = 0; j < views[i].values.size(); ++j) {
        const double fd = testing::central_difference(
            [&] { return batch_loss(forward_serial(params, x).logits, y, loss); },
            views[i].values[j], 1e-4);
        const double err = testing::relative_error(gviews[i].values[j], fd, 1e-6);
        if (err > worst) {
          worst = err;
          where = std::string(views[i].name);
        }
      }
    }
  }
  return {worst <= 1e-5, "max relative error " + fmt(worst) + " (" + where + ")"};
}

Outcome metric_oracle() {
  int mismatched = 0;
  for (unsigned pred = 0; pred < 256; ++pred) {
    for (unsigned lab = 0; lab < 256; ++lab) {
      std::vector<int> pi(8), li(8);
      std::vector<double> pd(8), ld(8);
      for (int i = 0; i < 8; ++i) {
        pi[i] = (pred >> i) & 1;
        li[i] = (lab >> i) & 1;
        pd[i] = pi[i] ? 0.9 : 0.1;
        ld[i] = li[i];
      }
      const double want = testing::f1_from_counts(testing::count_confusion(pi, li));
      if (std::abs(f1(pd, ld).f1 - want) > 1e-12) {
        ++mismatched;
      }
    }
  }
  const auto w = fw_weights(make_frequencies(std::vector<double>{0.2, 0.2, 0.1}));
  const double err = std::max({std::abs(w[0] - 0.25), std::abs(w[1] - 0.25), std::abs(w[2] - 0.5)});
  return {mismatched == 0 && err <= 1e-12, std::to_string(mismatched) +
                                               " of 65536 patterns differ, weight error " +
                                               fmt(err)};
}

Outcome protocol_arithmetic() {
  SynthConfig synth;
  synth.frames_per_subject = 20;
  const Dataset data = generate(synth);
  const FoldPlan plan = make_folds(data.subject_ids, 3, 11);
  bool ok = plan.size() == 3;
  std::set<std::string> seen;
  for (const auto& fold : plan.folds) {
    ok = ok && fold.size() == 9;
    for (const auto& s : fold) ok = ok && seen.insert(s).second;
  }
  ok = ok && seen.size() == 27;
  const auto runs = nested_validation_plan(plan, 6, 12);
  for (const auto& run : runs) {
    const std::set<std::string> held(plan.folds[run.outer_fold].begin(),
                                     plan.folds[run.outer_fold].end());
    ok = ok && run.split.validation.size() == 3 && run.split.train.size() == 15;
    for (const auto& s : run.split.train) ok = ok && !held.contains(s);
    for (const auto& s : run.split.validation) ok = ok && !held.contains(s);
  }
  ok = ok && runs.size() == 18;
  return {ok, std::to_string(seen.size()) + " subjects in " + std::to_string(plan.size()) +
                  " folds of " + std::to_string(plan.folds[0].size()) + ", " +
                  std::to_string(runs.size()) + " nested runs"};
}

// Shared between criteria 7 and 8.
AblationResult ablation;
bool ablation_ran = false;

const RunRecord& record_for(const std::string& id) {
  for (std::size_t i = 0; i < ablation.variants.size(); ++i) {
    if (ablation.variants[i].first == id) return ablation.records[i];
  }
  throw std::runtime_error("no ablation record " + id);
}

Outcome directional_ablation() {
  ExperimentConfig c;
  c.seed = 2026;
  c.repeats = 5;
  c.optim.epochs = 10;
  c.out_dir = (fs::temp_directory_path() / "rhls_acceptance_ablate").string();
  fs::remove_all(c.out_dir);
  ablation = cmd_ablate(c);
  ablation_ran = true;
  const double base = record_for("baseline").summary.mean;
  const double vanilla = record_for("vanilla_ls").summary.mean;
  const double weighted = record_for("fw_bce").summary.mean;
  const double robin = record_for("rhls").summary.mean;
  bool same_folds = true;
  for (const auto& r : ablation.records) {
    same_folds = same_folds && r.fold_digest == ablation.records[0].fold_digest;
  }
  return {same_folds && robin > base && robin > vanilla,
          "mean F1 rhls " + fmt(100 * robin) + ", baseline " + fmt(100 * base) +
              ", vanilla_ls " + fmt(100 * vanilla) + ", fw_bce " + fmt(100 * weighted) +
              (same_folds ? "" : ", fold plans differ")};
}

Outcome confidence_shift() {
  if (!ablation_ran) return {false, "criterion 7 run unavailable"};
  const auto base = merged_histograms(record_for("baseline"));
  const auto robin = merged_histograms(record_for("rhls"));
  std::size_t fewer = 0;
  std::string counts;
  for (std::size_t t = 0; t < base.size(); ++t) {
    if (robin[t].negative[0] < base[t].negative[0]) ++fewer;
    counts += (t ? " " : "") + std::to_string(robin[t].negative[0]) + "/" +
              std::to_string(base[t].negative[0]);
  }
  return {2 * fewer > base.size(), std::to_string(fewer) + " of " +
                                       std::to_string(base.size()) +
                                       " tasks lower (rhls/baseline: " + counts + ")"};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || entry.path().filename() == "report.md") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(entry.path(), root).string()] = s.str();
  }
  return files;
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "rhls_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "small.cfg";
  {
    std::ofstream out(cfg);
    out << "seed = 42\nsynth.subjects = 12\nsynth.frames_per_subject = 40\n"
           "model.tokens = 4\nmodel.dim = 8\noptim.epochs = 2\nprotocol.repeats = 2\n"
           "protocol.val_folds = 3\nsweep.betas = 0, 0.5, 1\n";
  }
  const std::string cli = RHLS_CLI_PATH;
  const std::vector<std::string> commands{"gen", "train", "sweep-beta", "ablate"};
  std::vector<std::string> differing;
  std::size_t compared = 0;
  for (const auto& cmd : commands) {
    std::map<std::string, std::string> runs[2];
    const fs::path out = dir / cmd;
    for (int k = 0; k < 2; ++k) {
      fs::remove_all(out);
      std::string line = cli + " " + cmd + " --config " + cfg.string() + " --out " + out.string();
      if (std::system((line + " > /dev/null").c_str()) != 0) {
        return {false, cmd + " exited nonzero"};
      }
      if (cmd == "train") {
        line = cli + " hist --config " + cfg.string() + " --out " + out.string() + " --run " +
               (out / "runs" / "train.csv").string();
        if (std::system((line + " > /dev/null").c_str()) != 0) {
          return {false, "hist exited nonzero"};
        }
      }
      runs[k] = snapshot(out);
    }
    if (runs[0].size() != runs[1].size()) differing.push_back(cmd + ": file sets");
    for (const auto& [name, text] : runs[0]) {
      ++compared;
      const auto it = runs[1].find(name);
      if (it == runs[1].end() || it->second != text) differing.push_back(cmd + ":" + name);
    }
  }
  std::string detail = std::to_string(compared) + " files compared, " +
                       std::to_string(differing.size()) + " differ";
  for (const auto& d : differing) detail += " " + d;
  return {differing.empty() && compared > 0, detail};
}

}  // namespace

int main() {
  report(1, "analytic identities", analytic_identities);
  report(2, "reduction identity", reduction_identity);
  report(3, "minority preservation", minority_preservation);
  report(4, "gradient correctness", gradient_correctness);
  report(5, "metric oracle", metric_oracle);
  report(6, "protocol arithmetic", protocol_arithmetic);
  report(7, "directional ablation", directional_ablation);
  report(8, "confidence shift", confidence_shift);
  report(9, "determinism", determinism);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
