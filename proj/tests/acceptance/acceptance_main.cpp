// Copyright 2026 The ldpfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Usage: acceptance --cli <path to ldpfl binary>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ldpfl/engine.hpp"
#include "ldpfl/experiment.hpp"
#include "ldpfl/mechanisms.hpp"
#include "ldpfl/models.hpp"
#include "ldpfl/recovery.hpp"
#include "ldpfl/rng.hpp"
#include "ldpfl/serialization.hpp"
#include "ldpfl/service.hpp"

namespace {

using namespace ldpfl;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void Require(bool condition, const std::string& what) {
    if (!condition) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // <= 0 means no limit
  std::function<void(Outcome&)> run;
};

constexpr ModelKind kAllModels[] = {ModelKind::kLinearRegression,
                                    ModelKind::kLogisticRegression,
                                    ModelKind::kSvm};

// 1. Without LDP the aggregator recovers every informative submission.
void NoLdpFullRecovery(Outcome& out) {
  for (ModelKind model : kAllModels) {
    SessionConfig cfg;
    cfg.model = model;
    cfg.mechanism = MechanismKind::kNone;
    cfg.seed = 42;
    Session s = NewSession(cfg);
    AddUsers(s, 100);
    TrainEpoch(s);
    const RecoveryReport report = RecoverSession(s, kDefaultRecoveryK);

    double max_err = 0.0;
    std::size_t informative = 0;
    bool all_recovered = true;
    for (const RecoveryResult& r : report.per_user) {
      const Gradient& g = s.last_epoch_log[r.user_id].reported_gradient;
      if (std::abs(g[kBiasIndex]) < 1e-12) continue;
      ++informative;
      if (!r.recovered.recovered) {
        all_recovered = false;
        continue;
      }
      for (std::size_t i = 0; i < kNumFeatures; ++i) {
        max_err = std::max(max_err, std::abs(r.recovered.features[i] -
                                             s.users[r.user_id].features[i]));
      }
    }
    out.detail << ModelName(model) << ": informative=" << informative
               << " max_err=" << max_err
               << " avg_E=" << report.average_exp_hamming << "; ";
    out.Require(all_recovered, std::string(ModelName(model)) + " recovered");
    out.Require(max_err < 1e-9, std::string(ModelName(model)) + " max_err");
    if (model != ModelKind::kSvm) {
      out.Require(report.average_exp_hamming >= 0.99,
                  std::string(ModelName(model)) + " avg_E >= 0.99");
    }
  }
}

// 2. Every mechanism is unbiased at 10^6 draws.
void MechanismUnbiasedness(Outcome& out) {
  constexpr int kDraws = 1000000;
  double worst = 0.0;
  std::uint64_t seed = 1000;
  for (MechanismKind kind :
       {MechanismKind::kLaplace, MechanismKind::kDuchi,
        MechanismKind::kPiecewise, MechanismKind::kHybrid}) {
    double worst_kind = 0.0;
    for (double t : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      for (double e : {0.5, 1.0, 2.0, 4.0}) {
        RngState rng(seed++);
        const PrivacyBudget eps(e);
        double sum = 0.0;
        for (int i = 0; i < kDraws; ++i) sum += Perturb(kind, t, eps, rng);
        const double err = std::abs(sum / kDraws - t);
        worst_kind = std::max(worst_kind, err);
        if (err >= 0.02) {
          out.Require(false, std::string(MechanismName(kind)) + " t=" +
                                 std::to_string(t) + " eps=" +
                                 std::to_string(e));
        }
      }
    }
    out.detail << MechanismName(kind) << " worst |mean-t|=" << worst_kind
               << "; ";
    worst = std::max(worst, worst_kind);
  }
  out.detail << "tolerance 0.02";
}

// 3. Duchi's closed-form worst-case output ratio is exactly e^eps.
void DuchiPrivacyBound(Outcome& out) {
  for (double e : {0.5, 1.0, 2.0}) {
    const PrivacyBudget eps(e);
    double max_ratio = 0.0;
    constexpr int kGrid = 200;
    for (int i = 0; i <= kGrid; ++i) {
      for (int j = 0; j <= kGrid; ++j) {
        const double t = -1.0 + 2.0 * i / kGrid;
        const double t2 = -1.0 + 2.0 * j / kGrid;
        for (bool positive : {true, false}) {
          max_ratio = std::max(max_ratio,
                               DuchiOutputProbability(t, positive, eps) /
                                   DuchiOutputProbability(t2, positive, eps));
        }
      }
    }
    const double gap = std::abs(max_ratio - std::exp(e));
    out.detail << "eps=" << e << " max_ratio=" << max_ratio
               << " |gap|=" << gap << "; ";
    out.Require(gap < 1e-9, "eps=" + std::to_string(e));
  }
}

// 4. exp-hamming equals 1/e ~ 0.368 at L1 distance 1/k, with k = 0.5.
void ExpHammingConstants(Outcome& out) {
  const double k = kDefaultRecoveryK;
  const double d = 1.0 / k;
  const FeatureVector x{0.0, 0.0, 0.0, 0.0};
  const FeatureVector xr{d / 4, -d / 4, d / 4, -d / 4};
  const double e = ExpHamming(x, xr, k);
  out.detail << "k=" << k << " E(1/k)=" << e;
  out.Require(k == 0.5, "default k is 0.5");
  out.Require(std::abs(e - 0.368) < 5e-4, "E at 1/k within 5e-4 of 0.368");

  SessionConfig cfg;
  cfg.seed = 1;
  Session s = NewSession(cfg);
  AddUsers(s, 2);
  TrainEpoch(s);
  out.Require(RecoverSession(s).k == 0.5, "RecoverSession default k");
}

// 5. Noiseless linear regression converges to the generator weights.
void ConvergenceToIdealWeights(Outcome& out) {
  SessionConfig cfg;
  cfg.model = ModelKind::kLinearRegression;
  cfg.mechanism = MechanismKind::kNone;
  cfg.seed = 42;
  cfg.learning_rate = 0.01;
  Session s = NewSession(cfg);
  AddUsers(s, 100);
  double err = INFINITY;
  int first_within = 0;
  for (int epoch = 1; epoch <= 500; ++epoch) {
    TrainEpoch(s);
    err = 0.0;
    for (std::size_t i = 0; i < kNumParams; ++i) {
      err = std::max(err, std::abs(s.weights.params()[i] -
                                   kIdealWeights.params()[i]));
    }
    if (first_within == 0 && err < 0.05) first_within = epoch;
  }
  out.detail << "first epoch within 0.05=" << first_within
             << " Linf_err after 500 epochs=" << err;
  out.Require(err < 0.05, "L_inf error < 0.05 after 500 epochs");
}

// 6. More budget leaks more data under the Piecewise mechanism.
void PrivacyUtilityTrend(Outcome& out) {
  ExperimentConfig base;
  base.session.model = ModelKind::kLinearRegression;
  base.session.mechanism = MechanismKind::kPiecewise;
  base.users = 100;
  base.epochs = 1;
  const auto rows = RunSweep(base, {0.5, 8.0}, 1, 20);
  double low = 0.0;
  double high = 0.0;
  for (const SweepRow& row : rows) {
    (row.epsilon == 0.5 ? low : high) += row.avg_exp_hamming / 20.0;
  }
  out.detail << "mean E(eps=0.5)=" << low << " mean E(eps=8)=" << high;
  out.Require(high > low, "E(8) > E(0.5)");
  out.Require(low < 0.368, "E(0.5) < 0.368");
}

int RunCommand(const std::string& cmd, std::string& output) {
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return -1;
  char buf[4096];
  std::size_t n;
  output.clear();
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, n);
  const int status = pclose(pipe);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 7. Reports and replays are reproducible.
void Determinism(Outcome& out, const std::string& cli) {
  out.Require(!cli.empty(), "--cli path given");
  if (!cli.empty()) {
    const std::string cmd =
        cli +
        " simulate --model logistic --mechanism piecewise --epsilon 4 "
        "--users 100 --epochs 3 --seed 42";
    std::string a;
    std::string b;
    const int code_a = RunCommand(cmd, a);
    const int code_b = RunCommand(cmd, b);
    out.detail << "cli exit=" << code_a << "," << code_b
               << " bytes=" << a.size() << "; ";
    out.Require(code_a == 0 && code_b == 0, "cli exit 0");
    out.Require(!a.empty() && a == b, "cli reports byte-identical");
  }

  ApiService api;
  auto call = [&api](std::string_view method, const std::string& path,
                     const std::string& body) {
    return api.Handle(method, path, body);
  };
  const HttpResponse created = call(
      "POST", "/api/v1/sessions",
      R"({"model":"svm","mechanism":"hybrid","epsilon":2,"seed":42})");
  const std::string id = Json::parse(created.body)["id"];
  const std::string base = "/api/v1/sessions/" + id;
  call("POST", base + "/users", R"({"count":100})");
  const Json snapshot = Json::parse(call("GET", base, "").body)["session"];
  const HttpResponse train1 = call("POST", base + "/train", "");
  const HttpResponse recover1 = call("POST", base + "/recover", "");

  Json restore;
  restore["snapshot"] = snapshot;
  const std::string id2 =
      Json::parse(call("POST", "/api/v1/sessions", restore.dump()).body)["id"];
  const std::string base2 = "/api/v1/sessions/" + id2;
  const HttpResponse train2 = call("POST", base2 + "/train", "");
  const HttpResponse recover2 = call("POST", base2 + "/recover", "");
  out.detail << "service train=" << train1.status << "/" << train2.status
             << " recover=" << recover1.status << "/" << recover2.status;
  out.Require(train1.status == 200 && train1.body == train2.body,
              "restored session reproduces event log");
  out.Require(recover1.status == 200 && recover1.body == recover2.body,
              "restored session reproduces recovery");
}

// 8. Analytic gradients agree with central finite differences.
void GradientCorrectness(Outcome& out) {
  RngState rng(8);
  for (ModelKind model : kAllModels) {
    double worst = 0.0;
    int checked = 0;
    int skipped = 0;
    while (checked < 100) {
      WeightVector w;
      for (double& v : w.w) v = rng.NextUniform(-2, 2);
      w.bias = rng.NextUniform(-2, 2);
      TrainingRecord rec;
      for (double& x : rec.features) x = rng.NextUniform(-1, 1);
      rec.label = IsClassifier(model) ? (rng.NextUnit() < 0.5 ? -1.0 : 1.0)
                                      : rng.NextUniform(-2, 2);
      if (model == ModelKind::kSvm &&
          std::abs(1.0 - rec.label * PredictRaw(w, rec.features)) < 1e-3) {
        ++skipped;
        continue;
      }
      const Gradient g = ComputeGradient(model, w, rec);
      const Gradient p = w.params();
      for (std::size_t i = 0; i < kNumParams; ++i) {
        constexpr double h = 1e-6;
        Gradient plus = p;
        Gradient minus = p;
        plus[i] += h;
        minus[i] -= h;
        const double fd = (Loss(model, WeightVector::FromParams(plus), rec) -
                           Loss(model, WeightVector::FromParams(minus), rec)) /
                          (2.0 * h);
        worst = std::max(worst, std::abs(fd - g[i]));
      }
      ++checked;
    }
    out.detail << ModelName(model) << " worst=" << worst;
    if (skipped > 0) out.detail << " (skipped " << skipped << " near kink)";
    out.detail << "; ";
    out.Require(worst < 1e-5, std::string(ModelName(model)) + " within 1e-5");
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
  }

  const std::vector<Criterion> criteria = {
      {1, "no-LDP full recovery", 1.0, NoLdpFullRecovery},
      {2, "mechanism unbiasedness", 60.0, MechanismUnbiasedness},
      {3, "Duchi privacy bound", 0.0, DuchiPrivacyBound},
      {4, "exp-hamming constants", 0.0, ExpHammingConstants},
      {5, "convergence to ideal weights", 5.0, ConvergenceToIdealWeights},
      {6, "privacy-utility trend", 10.0, PrivacyUtilityTrend},
      {7, "determinism", 0.0,
       [&cli](Outcome& out) { Determinism(out, cli); }},
      {8, "gradient correctness", 0.0, GradientCorrectness},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.Require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    if (c.time_limit_s > 0.0 && secs >= c.time_limit_s) {
      out.Require(false, "runtime limit " + std::to_string(c.time_limit_s) +
                             " s");
    }
    if (!out.pass) ++failures;
    std::printf("[%s] %d. %s (%.3f s) %s\n", out.pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), secs, out.detail.str().c_str());
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
