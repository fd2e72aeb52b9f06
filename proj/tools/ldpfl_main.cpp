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

// ldpfl: headless experiments and the session service.
//
//   ldpfl simulate --model linear --mechanism piecewise --epsilon 8 ...
//   ldpfl sweep --mechanism piecewise --epsilons 0.5,8 --seeds 20
//   ldpfl serve --port 8080 --static-dir ui/dist
//
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#include <pthread.h>
#include <signal.h>
#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"
#include "ldpfl/engine.hpp"
#include "ldpfl/error.hpp"
#include "ldpfl/experiment.hpp"
#include "ldpfl/mechanisms.hpp"
#include "ldpfl/models.hpp"
#include "ldpfl/service.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct CommonFlags {
  std::string model = "linear";
  std::string mechanism = "none";
  std::optional<double> epsilon;
  std::size_t users = 100;
  std::size_t epochs = 1;
  std::uint64_t seed = 42;
  double k = ldpfl::kDefaultRecoveryK;
  double learning_rate = ldpfl::kDefaultLearningRate;
  std::string out;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--model", f.model, "linear | logistic | svm")
      ->check(CLI::IsMember({"linear", "logistic", "svm"}))
      ->capture_default_str();
  cmd->add_option("--mechanism", f.mechanism,
                  "none | laplace | duchi | piecewise | hybrid")
      ->check(CLI::IsMember({"none", "laplace", "duchi", "piecewise", "hybrid"}))
      ->capture_default_str();
  cmd->add_option("--users", f.users, "number of users")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--epochs", f.epochs, "training epochs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--k", f.k, "exp-hamming constant")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--learning-rate", f.learning_rate, "SGD step size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--out", f.out, "output file (default: standard output)");
}

ldpfl::ExperimentConfig ToExperiment(const CommonFlags& f) {
  ldpfl::ExperimentConfig cfg;
  cfg.session.model = ldpfl::ParseModel(f.model);
  cfg.session.mechanism = ldpfl::ParseMechanism(f.mechanism);
  cfg.session.epsilon = f.epsilon;
  cfg.session.seed = f.seed;
  cfg.session.learning_rate = f.learning_rate;
  cfg.users = f.users;
  cfg.epochs = f.epochs;
  cfg.k = f.k;
  return cfg;
}

void Emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  out << text;
}

int Serve(const std::string& host, int port, const std::string& static_dir,
          const std::string& state_file) {
  // Termination signals are handled by a dedicated thread via sigwait, so
  // block them before the server spawns its workers.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  ldpfl::ApiService api;
  if (!state_file.empty()) {
    const std::size_t n = api.store().LoadFromFile(state_file);
    std::fprintf(stderr, "{\"event\":\"restored\",\"sessions\":%zu}\n", n);
  }

  httplib::Server server;
  api.Mount(server);
  if (!static_dir.empty() && !server.set_mount_point("/", static_dir)) {
    std::fprintf(stderr, "static directory %s does not exist\n",
                 static_dir.c_str());
    return kExitUsage;
  }

  std::thread waiter([&server, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });

  std::fprintf(stderr, "{\"event\":\"listening\",\"host\":\"%s\",\"port\":%d}\n",
               host.c_str(), port);
  const bool ok = server.listen(host, port);
  if (!ok) {
    // Unblock the waiter if listen failed before any signal arrived.
    kill(getpid(), SIGTERM);
  }
  waiter.join();

  if (!state_file.empty()) {
    api.store().SaveToFile(state_file);
    std::fprintf(stderr, "{\"event\":\"saved\",\"sessions\":%zu}\n",
                 api.store().size());
  }
  std::fprintf(stderr, "{\"event\":\"stopped\"}\n");
  return ok ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated learning with local differential privacy: "
               "gradient inversion experiments and session service"};
  app.require_subcommand(1);

  CommonFlags sim;
  std::string format = "json";
  double sim_epsilon = 0.0;
  auto* simulate = app.add_subcommand(
      "simulate", "train, attack and report on one configuration");
  AddCommonFlags(simulate, sim);
  auto* sim_eps_opt =
      simulate->add_option("--epsilon", sim_epsilon, "total per-user budget")
          ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "PRNG seed")->capture_default_str();
  simulate->add_option("--format", format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  CommonFlags sweep;
  sweep.mechanism = "piecewise";
  std::vector<double> epsilons;
  std::size_t seed_count = 1;
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "CSV of results for every (epsilon, seed) pair");
  AddCommonFlags(sweep_cmd, sweep);
  sweep_cmd->add_option("--epsilons", epsilons, "comma-separated budgets")
      ->delimiter(',')
      ->required()
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seeds", seed_count, "number of seeds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed, "first seed")
      ->capture_default_str();

  int port = 8080;
  std::string host = "0.0.0.0";
  std::string static_dir;
  std::string state_file;
  auto* serve = app.add_subcommand("serve", "run the HTTP/JSON service");
  serve->add_option("--port", port, "listen port (PORT env var overrides)")
      ->check(CLI::Range(1, 65535))
      ->capture_default_str();
  serve->add_option("--host", host, "listen address")->capture_default_str();
  serve->add_option("--static-dir", static_dir, "UI assets to serve at /");
  serve->add_option("--state-file", state_file,
                    "load sessions at startup and save them on shutdown");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) {
      if (*sim_eps_opt) sim.epsilon = sim_epsilon;
      const ldpfl::ExperimentConfig cfg = ToExperiment(sim);
      cfg.session.Validate();
      const ldpfl::ExperimentReport report = ldpfl::RunExperiment(cfg);
      Emit(format == "csv" ? ldpfl::ToCsv(report)
                           : ldpfl::ToJson(report).dump(2) + "\n",
           sim.out);
    } else if (*sweep_cmd) {
      ldpfl::ExperimentConfig cfg = ToExperiment(sweep);
      cfg.session.epsilon = epsilons.front();
      cfg.session.Validate();
      Emit(ldpfl::SweepToCsv(
               ldpfl::RunSweep(cfg, epsilons, sweep.seed, seed_count)),
           sweep.out);
    } else if (*serve) {
      if (const char* env = std::getenv("PORT"); env != nullptr && *env) {
        try {
          port = std::stoi(env);
        } catch (const std::exception&) {
          std::cerr << "invalid PORT environment value: " << env << '\n';
          return kExitUsage;
        }
      }
      return Serve(host, port, static_dir, state_file);
    }
  } catch (const ldpfl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ldpfl::ErrorCode::kInvalidArgument:
      case ldpfl::ErrorCode::kInvalidBudget:
      case ldpfl::ErrorCode::kInvalidConfig:
      case ldpfl::ErrorCode::kWrongModelKind:
        return kExitUsage;
      default:
        return kExitRuntime;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
