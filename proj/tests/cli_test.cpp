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

// Runs the ldpfl binary as a subprocess.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include <gtest/gtest.h>
#include "httplib.h"
#include "json.hpp"

namespace {

using Json = nlohmann::ordered_json;

struct CliRun {
  int exit_code;
  std::string out;
};

CliRun Cli(const std::string& args) {
  const std::string cmd =
      std::string(LDPFL_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

TEST(CliTest, SimulateWithoutLdpRecovers) {
  const CliRun r = Cli(
      "simulate --mechanism none --model linear --users 100 --epochs 1 "
      "--seed 42");
  ASSERT_EQ(r.exit_code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_GE(j["average_exp_hamming"].get<double>(), 0.99);
  EXPECT_EQ(j["config"]["model"], "linear");
}

TEST(CliTest, SimulateIsByteIdentical) {
  const std::string args =
      "simulate --model svm --mechanism hybrid --epsilon 3 --users 40 "
      "--epochs 2 --seed 7";
  const CliRun a = Cli(args);
  const CliRun b = Cli(args);
  ASSERT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(a.out.empty());
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(Cli("simulate --mechanism duchi").exit_code, 1);
  EXPECT_EQ(Cli("simulate --model tree").exit_code, 1);
  EXPECT_EQ(Cli("simulate --users 0").exit_code, 1);
  EXPECT_EQ(Cli("simulate --bogus").exit_code, 1);
  EXPECT_EQ(Cli("").exit_code, 1);
  EXPECT_EQ(Cli("sweep --mechanism piecewise").exit_code, 1);
  EXPECT_EQ(Cli("--help").exit_code, 0);
}

TEST(CliTest, CsvAndOutFile) {
  const auto path =
      std::filesystem::temp_directory_path() / "ldpfl_cli_test.csv";
  const CliRun r = Cli("simulate --format csv --seed 3 --out " + path.string());
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_TRUE(text.str().starts_with("model,mechanism,epsilon,seed,"));
  EXPECT_EQ(text.str(), Cli("simulate --format csv --seed 3").out);
  std::filesystem::remove(path);
}

TEST(CliTest, SweepSingleRowMatchesSimulate) {
  const CliRun sweep = Cli(
      "sweep --model logistic --mechanism laplace --epsilons 2 --seeds 1 "
      "--seed 5 --users 30");
  ASSERT_EQ(sweep.exit_code, 0);
  std::istringstream lines(sweep.out);
  std::string header;
  std::string row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header, "epsilon,seed,final_cost,final_accuracy,avg_exp_hamming");
  std::string extra;
  EXPECT_FALSE(std::getline(lines, extra));

  const CliRun sim = Cli(
      "simulate --model logistic --mechanism laplace --epsilon 2 --seed 5 "
      "--users 30 --format csv");
  std::istringstream sim_lines(sim.out);
  std::string sim_row;
  std::getline(sim_lines, sim_row);
  std::getline(sim_lines, sim_row);
  // final_cost,final_accuracy,avg_exp_hamming appear in both rows.
  auto tail = [](const std::string& s, int fields) {
    std::size_t pos = s.size();
    for (int i = 0; i < fields; ++i) pos = s.rfind(',', pos - 1);
    return s.substr(pos + 1);
  };
  EXPECT_EQ(tail(row, 3), tail(sim_row.substr(0, sim_row.rfind(',')), 3));
}

int FreePort() {
  httplib::Server probe;
  const int port = probe.bind_to_any_port("127.0.0.1");
  return port;
}

TEST(CliTest, ServeHandlesRequestsAndSavesOnSigterm) {
  const auto state =
      std::filesystem::temp_directory_path() / "ldpfl_cli_state.json";
  std::filesystem::remove(state);
  const int port = FreePort();
  ASSERT_GT(port, 0);

  const pid_t pid = fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    setenv("PORT", std::to_string(port).c_str(), 1);
    if (freopen("/dev/null", "w", stderr) == nullptr) _exit(126);
    execl(LDPFL_CLI_PATH, LDPFL_CLI_PATH, "serve", "--host", "127.0.0.1",
          "--port", "1", "--state-file", state.c_str(),
          static_cast<char*>(nullptr));
    _exit(127);
  }

  httplib::Client client("127.0.0.1", port);
  httplib::Result created;
  for (int attempt = 0; attempt < 100 && !created; ++attempt) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    created = client.Post("/api/v1/sessions", R"({"model":"linear"})",
                          "application/json");
  }
  ASSERT_TRUE(created) << "server did not come up";
  EXPECT_EQ(created->status, 201);
  const std::string id = Json::parse(created->body)["id"];

  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);

  std::ifstream in(state);
  ASSERT_TRUE(in.good());
  const Json saved = Json::parse(in);
  EXPECT_TRUE(saved["sessions"].contains(id));
  std::filesystem::remove(state);
}

}  // namespace
