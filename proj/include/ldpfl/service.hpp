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

#ifndef LDPFL_SERVICE_HPP_
#define LDPFL_SERVICE_HPP_

// Session-based JSON API over the training engine.
//
//   POST   /api/v1/sessions                 create from a config or snapshot
//   GET    /api/v1/sessions/{id}            current snapshot
//   POST   /api/v1/sessions/{id}/users      {"count": n}
//   POST   /api/v1/sessions/{id}/train      one epoch, full event log
//   POST   /api/v1/sessions/{id}/recover    {"k": 0.5} optional
//   GET    /api/v1/sessions/{id}/report     experiment report after recover
//   DELETE /api/v1/sessions/{id}
//
// Routing and request handling live in ApiService::Handle, independent of
// the HTTP transport; Mount() wires it into a cpp-httplib server.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "ldpfl/engine.hpp"
#include "ldpfl/error.hpp"
#include "ldpfl/experiment.hpp"
#include "ldpfl/recovery.hpp"
#include "ldpfl/serialization.hpp"

namespace ldpfl {

inline constexpr std::string_view kApiPrefix = "/api/v1";

struct HttpResponse {
  int status = 200;
  std::string body;
};

inline int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kNoTrainingYet:
    case ErrorCode::kEmptyDataset:
      return 409;
    case ErrorCode::kParse:
      return 400;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidBudget:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kWrongModelKind:
      return 422;
  }
  return 500;
}

inline HttpResponse ErrorResponse(int status, std::string_view code,
                                  std::string_view message) {
  Json j;
  j["error"]["code"] = code;
  j["error"]["message"] = message;
  return {status, j.dump()};
}

// 128 random bits as 32 lowercase hex digits.
inline std::string NewSessionId() {
  static thread_local std::random_device device;
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  id.reserve(32);
  for (int word = 0; word < 4; ++word) {
    std::uint32_t bits = device();
    for (int nibble = 0; nibble < 8; ++nibble) {
      id.push_back(kHex[bits & 0xF]);
      bits >>= 4;
    }
  }
  return id;
}

// In-memory sessions. The map is guarded by a shared mutex; each session has
// its own mutex so operations on one session serialize while different
// sessions proceed in parallel.
class SessionStore {
 public:
  struct Slot {
    std::mutex mu;
    Session session;
    std::vector<EpochSummary> epochs;
    std::optional<RecoveryReport> last_recovery;
  };

  std::string Insert(Session session,
                     std::vector<EpochSummary> epochs = {}) {
    auto slot = std::make_shared<Slot>();
    slot->session = std::move(session);
    slot->epochs = std::move(epochs);
    std::unique_lock lock(mu_);
    std::string id = NewSessionId();
    while (slots_.contains(id)) id = NewSessionId();
    slots_.emplace(id, std::move(slot));
    return id;
  }

  std::shared_ptr<Slot> Find(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = slots_.find(id);
    if (it == slots_.end()) {
      throw Error(ErrorCode::kNotFound, "no session with id '" + id + "'");
    }
    return it->second;
  }

  bool Erase(const std::string& id) {
    std::unique_lock lock(mu_);
    return slots_.erase(id) > 0;
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return slots_.size();
  }

  // {"sessions": {id: {"session": snapshot, "epochs": [...]}}}
  Json Dump() const {
    std::vector<std::pair<std::string, std::shared_ptr<Slot>>> copy;
    {
      std::shared_lock lock(mu_);
      copy.assign(slots_.begin(), slots_.end());
    }
    std::sort(copy.begin(), copy.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Json sessions = Json::object();
    for (const auto& [id, slot] : copy) {
      std::lock_guard slot_lock(slot->mu);
      Json entry;
      entry["session"] = ToJson(slot->session);
      Json epochs = Json::array();
      for (const auto& s : slot->epochs) {
        epochs.push_back(
            {{"epoch", s.epoch},
             {"cost", s.cost},
             {"accuracy", internal::OptionalNumber(s.accuracy)}});
      }
      entry["epochs"] = std::move(epochs);
      sessions[id] = std::move(entry);
    }
    Json j;
    j["sessions"] = std::move(sessions);
    return j;
  }

  // Restores sessions under their original ids. Returns how many were read.
  std::size_t Load(const Json& dump) {
    const Json& sessions = internal::Field(dump, "sessions");
    if (!sessions.is_object()) internal::ThrowParse("sessions must be an object");
    std::size_t count = 0;
    for (const auto& [id, entry] : sessions.items()) {
      auto slot = std::make_shared<Slot>();
      slot->session = SessionFromJson(internal::Field(entry, "session"));
      if (auto it = entry.find("epochs"); it != entry.end()) {
        for (const Json& e : *it) {
          EpochSummary s;
          s.epoch = internal::AsUint64(internal::Field(e, "epoch"), "epoch");
          s.cost = internal::AsDouble(internal::Field(e, "cost"), "cost");
          if (const Json& a = internal::Field(e, "accuracy"); !a.is_null()) {
            s.accuracy = internal::AsDouble(a, "accuracy");
          }
          slot->epochs.push_back(s);
        }
      }
      std::unique_lock lock(mu_);
      slots_[id] = std::move(slot);
      ++count;
    }
    return count;
  }

  void SaveToFile(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
    }
    out << Dump().dump(2) << '\n';
  }

  std::size_t LoadFromFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) return 0;
    Json dump;
    try {
      dump = Json::parse(in);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kParse, path + ": " + e.what());
    }
    return Load(dump);
  }

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, std::shared_ptr<Slot>> slots_;
};

class ApiService {
 public:
  SessionStore& store() { return store_; }

  HttpResponse Handle(std::string_view method, std::string_view path,
                      std::string_view body) {
    try {
      return Route(method, path, body);
    } catch (const Error& e) {
      return ErrorResponse(HttpStatusFor(e.code()), ErrorCodeName(e.code()),
                           e.what());
    } catch (const std::exception& e) {
      return ErrorResponse(500, "internal", e.what());
    }
  }

  // Routes /api/v1/... to Handle and logs one JSON line per request.
  void Mount(httplib::Server& server) {
    const std::string pattern = std::string(kApiPrefix) + "/.*";
    auto handler = [this](const httplib::Request& req,
                          httplib::Response& res) {
      HttpResponse out = Handle(req.method, req.path, req.body);
      res.status = out.status;
      res.set_content(out.body, "application/json");
    };
    server.Get(pattern, handler);
    server.Post(pattern, handler);
    server.Delete(pattern, handler);
    server.Put(pattern, handler);
    server.set_logger([](const httplib::Request& req,
                         const httplib::Response& res) {
      Json line;
      line["ts"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
      line["method"] = req.method;
      line["path"] = req.path;
      line["status"] = res.status;
      line["remote"] = req.remote_addr;
      std::fprintf(stderr, "%s\n", line.dump().c_str());
    });
  }

 private:
  static std::vector<std::string_view> SplitPath(std::string_view path) {
    std::vector<std::string_view> parts;
    while (!path.empty()) {
      if (path.front() == '/') {
        path.remove_prefix(1);
        continue;
      }
      const auto end = path.find('/');
      parts.push_back(path.substr(0, end));
      if (end == std::string_view::npos) break;
      path.remove_prefix(end);
    }
    return parts;
  }

  static Json ParseBody(std::string_view body) {
    if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) {
      return Json::object();
    }
    try {
      return Json::parse(body);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kParse, std::string("malformed JSON: ") + e.what());
    }
  }

  static HttpResponse Ok(const Json& j, int status = 200) {
    return {status, j.dump()};
  }

  static Json SessionPayload(const std::string& id, const Session& session) {
    Json j;
    j["id"] = id;
    j["session"] = ToJson(session);
    return j;
  }

  static HttpResponse MethodNotAllowed() {
    return ErrorResponse(405, "method_not_allowed", "method not allowed");
  }

  HttpResponse Route(std::string_view method, std::string_view path,
                     std::string_view body) {
    if (!path.starts_with(kApiPrefix)) {
      return ErrorResponse(404, "not_found", "unknown route");
    }
    const auto parts = SplitPath(path.substr(kApiPrefix.size()));
    if (parts.empty() || parts[0] != "sessions" || parts.size() > 3) {
      return ErrorResponse(404, "not_found", "unknown route");
    }
    if (parts.size() == 1) {
      if (method != "POST") return MethodNotAllowed();
      return CreateSession(ParseBody(body));
    }
    const std::string id(parts[1]);
    if (parts.size() == 2) {
      if (method == "GET") return GetSession(id);
      if (method == "DELETE") return DeleteSession(id);
      return MethodNotAllowed();
    }
    const std::string_view action = parts[2];
    if (action == "report") {
      if (method != "GET") return MethodNotAllowed();
      return GetReport(id);
    }
    if (method != "POST") {
      if (action == "users" || action == "train" || action == "recover") {
        return MethodNotAllowed();
      }
      return ErrorResponse(404, "not_found", "unknown route");
    }
    if (action == "users") return AddUsersTo(id, ParseBody(body));
    if (action == "train") return Train(id);
    if (action == "recover") return Recover(id, ParseBody(body));
    return ErrorResponse(404, "not_found", "unknown route");
  }

  // Body is either a config object, {"config": {...}}, or
  // {"snapshot": <session snapshot>}.
  HttpResponse CreateSession(const Json& body) {
    Session session;
    if (auto it = body.find("snapshot"); it != body.end()) {
      try {
        session = SessionFromJson(*it);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kParse) {
          throw Error(ErrorCode::kInvalidConfig, e.what());
        }
        throw;
      }
    } else {
      const Json& cfg = body.contains("config") ? body["config"] : body;
      SessionConfig config;
      try {
        config = ConfigFromJson(cfg);
      } catch (const Error& e) {
        throw Error(ErrorCode::kInvalidConfig, e.what());
      }
      session = NewSession(config);
    }
    Json payload = SessionPayload("", session);
    const std::string id = store_.Insert(std::move(session));
    payload["id"] = id;
    return Ok(payload, 201);
  }

  HttpResponse GetSession(const std::string& id) {
    auto slot = store_.Find(id);
    std::lock_guard lock(slot->mu);
    return Ok(SessionPayload(id, slot->session));
  }

  HttpResponse DeleteSession(const std::string& id) {
    if (!store_.Erase(id)) {
      throw Error(ErrorCode::kNotFound, "no session with id '" + id + "'");
    }
    Json j;
    j["deleted"] = id;
    return Ok(j);
  }

  HttpResponse AddUsersTo(const std::string& id, const Json& body) {
    const Json& count = internal::Field(body, "count");
    if (!count.is_number_integer() || count.get<std::int64_t>() <= 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "count must be a positive integer");
    }
    auto slot = store_.Find(id);
    std::lock_guard lock(slot->mu);
    AddUsers(slot->session, count.get<std::size_t>());
    slot->last_recovery.reset();
    return Ok(SessionPayload(id, slot->session));
  }

  HttpResponse Train(const std::string& id) {
    auto slot = store_.Find(id);
    std::lock_guard lock(slot->mu);
    const std::vector<TrainEvent> events = TrainEpoch(slot->session);
    slot->epochs.push_back(
        SummarizeEpoch(slot->session.epoch_count, events));
    slot->last_recovery.reset();
    Json j;
    j["epoch_count"] = slot->session.epoch_count;
    j["events"] = ToJson(events);
    j["metrics"] = ToJson(SessionMetrics(slot->session));
    return Ok(j);
  }

  HttpResponse Recover(const std::string& id, const Json& body) {
    double k = kDefaultRecoveryK;
    if (auto it = body.find("k"); it != body.end() && !it->is_null()) {
      k = internal::AsDouble(*it, "k");
    }
    auto slot = store_.Find(id);
    std::lock_guard lock(slot->mu);
    RecoveryReport report = RecoverSession(slot->session, k);
    slot->last_recovery = report;
    return Ok(ToJson(report));
  }

  HttpResponse GetReport(const std::string& id) {
    auto slot = store_.Find(id);
    std::lock_guard lock(slot->mu);
    if (!slot->last_recovery.has_value()) {
      throw Error(ErrorCode::kNoTrainingYet,
                  "no recovery has been run since the last training epoch");
    }
    return Ok(ToJson(
        BuildReport(slot->session, slot->epochs, *slot->last_recovery)));
  }

  SessionStore store_;
};

}  // namespace ldpfl

#endif  // LDPFL_SERVICE_HPP_
