// Copyright 2026 The Cheqqers Authors
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

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "cheqqers/agents.h"
#include "cheqqers/game.h"
#include "cheqqers/harness.h"

namespace httplib {
class Server;
}

namespace cheqqers {

/// Error surfaced to clients as {code, message} with an HTTP status.
class ApiError : public std::runtime_error {
   public:
    ApiError(int status, std::string code, const std::string &message)
        : std::runtime_error(message), status_(status), code_(std::move(code)) {}
    int status() const {
        return status_;
    }
    const std::string &code() const {
        return code_;
    }

   private:
    int status_;
    std::string code_;
};

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

/// Fixed-size thread pool that runs agent searches.
class AgentPool {
   public:
    explicit AgentPool(int workers);
    ~AgentPool();
    AgentPool(const AgentPool &) = delete;
    AgentPool &operator=(const AgentPool &) = delete;

    /// Runs fn on a worker and blocks until it finishes.
    Move run(const std::function<Move()> &fn);

   private:
    std::mutex mutex_;
    std::condition_variable ready_;
    std::deque<std::packaged_task<Move()>> queue_;
    std::vector<std::thread> workers_;
    bool stopping_ = false;
};

struct ServiceOptions {
    using Clock = std::chrono::steady_clock;
    int agent_workers = 2;
    std::chrono::seconds idle_timeout = std::chrono::hours(24);
    /// Append-only JSON-lines log of session events; empty disables it.
    std::string log_path;
    std::function<Clock::time_point()> now = [] { return Clock::now(); };
};

/// Controller of one color: a human client or an agent.
struct Controller {
    std::optional<AgentSpec> agent;

    static Controller parse(const std::string &text);
    std::string to_string() const;
    bool human() const {
        return !agent.has_value();
    }
};

class GameService {
   public:
    explicit GameService(ServiceOptions options = {});

    /// Body: {level, size, setupRows?, white?, black?, seed?, drawRule?}.
    ApiResponse create_game(const nlohmann::json &body);
    ApiResponse get_game(const std::string &id);
    ApiResponse list_moves(const std::string &id);
    /// move_id is "<version>.<index>" from the latest list_moves.
    ApiResponse play_move(const std::string &id, const std::string &move_id);
    ApiResponse health() const;

    /// Drops sessions idle longer than the timeout; returns how many.
    size_t expire_idle();
    size_t session_count() const;

    /// Registers the HTTP routes (with permissive CORS headers).
    void bind(httplib::Server &server);

   private:
    struct Session {
        std::mutex mutex;
        std::string id;
        uint64_t seed = 0;
        GameState state;
        std::array<Controller, 2> controllers;
        std::array<std::unique_ptr<Agent>, 2> agents;
        uint64_t version = 0;
        ServiceOptions::Clock::time_point created;
        ServiceOptions::Clock::time_point last_active;
    };

    std::shared_ptr<Session> find(const std::string &id);
    std::vector<nlohmann::json> run_agents(Session &session);
    nlohmann::json summary(const Session &session) const;
    void log(const nlohmann::json &event);
    std::string new_id();

    ServiceOptions options_;
    AgentPool pool_;
    mutable std::shared_mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::mutex misc_mutex_;
    Rng id_rng_;
    std::ofstream log_;
};

/// List entry for a legal move, including arrow endpoints for the UI.
nlohmann::json move_entry(const Move &move, uint64_t version, size_t index);

}  // namespace cheqqers
