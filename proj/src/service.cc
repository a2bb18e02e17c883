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

#include "cheqqers/service.h"

#include <random>

#include "httplib.h"

namespace cheqqers {

using nlohmann::json;

namespace {

int color_index(Color c) {
    return c == Color::White ? 0 : 1;
}

template <typename T>
T field(const json &body, const char *key, T fallback) {
    if (!body.contains(key)) return fallback;
    try {
        return body.at(key).get<T>();
    } catch (const json::exception &) {
        throw ApiError(400, "bad_request", std::string("field '") + key + "' has the wrong type");
    }
}

json error_body(const std::string &code, const std::string &message) {
    return {{"code", code}, {"message", message}};
}

}  // namespace

AgentPool::AgentPool(int workers) {
    for (int i = 0; i < std::max(1, workers); ++i) {
        workers_.emplace_back([this] {
            for (;;) {
                std::packaged_task<Move()> task;
                {
                    std::unique_lock lock(mutex_);
                    ready_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
                    if (stopping_ && queue_.empty()) return;
                    task = std::move(queue_.front());
                    queue_.pop_front();
                }
                task();
            }
        });
    }
}

AgentPool::~AgentPool() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    ready_.notify_all();
    for (auto &t : workers_) t.join();
}

Move AgentPool::run(const std::function<Move()> &fn) {
    std::packaged_task<Move()> task(fn);
    auto result = task.get_future();
    {
        std::lock_guard lock(mutex_);
        queue_.push_back(std::move(task));
    }
    ready_.notify_one();
    return result.get();
}

Controller Controller::parse(const std::string &text) {
    Controller c;
    if (text == "human") return c;
    try {
        c.agent = AgentSpec::parse(text);
    } catch (const std::exception &e) {
        throw ApiError(400, "bad_request", "bad controller '" + text + "': " + e.what());
    }
    return c;
}

std::string Controller::to_string() const {
    return agent ? agent->to_string() : "human";
}

json move_entry(const Move &move, uint64_t version, size_t index) {
    json entry = to_json(move);
    entry["id"] = std::to_string(version) + "." + std::to_string(index);
    const auto &s = move.squares;
    switch (move.kind) {
        case MoveKind::Step:
            entry["from"] = s[0];
            entry["to"] = s[1];
            break;
        case MoveKind::Capture:
            entry["from"] = s[0];
            entry["over"] = s[1];
            entry["to"] = s[2];
            break;
        case MoveKind::Split:
            entry["from"] = s[0];
            entry["to1"] = s[1];
            entry["to2"] = s[2];
            entry["arrows"] = {{s[0], s[1]}, {s[0], s[2]}};
            break;
        case MoveKind::Merge:
            entry["from1"] = s[0];
            entry["from2"] = s[1];
            entry["to"] = s[2];
            entry["arrows"] = {{s[0], s[2]}, {s[1], s[2]}};
            break;
        case MoveKind::Pass:
            break;
    }
    return entry;
}

GameService::GameService(ServiceOptions options)
    : options_(std::move(options)), pool_(options_.agent_workers), id_rng_(std::random_device{}()) {
    if (!options_.log_path.empty()) {
        log_.open(options_.log_path, std::ios::app);
        if (!log_) throw std::runtime_error("cannot open session log " + options_.log_path);
    }
}

std::string GameService::new_id() {
    std::lock_guard lock(misc_mutex_);
    static const char *hex = "0123456789abcdef";
    std::string id;
    uint64_t v = id_rng_.next();
    for (int i = 0; i < 16; ++i, v >>= 4) id.push_back(hex[v & 15]);
    return id;
}

void GameService::log(const json &event) {
    if (!log_.is_open()) return;
    std::lock_guard lock(misc_mutex_);
    log_ << event.dump() << '\n';
    log_.flush();
}

std::shared_ptr<GameService::Session> GameService::find(const std::string &id) {
    expire_idle();
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ApiError(404, "not_found", "no game with id '" + id + "'");
    return it->second;
}

size_t GameService::expire_idle() {
    auto now = options_.now();
    std::unique_lock lock(sessions_mutex_);
    size_t dropped = 0;
    for (auto it = sessions_.begin(); it != sessions_.end();) {
        std::unique_lock guard(it->second->mutex, std::try_to_lock);
        if (guard.owns_lock() && now - it->second->last_active > options_.idle_timeout) {
            guard.unlock();
            it = sessions_.erase(it);
            ++dropped;
        } else {
            ++it;
        }
    }
    return dropped;
}

size_t GameService::session_count() const {
    std::shared_lock lock(sessions_mutex_);
    return sessions_.size();
}

json GameService::summary(const Session &s) const {
    return {{"id", s.id},
            {"seed", s.seed},
            {"version", s.version},
            {"white", s.controllers[0].to_string()},
            {"black", s.controllers[1].to_string()},
            {"state", to_view_json(s.state)}};
}

std::vector<json> GameService::run_agents(Session &s) {
    std::vector<json> records;
    while (s.state.outcome == Outcome::Ongoing) {
        int mover = color_index(s.state.to_move());
        if (s.controllers[mover].human()) break;
        Agent &agent = *s.agents[mover];
        const GameState &state = s.state;
        Move move = pool_.run([&agent, &state] { return agent.choose(state); });
        TurnRecord record = step(s.state, move);
        ++s.version;
        records.push_back(to_json(record));
        log({{"event", "move"}, {"id", s.id}, {"version", s.version}, {"move", to_json(move)}});
    }
    return records;
}

ApiResponse GameService::create_game(const json &body) {
    if (!body.is_object()) throw ApiError(400, "bad_request", "body must be a JSON object");
    int level = field<int>(body, "level", 0);
    int size = field<int>(body, "size", 5);
    int setup_rows = field<int>(body, "setupRows", 1);
    bool draw_rule = field<bool>(body, "drawRule", true);
    auto white = Controller::parse(field<std::string>(body, "white", "human"));
    auto black = Controller::parse(field<std::string>(body, "black", "human"));
    uint64_t seed = body.contains("seed") ? field<uint64_t>(body, "seed", 0) : [this] {
        std::lock_guard lock(misc_mutex_);
        return std::random_device{}() ^ (id_rng_.next() << 20);
    }();

    auto session = std::make_shared<Session>();
    try {
        RuleOptions rules;
        rules.draw_rule = draw_rule;
        session->state = new_game(size, setup_rows, level_from_int(level), seed, rules);
    } catch (const std::exception &e) {
        throw ApiError(400, "bad_request", e.what());
    }
    session->id = new_id();
    session->seed = seed;
    session->controllers = {white, black};
    for (Color c : {Color::White, Color::Black}) {
        const auto &ctl = session->controllers[color_index(c)];
        if (!ctl.human()) session->agents[color_index(c)] = make_agent(*ctl.agent, agent_seed(seed, c));
    }
    session->created = session->last_active = options_.now();

    std::lock_guard guard(session->mutex);
    {
        std::unique_lock lock(sessions_mutex_);
        sessions_[session->id] = session;
    }
    log({{"event", "create"},
         {"id", session->id},
         {"seed", seed},
         {"level", level},
         {"size", size},
         {"setupRows", setup_rows},
         {"drawRule", draw_rule},
         {"white", white.to_string()},
         {"black", black.to_string()}});
    auto records = run_agents(*session);
    json out = summary(*session);
    out["records"] = records;
    return {201, out};
}

ApiResponse GameService::get_game(const std::string &id) {
    auto s = find(id);
    std::lock_guard guard(s->mutex);
    s->last_active = options_.now();
    return {200, summary(*s)};
}

ApiResponse GameService::list_moves(const std::string &id) {
    auto s = find(id);
    std::lock_guard guard(s->mutex);
    s->last_active = options_.now();
    if (s->state.outcome != Outcome::Ongoing)
        throw ApiError(410, "game_over", std::string("game is over: ") + to_string(s->state.outcome));
    auto moves = legal_moves(s->state);
    json list = json::array();
    for (size_t i = 0; i < moves.size(); ++i) list.push_back(move_entry(moves[i], s->version, i));
    return {200,
            {{"id", s->id},
             {"version", s->version},
             {"toMove", to_string(s->state.to_move())},
             {"controller", s->controllers[color_index(s->state.to_move())].to_string()},
             {"moves", list}}};
}

ApiResponse GameService::play_move(const std::string &id, const std::string &move_id) {
    auto s = find(id);
    std::lock_guard guard(s->mutex);
    s->last_active = options_.now();
    if (s->state.outcome != Outcome::Ongoing)
        throw ApiError(410, "game_over", std::string("game is over: ") + to_string(s->state.outcome));
    size_t dot = move_id.find('.');
    uint64_t version = 0;
    size_t index = 0;
    try {
        if (dot == std::string::npos) throw std::invalid_argument(move_id);
        size_t used = 0;
        version = std::stoull(move_id.substr(0, dot), &used);
        if (used != dot) throw std::invalid_argument(move_id);
        std::string tail = move_id.substr(dot + 1);
        index = std::stoull(tail, &used);
        if (used != tail.size()) throw std::invalid_argument(move_id);
    } catch (const std::exception &) {
        throw ApiError(400, "bad_request", "malformed move id '" + move_id + "'");
    }
    if (version != s->version)
        throw ApiError(409, "stale_move",
                       "move id is for version " + std::to_string(version) + ", game is at " +
                           std::to_string(s->version));
    int mover = color_index(s->state.to_move());
    if (!s->controllers[mover].human())
        throw ApiError(409, "not_your_turn", std::string(to_string(s->state.to_move())) + " is played by an agent");
    auto moves = legal_moves(s->state);
    if (index >= moves.size()) throw ApiError(400, "invalid_move", "no move with index " + std::to_string(index));
    TurnRecord record = step(s->state, moves[index]);
    ++s->version;
    log({{"event", "move"}, {"id", s->id}, {"version", s->version}, {"move", to_json(moves[index])}});
    std::vector<json> records{to_json(record)};
    for (auto &r : run_agents(*s)) records.push_back(std::move(r));
    json out = summary(*s);
    out["records"] = records;
    return {200, out};
}

ApiResponse GameService::health() const {
    return {200, {{"status", "ok"}, {"sessions", session_count()}}};
}

void GameService::bind(httplib::Server &server) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    auto wrap = [](const std::function<ApiResponse(const httplib::Request &)> &fn) {
        return [fn](const httplib::Request &req, httplib::Response &res) {
            ApiResponse out;
            try {
                out = fn(req);
            } catch (const ApiError &e) {
                out = {e.status(), error_body(e.code(), e.what())};
            } catch (const std::exception &e) {
                out = {500, error_body("internal", e.what())};
            }
            res.status = out.status;
            res.set_content(out.body.dump(), "application/json");
        };
    };
    server.Options(R"(/.*)", [](const httplib::Request &, httplib::Response &res) { res.status = 204; });
    server.Get("/health", wrap([this](const httplib::Request &) { return health(); }));
    server.Post("/games", wrap([this](const httplib::Request &req) {
                    json body;
                    if (req.body.empty()) {
                        body = json::object();
                    } else {
                        try {
                            body = json::parse(req.body);
                        } catch (const json::parse_error &e) {
                            throw ApiError(400, "bad_request", e.what());
                        }
                    }
                    return create_game(body);
                }));
    server.Get(R"(/games/([^/]+))", wrap([this](const httplib::Request &req) { return get_game(req.matches[1]); }));
    server.Get(R"(/games/([^/]+)/moves)",
               wrap([this](const httplib::Request &req) { return list_moves(req.matches[1]); }));
    server.Post(R"(/games/([^/]+)/moves/([^/]+))",
                wrap([this](const httplib::Request &req) { return play_move(req.matches[1], req.matches[2]); }));
}

}  // namespace cheqqers
