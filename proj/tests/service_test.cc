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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "cheqqers/service.h"
#include "doctest.h"
#include "httplib.h"

using namespace cheqqers;
using nlohmann::json;

namespace {

int status_of(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const ApiError &e) {
        return e.status();
    }
    return 200;
}

std::string code_of(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const ApiError &e) {
        return e.code();
    }
    return "";
}

std::vector<double> probabilities(const json &state) {
    std::vector<double> out;
    for (const auto &piece : state["pieces"])
        for (const auto &sq : piece["squares"]) out.push_back(sq["probability"].get<double>());
    return out;
}

// Plays human-vs-human through the service with a seeded chooser, calling
// `visit` on each move list and each play response.
void play_through(GameService &svc, const std::string &id, uint64_t seed,
                  const std::function<void(const json &)> &on_moves, const std::function<void(const json &)> &on_play) {
    Rng rng(seed);
    for (int ply = 0; ply < 400; ++ply) {
        json state = svc.get_game(id).body["state"];
        if (state["outcome"] != "ongoing") return;
        json moves = svc.list_moves(id).body;
        on_moves(moves);
        const auto &list = moves["moves"];
        std::string move_id = list[rng.below(list.size())]["id"];
        on_play(svc.play_move(id, move_id).body);
    }
}

}  // namespace

TEST_CASE("create game") {
    GameService svc;
    auto r = svc.create_game({{"level", 1}, {"size", 5}, {"setupRows", 1}, {"white", "human"}, {"black", "mcts:800"},
                              {"seed", 12}});
    CHECK(r.status == 201);
    CHECK(r.body["state"]["pieces"].size() == 6);
    CHECK(r.body["state"]["toMove"] == "white");
    CHECK(r.body["seed"] == 12);
    CHECK(r.body["black"] == "mcts:800");
    CHECK(r.body["records"].empty());
    CHECK(svc.session_count() == 1);
}

TEST_CASE("omitted seed is drawn and returned") {
    GameService svc;
    auto r = svc.create_game({{"level", 2}, {"size", 6}});
    REQUIRE(r.body.contains("seed"));
    uint64_t seed = r.body["seed"];
    auto again = svc.create_game({{"level", 2}, {"size", 6}, {"seed", seed}});
    CHECK(again.body["state"] == r.body["state"]);
}

TEST_CASE("bad parameters are rejected") {
    GameService svc;
    CHECK(status_of([&] { svc.create_game({{"level", 5}}); }) == 400);
    CHECK(status_of([&] { svc.create_game({{"size", 3}}); }) == 400);
    CHECK(status_of([&] { svc.create_game({{"size", "big"}}); }) == 400);
    CHECK(status_of([&] { svc.create_game({{"white", "mcts:zero"}}); }) == 400);
    CHECK(status_of([&] { svc.create_game(json::array()); }) == 400);
    CHECK(svc.session_count() == 0);
}

TEST_CASE("unknown games and finished games have distinct errors") {
    GameService svc;
    CHECK(status_of([&] { svc.get_game("nope"); }) == 404);
    CHECK(code_of([&] { svc.list_moves("nope"); }) == "not_found");
    auto r = svc.create_game({{"level", 0}, {"size", 4}, {"white", "random"}, {"black", "random"}, {"seed", 3}});
    std::string id = r.body["id"];
    CHECK(r.body["state"]["outcome"] != "ongoing");
    CHECK(status_of([&] { svc.list_moves(id); }) == 410);
    CHECK(code_of([&] { svc.play_move(id, "0.0"); }) == "game_over");
}

TEST_CASE("split shows two half squares") {
    GameService svc;
    std::string id = svc.create_game({{"level", 1}, {"size", 5}, {"seed", 1}}).body["id"];
    json moves = svc.list_moves(id).body;
    std::string split_id;
    for (const auto &m : moves["moves"]) {
        if (m["type"] == "split") {
            split_id = m["id"];
            CHECK(m["arrows"].size() == 2);
            CHECK(m.contains("to1"));
            CHECK(m.contains("to2"));
            break;
        }
    }
    REQUIRE(!split_id.empty());
    json after = svc.play_move(id, split_id).body;
    int halves = 0;
    for (double p : probabilities(after["state"])) halves += p == 0.5;
    CHECK(halves == 2);
}

TEST_CASE("level 0 lists no quantum moves and reports certain squares") {
    GameService svc;
    std::string id = svc.create_game({{"level", 0}, {"size", 6}, {"seed", 2}}).body["id"];
    play_through(
        svc, id, 5,
        [](const json &moves) {
            for (const auto &m : moves["moves"]) {
                CHECK(m["type"] != "split");
                CHECK(m["type"] != "merge");
            }
        },
        [](const json &played) {
            for (double p : probabilities(played["state"])) CHECK(p == 1.0);
        });
}

TEST_CASE("forced captures, merges and passes through the api") {
    bool saw_capture_list = false, saw_merge = false, saw_pass = false;
    for (uint64_t seed = 0; seed < 40 && !(saw_capture_list && saw_merge && saw_pass); ++seed) {
        GameService svc;
        std::string id = svc.create_game({{"level", seed % 2 ? 3 : 1}, {"size", 6}, {"seed", seed}}).body["id"];
        play_through(
            svc, id, seed,
            [&](const json &moves) {
                bool any_capture = false;
                for (const auto &m : moves["moves"]) any_capture = any_capture || m["type"] == "capture";
                if (any_capture) {
                    saw_capture_list = true;
                    for (const auto &m : moves["moves"]) CHECK(m["type"] == "capture");
                }
                for (const auto &m : moves["moves"]) {
                    if (m["type"] == "merge") {
                        saw_merge = true;
                        CHECK(m.contains("from1"));
                        CHECK(m.contains("from2"));
                        CHECK(m.contains("to"));
                    }
                }
            },
            [&](const json &played) {
                const auto &rec = played["records"][0];
                if (rec["pass"] == true) {
                    saw_pass = true;
                    CHECK(rec["move"]["type"] == "capture");
                    CHECK(!rec["measurements"].empty());
                }
                for (const auto &piece : played["state"]["pieces"]) {
                    double sum = 0;
                    for (const auto &sq : piece["squares"]) sum += sq["probability"].get<double>();
                    CHECK(sum <= 1.0 + 1e-3);
                }
            });
    }
    CHECK(saw_capture_list);
    CHECK(saw_merge);
    CHECK(saw_pass);
}

TEST_CASE("agent replies come back with the human move") {
    GameService svc;
    auto created = svc.create_game({{"level", 2}, {"size", 5}, {"white", "human"}, {"black", "mcts:50"}, {"seed", 4}});
    std::string id = created.body["id"];
    json moves = svc.list_moves(id).body;
    json played = svc.play_move(id, moves["moves"][0]["id"]).body;
    REQUIRE(played["records"].size() >= 2);
    CHECK(played["records"][0]["mover"] == "white");
    CHECK(played["records"][1]["mover"] == "black");
    CHECK(played["version"].get<uint64_t>() >= 2);
    if (played["state"]["outcome"] == "ongoing") CHECK(played["state"]["toMove"] == "white");
}

TEST_CASE("agent moving first") {
    GameService svc;
    auto created = svc.create_game({{"level", 1}, {"size", 5}, {"white", "random"}, {"black", "human"}, {"seed", 9}});
    CHECK(created.body["records"].size() == 1);
    CHECK(created.body["state"]["toMove"] == "black");
    CHECK(created.body["version"] == 1);
}

TEST_CASE("stale and replayed move ids conflict") {
    GameService svc;
    std::string id = svc.create_game({{"level", 1}, {"size", 5}, {"seed", 6}}).body["id"];
    json moves = svc.list_moves(id).body;
    std::string first = moves["moves"][0]["id"];
    CHECK(svc.play_move(id, first).status == 200);
    CHECK(status_of([&] { svc.play_move(id, first); }) == 409);
    CHECK(code_of([&] { svc.play_move(id, first); }) == "stale_move");
    json next = svc.list_moves(id).body;
    CHECK(next["version"] == 1);
    CHECK(code_of([&] { svc.play_move(id, "1.999"); }) == "invalid_move");
    CHECK(code_of([&] { svc.play_move(id, "x"); }) == "bad_request");
    CHECK(code_of([&] { svc.play_move(id, "1.0junk"); }) == "bad_request");
}

TEST_CASE("every listed move id is playable exactly once") {
    GameService svc;
    std::string id = svc.create_game({{"level", 3}, {"size", 5}, {"seed", 8}}).body["id"];
    json moves = svc.list_moves(id).body;
    size_t n = moves["moves"].size();
    for (size_t i = 0; i < n; ++i) {
        GameService fresh;
        std::string fid = fresh.create_game({{"level", 3}, {"size", 5}, {"seed", 8}}).body["id"];
        std::string mid = fresh.list_moves(fid).body["moves"][i]["id"];
        CHECK(fresh.play_move(fid, mid).status == 200);
        CHECK(status_of([&] { fresh.play_move(fid, mid); }) == 409);
    }
}

TEST_CASE("concurrent moves on one game serialize") {
    GameService svc;
    std::string id = svc.create_game({{"level", 1}, {"size", 6}, {"seed", 10}}).body["id"];
    for (int round = 0; round < 5; ++round) {
        json moves = svc.list_moves(id).body;
        if (moves["moves"].empty()) break;
        std::string mid = moves["moves"][0]["id"];
        std::atomic<int> ok{0}, conflict{0};
        std::vector<std::thread> threads;
        for (int t = 0; t < 8; ++t) {
            threads.emplace_back([&] {
                try {
                    svc.play_move(id, mid);
                    ++ok;
                } catch (const ApiError &e) {
                    if (e.status() == 409) ++conflict;
                }
            });
        }
        for (auto &t : threads) t.join();
        CHECK(ok == 1);
        CHECK(conflict == 7);
        CHECK(svc.get_game(id).body["version"] == round + 1);
    }
}

TEST_CASE("idle sessions expire") {
    auto now = std::make_shared<ServiceOptions::Clock::time_point>(ServiceOptions::Clock::now());
    ServiceOptions options;
    options.idle_timeout = std::chrono::hours(24);
    options.now = [now] { return *now; };
    GameService svc(options);
    std::string old_id = svc.create_game({{"seed", 1}}).body["id"];
    *now += std::chrono::hours(20);
    std::string new_id = svc.create_game({{"seed", 2}}).body["id"];
    *now += std::chrono::hours(5);
    CHECK(svc.expire_idle() == 1);
    CHECK(status_of([&] { svc.get_game(old_id); }) == 404);
    CHECK(svc.get_game(new_id).status == 200);
}

TEST_CASE("session log is append-only json lines") {
    auto path = std::filesystem::temp_directory_path() / "cheqqers_service_test.log";
    std::filesystem::remove(path);
    {
        ServiceOptions options;
        options.log_path = path.string();
        GameService svc(options);
        std::string id = svc.create_game({{"level", 1}, {"seed", 3}}).body["id"];
        svc.play_move(id, svc.list_moves(id).body["moves"][0]["id"]);
    }
    std::ifstream in(path);
    std::string line;
    std::vector<json> events;
    while (std::getline(in, line)) events.push_back(json::parse(line));
    REQUIRE(events.size() == 2);
    CHECK(events[0]["event"] == "create");
    CHECK(events[0]["seed"] == 3);
    CHECK(events[1]["event"] == "move");
    std::filesystem::remove(path);
}

TEST_CASE("http endpoints") {
    GameService svc;
    httplib::Server server;
    svc.bind(server);
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread runner([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    httplib::Client client("127.0.0.1", port);

    auto health = client.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(json::parse(health->body)["status"] == "ok");
    CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

    auto created = client.Post("/games", R"({"level": 1, "size": 5, "seed": 4, "black": "random"})",
                               "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    std::string id = json::parse(created->body)["id"];

    auto state = client.Get("/games/" + id);
    REQUIRE(state);
    CHECK(state->status == 200);

    auto moves = client.Get("/games/" + id + "/moves");
    REQUIRE(moves);
    std::string mid = json::parse(moves->body)["moves"][0]["id"];
    auto played = client.Post("/games/" + id + "/moves/" + mid, "", "application/json");
    REQUIRE(played);
    CHECK(played->status == 200);
    CHECK(json::parse(played->body)["records"].size() == 2);

    auto stale = client.Post("/games/" + id + "/moves/" + mid, "", "application/json");
    REQUIRE(stale);
    CHECK(stale->status == 409);
    auto err = json::parse(stale->body);
    CHECK(err["code"] == "stale_move");
    CHECK(err.contains("message"));

    auto missing = client.Get("/games/unknown");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    auto bad = client.Post("/games", "{not json", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    auto preflight = client.Options("/games");
    REQUIRE(preflight);
    CHECK(preflight->status == 204);

    server.stop();
    runner.join();
}
