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

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "cheqqers/harness.h"
#include "cheqqers/service.h"
#include "httplib.h"

using namespace cheqqers;
namespace fs = std::filesystem;

namespace {

void print_board(const GameState &state) {
    const Position &pos = state.position;
    const BoardGeometry &g = state.geometry();
    for (int row = g.side() - 1; row >= 0; --row) {
        std::cout << std::setw(2) << row << ' ';
        for (int col = 0; col < g.side(); ++col) {
            Square sq = g.square_at(row, col);
            if (sq < 0) {
                std::cout << "         ";
                continue;
            }
            int id = pos.piece_at[sq];
            if (id < 0) {
                std::cout << "   ." << std::setw(3) << sq << "  ";
                continue;
            }
            const Piece &p = pos.pieces[id];
            char c = p.color == Color::White ? 'w' : 'b';
            if (p.crowned) c = static_cast<char>(std::toupper(c));
            double prob = pos.qstate.marginal(sq);
            std::cout << ' ' << c << std::setw(3) << static_cast<int>(std::lround(prob * 100)) << '%'
                      << std::setw(3) << sq;
        }
        std::cout << '\n';
    }
    std::cout << "   ";
    for (int col = 0; col < g.side(); ++col) std::cout << "    " << col << "    ";
    std::cout << '\n';
    auto groups = entanglement_groups(pos);
    for (const auto &group : groups) {
        std::cout << "entangled pieces:";
        for (int id : group) std::cout << ' ' << id;
        std::cout << '\n';
    }
}

void print_record(const TurnRecord &r) {
    std::cout << to_string(r.mover) << " plays " << r.move.to_string();
    if (r.passed) std::cout << " -> pass (" << to_string(r.pass_reason) << ")";
    for (const auto &m : r.measurements) {
        std::cout << " [measured";
        for (auto [sq, bit] : m.bits) std::cout << ' ' << sq << '=' << bit;
        std::cout << ']';
    }
    std::cout << '\n';
}

Move ask_human(const GameState &state) {
    auto moves = legal_moves(state);
    for (;;) {
        for (size_t i = 0; i < moves.size(); ++i) std::cout << "  " << i << ": " << moves[i].to_string() << '\n';
        std::cout << to_string(state.to_move()) << " move> " << std::flush;
        std::string line;
        if (!std::getline(std::cin, line)) throw std::runtime_error("input closed");
        try {
            size_t used = 0;
            unsigned long i = std::stoul(line, &used);
            if (used == line.size() && i < moves.size()) return moves[i];
        } catch (const std::exception &) {
        }
        std::cout << "enter a number between 0 and " << moves.size() - 1 << '\n';
    }
}

int play(int level, int size, int setup_rows, const std::string &white, const std::string &black, uint64_t seed) {
    GameState state = new_game(size, setup_rows, level_from_int(level), seed);
    std::array<std::unique_ptr<Agent>, 2> agents;
    std::array<std::string, 2> names{white, black};
    for (int i = 0; i < 2; ++i) {
        if (names[i] != "human")
            agents[i] = make_agent(AgentSpec::parse(names[i]), agent_seed(seed, i == 0 ? Color::White : Color::Black));
    }
    std::cout << "seed " << seed << '\n';
    while (state.outcome == Outcome::Ongoing) {
        print_board(state);
        int mover = state.to_move() == Color::White ? 0 : 1;
        Move move = agents[mover] ? agents[mover]->choose(state) : ask_human(state);
        print_record(step(state, move));
    }
    print_board(state);
    std::cout << "result: " << to_string(state.outcome) << " after " << state.ply_count << " plies\n";
    return 0;
}

std::vector<AgentSpec> parse_agents(const ExperimentConfig &config) {
    std::vector<AgentSpec> specs;
    for (const auto &a : config.agents) specs.push_back(AgentSpec::parse(a));
    return specs;
}

GameSetup setup_for(const ExperimentConfig &config, int size, int level) {
    GameSetup setup;
    setup.size = size;
    setup.setup_rows = config.setup_rows;
    setup.level = level_from_int(level);
    return setup;
}

int experiment(const std::string &kind, const std::string &config_path, const std::string &out_dir) {
    ExperimentConfig config = ExperimentConfig::load(config_path);
    fs::create_directories(out_dir);
    if (kind == "selfplay") {
        fs::path csv = fs::path(out_dir) / "selfplay.csv";
        std::vector<SelfplayCell> done;
        if (fs::exists(csv)) {
            std::ifstream in(csv);
            done = read_selfplay_csv(in);
            std::cerr << "resuming: " << done.size() << " cells already done\n";
        }
        std::ofstream out(csv, std::ios::app);
        if (done.empty()) write_selfplay_header(out);
        run_selfplay(
            config,
            [&](const SelfplayCell &cell) {
                write_selfplay_row(out, cell);
                out.flush();
                std::cerr << "size " << cell.size << " level " << cell.level << " draw rule "
                          << (cell.draw_rule ? "on" : "off") << ": mean length " << cell.mean_length << '\n';
            },
            done);
        std::ofstream gp(fs::path(out_dir) / "selfplay.gp");
        write_selfplay_gnuplot(gp, "selfplay.csv");
        return 0;
    }
    if (kind == "matchup") {
        auto specs = parse_agents(config);
        if (specs.size() != 2) throw std::invalid_argument("matchup needs exactly two agents");
        std::ofstream out(fs::path(out_dir) / "matchup.csv");
        write_matchup_header(out);
        for (int size : config.sizes) {
            for (int level : config.levels) {
                GameSetup setup = setup_for(config, size, level);
                for (auto colors : {ColorAssignment::AWhite, ColorAssignment::ABlack}) {
                    uint64_t seed = derive_seed(config.seed, static_cast<uint64_t>(size * 100 + level * 10 +
                                                                                   (colors == ColorAssignment::AWhite)));
                    auto r = run_matchup(specs[0], specs[1], config.games, setup, seed, colors, config.threads,
                                         config.ply_limit);
                    std::string color = colors == ColorAssignment::AWhite ? "white" : "black";
                    write_matchup_row(out, r, color);
                    out.flush();
                    std::cerr << r.agent_a << " (" << color << ") vs " << r.agent_b << ", size " << size
                              << ", level " << level << ": " << r.wins_a << '/' << r.wins_b << '/' << r.draws << '\n';
                }
            }
        }
        return 0;
    }
    if (kind == "tournament") {
        auto specs = parse_agents(config);
        std::ofstream out(fs::path(out_dir) / "tournament.csv");
        write_tournament_header(out);
        for (int size : config.sizes) {
            for (int level : config.levels) {
                uint64_t seed = derive_seed(config.seed, static_cast<uint64_t>(size * 100 + level));
                auto r = run_tournament(specs, config.games_per_agent, setup_for(config, size, level),
                                        config.trueskill, seed, config.threads, config.ply_limit);
                write_tournament_rows(out, r);
                out.flush();
                std::cerr << "tournament size " << size << " level " << level << " done\n";
            }
        }
        return 0;
    }
    throw std::invalid_argument("unknown experiment '" + kind + "'");
}

httplib::Server *active_server = nullptr;

int serve(int port, const std::string &host, const std::string &log_path, int workers) {
    ServiceOptions options;
    options.log_path = log_path;
    options.agent_workers = workers;
    GameService service(options);
    httplib::Server server;
    service.bind(server);
    active_server = &server;
    std::signal(SIGINT, [](int) {
        if (active_server) active_server->stop();
    });
    std::cerr << "listening on " << host << ':' << port << '\n';
    if (!server.listen(host, port)) {
        std::cerr << "cannot listen on " << host << ':' << port << '\n';
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum checkers: play, experiments and game server"};
    app.require_subcommand(1);

    int level = 0;
    int size = 5;
    int setup_rows = 1;
    std::string white = "human";
    std::string black = "mcts:800";
    uint64_t seed = std::random_device{}();
    auto *play_cmd = app.add_subcommand("play", "Play a game in the terminal");
    play_cmd->add_option("--level", level, "Rule level 0-3")->check(CLI::Range(0, 3));
    play_cmd->add_option("--size", size, "Board side length")->check(CLI::Range(4, 10));
    play_cmd->add_option("--setup-rows", setup_rows, "Rows of pieces per side");
    play_cmd->add_option("--white", white, "human or agent spec (random, mcts:N[:c=F])");
    play_cmd->add_option("--black", black, "human or agent spec (random, mcts:N[:c=F])");
    play_cmd->add_option("--seed", seed, "Game seed");

    std::string kind;
    std::string config_path;
    std::string out_dir = "out";
    auto *exp_cmd = app.add_subcommand("experiment", "Run a batch experiment");
    exp_cmd->add_option("kind", kind, "selfplay, matchup or tournament")
        ->required()
        ->check(CLI::IsMember({"selfplay", "matchup", "tournament"}));
    exp_cmd->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
    exp_cmd->add_option("--out", out_dir, "Output directory");

    int port = 8080;
    std::string host = "0.0.0.0";
    std::string log_path;
    int workers = 2;
    auto *serve_cmd = app.add_subcommand("serve", "Start the HTTP game service");
    serve_cmd->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
    serve_cmd->add_option("--host", host, "Bind address");
    serve_cmd->add_option("--log", log_path, "Append-only session log file");
    serve_cmd->add_option("--agent-workers", workers, "Threads for agent moves")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);
    try {
        for (const auto &name : {white, black})
            if (name != "human") AgentSpec::parse(name);
        if (*play_cmd) return play(level, size, setup_rows, white, black, seed);
        if (*exp_cmd) return experiment(kind, config_path, out_dir);
        if (*serve_cmd) return serve(port, host, log_path, workers);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
