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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cheqqers/agents.h"
#include "cheqqers/game.h"
#include "cheqqers/rating.h"

namespace cheqqers {

/// Board, level and rule switches shared by every game of a batch.
struct GameSetup {
    int size = 5;
    int setup_rows = 1;
    Level level = Level::Classical;
    RuleOptions rules;
};

/// Experiment settings, read from a flat `key = value` file:
///
///   # comment
///   sizes = [4, 5, 6, 7, 8]
///   levels = [0, 1, 2, 3]
///   games = 1000
///   draw_rule = both          # on | off | both
///   agents = ["mcts:800", "random"]
///   seed = 7
///
/// Strings may be bare or double-quoted; lists use brackets.
struct ExperimentConfig {
    std::vector<int> sizes{5};
    std::vector<int> levels{0, 1, 2, 3};
    int games = 100;
    int setup_rows = 1;
    /// Draw-rule settings to run; the self-play experiment reports each.
    std::vector<bool> draw_rules{true};
    std::vector<std::string> agents{"mcts:800", "random"};
    int games_per_agent = 150;
    uint64_t seed = 1;
    int threads = 0;
    int ply_limit = 10000;
    TrueSkillParams trueskill;

    static ExperimentConfig parse(std::string_view text);
    static ExperimentConfig load(const std::string &path);
    void validate() const;
};

struct PlayedGame {
    uint64_t seed = 0;
    Outcome outcome = Outcome::Ongoing;
    int plies = 0;
    /// Hit the ply limit; scored as a draw.
    bool aborted = false;
    std::vector<Move> moves;
};

/// Plays one game. The game generator is seeded with `seed`; the agents are
/// expected to be seeded by the caller (see agent_seed()).
PlayedGame play_game(const GameSetup &setup, Agent &white, Agent &black, uint64_t seed, int ply_limit = 10000);
uint64_t agent_seed(uint64_t game_seed, Color color);
/// Rebuilds the final state from a game seed and its move list.
GameState replay(const GameSetup &setup, uint64_t seed, const std::vector<Move> &moves);

/// Runs fn(0..count-1) on a pool of `threads` workers (0 = hardware).
void parallel_for(int count, int threads, const std::function<void(int)> &fn);

struct SelfplayCell {
    int size = 0;
    int level = 0;
    bool draw_rule = true;
    int games = 0;
    double mean_length = 0;
    double std_length = 0;
    double draw_rate = 0;
    int white_wins = 0;
    int black_wins = 0;
    int draws = 0;
    int aborted = 0;
};

/// Seed of game `index` in a self-play cell; independent of run order.
uint64_t selfplay_game_seed(uint64_t base, int size, int level, bool draw_rule, int index);

/// Random-vs-random games for every (size, level, draw rule) cell. Cells
/// whose key is in `done` are skipped. `on_cell` sees each finished cell.
std::vector<SelfplayCell> run_selfplay(const ExperimentConfig &config,
                                       const std::function<void(const SelfplayCell &)> &on_cell = {},
                                       const std::vector<SelfplayCell> &done = {});
SelfplayCell selfplay_cell(const ExperimentConfig &config, int size, int level, bool draw_rule);

void write_selfplay_header(std::ostream &out);
void write_selfplay_row(std::ostream &out, const SelfplayCell &cell);
std::vector<SelfplayCell> read_selfplay_csv(std::istream &in);
void write_selfplay_gnuplot(std::ostream &out, const std::string &csv_name);

enum class ColorAssignment { AWhite, ABlack, Alternate };

struct MatchupResult {
    std::string agent_a;
    std::string agent_b;
    int size = 0;
    int level = 0;
    int games = 0;
    int wins_a = 0;
    int wins_b = 0;
    int draws = 0;
    int games_a_white = 0;
    int wins_a_white = 0;
    int games_a_black = 0;
    int wins_a_black = 0;
    std::vector<PlayedGame> records;

    double win_rate_a() const {
        return games == 0 ? 0.0 : static_cast<double>(wins_a) / games;
    }
};

MatchupResult run_matchup(const AgentSpec &a, const AgentSpec &b, int n, const GameSetup &setup, uint64_t seed,
                          ColorAssignment colors = ColorAssignment::Alternate, int threads = 0,
                          int ply_limit = 10000);

void write_matchup_header(std::ostream &out);
void write_matchup_row(std::ostream &out, const MatchupResult &result, const std::string &a_color);

struct TournamentGame {
    int white = 0;
    int black = 0;
    PlayedGame game;
};

struct TournamentResult {
    std::vector<std::string> agents;
    std::vector<Rating> ratings;
    std::vector<int> games_played;
    std::vector<TournamentGame> games;
    int size = 0;
    int level = 0;
};

/// Pairs agents uniformly at random (random colors) until every agent has
/// played `games_per_agent` games, then applies rating updates in schedule
/// order.
TournamentResult run_tournament(const std::vector<AgentSpec> &agents, int games_per_agent, const GameSetup &setup,
                                const TrueSkillParams &params, uint64_t seed, int threads = 0,
                                int ply_limit = 10000);

/// (white, black) agent index per game; each agent appears `games_per_agent`
/// times and never plays itself.
std::vector<std::pair<int, int>> tournament_schedule(int agents, int games_per_agent, Rng &rng);

void write_tournament_header(std::ostream &out);
void write_tournament_rows(std::ostream &out, const TournamentResult &result);

}  // namespace cheqqers
