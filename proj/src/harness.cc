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

#include "cheqqers/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace cheqqers {

namespace {

std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string unquote(const std::string &s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string> split_list(const std::string &value, int line) {
    if (value.size() < 2 || value.front() != '[' || value.back() != ']')
        throw ParseError("line " + std::to_string(line), "expected [list]");
    std::vector<std::string> items;
    std::string body = value.substr(1, value.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(unquote(item));
    }
    return items;
}

long long to_integer(const std::string &s, int line) {
    try {
        size_t used = 0;
        long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception &) {
        throw ParseError("line " + std::to_string(line), "expected integer, got '" + s + "'");
    }
}

double to_real(const std::string &s, int line) {
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception &) {
        throw ParseError("line " + std::to_string(line), "expected number, got '" + s + "'");
    }
}

std::vector<int> to_int_list(const std::string &value, int line) {
    std::vector<int> out;
    for (const auto &item : split_list(value, line)) out.push_back(static_cast<int>(to_integer(item, line)));
    return out;
}

double mean_of(const std::vector<int> &xs) {
    if (xs.empty()) return 0;
    double sum = 0;
    for (int x : xs) sum += x;
    return sum / xs.size();
}

double std_of(const std::vector<int> &xs) {
    if (xs.empty()) return 0;
    double m = mean_of(xs);
    double acc = 0;
    for (int x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / xs.size());
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
    ExperimentConfig config;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        size_t hash = std::string::npos;
        bool quoted = false;
        for (size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] == '"') quoted = !quoted;
            if (raw[i] == '#' && !quoted) {
                hash = i;
                break;
            }
        }
        std::string content = trim(std::string_view(raw).substr(0, hash));
        if (content.empty() || content.front() == '[') {
            // blank line or table header; tables are flattened
            if (!content.empty() && content.back() != ']')
                throw ParseError("line " + std::to_string(line), "malformed table header");
            continue;
        }
        size_t eq = content.find('=');
        if (eq == std::string::npos) throw ParseError("line " + std::to_string(line), "expected key = value");
        std::string key = trim(std::string_view(content).substr(0, eq));
        std::string value = trim(std::string_view(content).substr(eq + 1));
        if (key == "sizes") {
            config.sizes = to_int_list(value, line);
        } else if (key == "size") {
            config.sizes = {static_cast<int>(to_integer(value, line))};
        } else if (key == "levels") {
            config.levels = to_int_list(value, line);
        } else if (key == "level") {
            config.levels = {static_cast<int>(to_integer(value, line))};
        } else if (key == "games") {
            config.games = static_cast<int>(to_integer(value, line));
        } else if (key == "setup_rows") {
            config.setup_rows = static_cast<int>(to_integer(value, line));
        } else if (key == "draw_rule") {
            std::string v = unquote(value);
            if (v == "on" || v == "true") {
                config.draw_rules = {true};
            } else if (v == "off" || v == "false") {
                config.draw_rules = {false};
            } else if (v == "both") {
                config.draw_rules = {true, false};
            } else {
                throw ParseError("line " + std::to_string(line), "draw_rule must be on, off or both");
            }
        } else if (key == "agents") {
            config.agents = split_list(value, line);
        } else if (key == "games_per_agent") {
            config.games_per_agent = static_cast<int>(to_integer(value, line));
        } else if (key == "seed") {
            config.seed = static_cast<uint64_t>(to_integer(value, line));
        } else if (key == "threads") {
            config.threads = static_cast<int>(to_integer(value, line));
        } else if (key == "ply_limit") {
            config.ply_limit = static_cast<int>(to_integer(value, line));
        } else if (key == "beta") {
            config.trueskill.beta = to_real(value, line);
        } else if (key == "tau") {
            config.trueskill.tau = to_real(value, line);
        } else if (key == "draw_probability") {
            config.trueskill.draw_probability = to_real(value, line);
        } else {
            throw ParseError("line " + std::to_string(line), "unknown key '" + key + "'");
        }
    }
    config.validate();
    return config;
}

ExperimentConfig ExperimentConfig::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void ExperimentConfig::validate() const {
    if (sizes.empty() || levels.empty()) throw std::invalid_argument("sizes and levels must be non-empty");
    for (int s : sizes)
        if (s < 4 || s > 8) throw std::invalid_argument("board size must be in 4..8: " + std::to_string(s));
    for (int l : levels) level_from_int(l);
    if (games < 1) throw std::invalid_argument("games must be at least 1");
    if (games_per_agent < 1) throw std::invalid_argument("games_per_agent must be at least 1");
    if (setup_rows < 1) throw std::invalid_argument("setup_rows must be at least 1");
    if (ply_limit <= 0) throw std::invalid_argument("ply_limit must be positive");
    if (draw_rules.empty()) throw std::invalid_argument("no draw rule selected");
    for (const auto &a : agents) AgentSpec::parse(a);
}

uint64_t agent_seed(uint64_t game_seed, Color color) {
    return derive_seed(game_seed, color == Color::White ? 1 : 2);
}

PlayedGame play_game(const GameSetup &setup, Agent &white, Agent &black, uint64_t seed, int ply_limit) {
    GameState state = new_game(setup.size, setup.setup_rows, setup.level, seed, setup.rules);
    PlayedGame result;
    result.seed = seed;
    while (state.outcome == Outcome::Ongoing) {
        if (result.plies >= ply_limit) {
            result.aborted = true;
            std::cerr << "warning: game " << seed << " aborted after " << ply_limit << " plies (size "
                      << setup.size << ", level " << to_int(setup.level) << "), scored as a draw\n";
            break;
        }
        Agent &mover = state.to_move() == Color::White ? white : black;
        Move move = mover.choose(state);
        step(state, move);
        result.moves.push_back(move);
        ++result.plies;
    }
    result.outcome = result.aborted ? Outcome::Draw : state.outcome;
    return result;
}

GameState replay(const GameSetup &setup, uint64_t seed, const std::vector<Move> &moves) {
    GameState state = new_game(setup.size, setup.setup_rows, setup.level, seed, setup.rules);
    for (const auto &m : moves) step(state, m);
    return state;
}

void parallel_for(int count, int threads, const std::function<void(int)> &fn) {
    if (count <= 0) return;
    int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, count);
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto &t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

uint64_t selfplay_game_seed(uint64_t base, int size, int level, bool draw_rule, int index) {
    uint64_t cell = static_cast<uint64_t>(size) * 100 + static_cast<uint64_t>(level) * 10 + (draw_rule ? 1 : 0);
    return derive_seed(derive_seed(base, cell), static_cast<uint64_t>(index));
}

SelfplayCell selfplay_cell(const ExperimentConfig &config, int size, int level, bool draw_rule) {
    GameSetup setup;
    setup.size = size;
    setup.setup_rows = config.setup_rows;
    setup.level = level_from_int(level);
    setup.rules.draw_rule = draw_rule;
    AgentSpec random_spec;
    std::vector<int> lengths(config.games);
    std::vector<Outcome> outcomes(config.games);
    std::vector<char> aborted(config.games);
    parallel_for(config.games, config.threads, [&](int i) {
        uint64_t seed = selfplay_game_seed(config.seed, size, level, draw_rule, i);
        auto white = make_agent(random_spec, agent_seed(seed, Color::White));
        auto black = make_agent(random_spec, agent_seed(seed, Color::Black));
        PlayedGame g = play_game(setup, *white, *black, seed, config.ply_limit);
        lengths[i] = g.plies;
        outcomes[i] = g.outcome;
        aborted[i] = g.aborted;
    });
    SelfplayCell cell;
    cell.size = size;
    cell.level = level;
    cell.draw_rule = draw_rule;
    cell.games = config.games;
    cell.mean_length = mean_of(lengths);
    cell.std_length = std_of(lengths);
    for (int i = 0; i < config.games; ++i) {
        if (outcomes[i] == Outcome::WhiteWins) ++cell.white_wins;
        if (outcomes[i] == Outcome::BlackWins) ++cell.black_wins;
        if (outcomes[i] == Outcome::Draw) ++cell.draws;
        if (aborted[i]) ++cell.aborted;
    }
    cell.draw_rate = config.games == 0 ? 0.0 : static_cast<double>(cell.draws) / config.games;
    return cell;
}

std::vector<SelfplayCell> run_selfplay(const ExperimentConfig &config,
                                       const std::function<void(const SelfplayCell &)> &on_cell,
                                       const std::vector<SelfplayCell> &done) {
    std::vector<SelfplayCell> cells;
    for (bool rule : config.draw_rules) {
        for (int level : config.levels) {
            for (int size : config.sizes) {
                auto it = std::find_if(done.begin(), done.end(), [&](const SelfplayCell &c) {
                    return c.size == size && c.level == level && c.draw_rule == rule && c.games == config.games;
                });
                if (it != done.end()) {
                    cells.push_back(*it);
                    continue;
                }
                cells.push_back(selfplay_cell(config, size, level, rule));
                if (on_cell) on_cell(cells.back());
            }
        }
    }
    return cells;
}

void write_selfplay_header(std::ostream &out) {
    out << "size,level,draw_rule,games,mean_length,std_length,draw_rate,white_wins,black_wins,draws,aborted\n";
}

void write_selfplay_row(std::ostream &out, const SelfplayCell &c) {
    out << c.size << ',' << c.level << ',' << (c.draw_rule ? "on" : "off") << ',' << c.games << ','
        << c.mean_length << ',' << c.std_length << ',' << c.draw_rate << ',' << c.white_wins << ','
        << c.black_wins << ',' << c.draws << ',' << c.aborted << '\n';
}

std::vector<SelfplayCell> read_selfplay_csv(std::istream &in) {
    std::vector<SelfplayCell> cells;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (trim(line).empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() != 11) throw ParseError("csv", "expected 11 fields: " + line);
        SelfplayCell c;
        c.size = std::stoi(f[0]);
        c.level = std::stoi(f[1]);
        c.draw_rule = f[2] == "on";
        c.games = std::stoi(f[3]);
        c.mean_length = std::stod(f[4]);
        c.std_length = std::stod(f[5]);
        c.draw_rate = std::stod(f[6]);
        c.white_wins = std::stoi(f[7]);
        c.black_wins = std::stoi(f[8]);
        c.draws = std::stoi(f[9]);
        c.aborted = std::stoi(f[10]);
        cells.push_back(c);
    }
    return cells;
}

void write_selfplay_gnuplot(std::ostream &out, const std::string &csv_name) {
    out << "set datafile separator ','\n"
           "set terminal pngcairo size 1000,420\n"
           "set output 'selfplay.png'\n"
           "set multiplot layout 1,2\n"
           "set xlabel 'board size'\n"
           "set ylabel 'mean game length (plies)'\n"
           "set key left top\n"
           "plot for [l=0:3] '"
        << csv_name
        << "' using ($2==l && strcol(3) eq 'on' ? $1 : 1/0):5:6 with yerrorlines title sprintf('level %d', l)\n"
           "set ylabel 'draw rate'\n"
           "plot for [l=0:3] '"
        << csv_name
        << "' using ($2==l && strcol(3) eq 'on' ? $1 : 1/0):7 with linespoints title sprintf('level %d', l)\n"
           "unset multiplot\n";
}

MatchupResult run_matchup(const AgentSpec &a, const AgentSpec &b, int n, const GameSetup &setup, uint64_t seed,
                          ColorAssignment colors, int threads, int ply_limit) {
    MatchupResult result;
    result.agent_a = a.to_string();
    result.agent_b = b.to_string();
    result.size = setup.size;
    result.level = to_int(setup.level);
    result.games = n;
    result.records.resize(n);
    std::vector<char> a_white(n);
    for (int i = 0; i < n; ++i) {
        a_white[i] = colors == ColorAssignment::AWhite || (colors == ColorAssignment::Alternate && i % 2 == 0);
    }
    parallel_for(n, threads, [&](int i) {
        uint64_t game_seed = derive_seed(seed, static_cast<uint64_t>(i));
        const AgentSpec &ws = a_white[i] ? a : b;
        const AgentSpec &bs = a_white[i] ? b : a;
        auto white = make_agent(ws, agent_seed(game_seed, Color::White));
        auto black = make_agent(bs, agent_seed(game_seed, Color::Black));
        result.records[i] = play_game(setup, *white, *black, game_seed, ply_limit);
    });
    for (int i = 0; i < n; ++i) {
        Outcome o = result.records[i].outcome;
        bool a_won = (o == Outcome::WhiteWins && a_white[i]) || (o == Outcome::BlackWins && !a_white[i]);
        bool b_won = (o == Outcome::WhiteWins && !a_white[i]) || (o == Outcome::BlackWins && a_white[i]);
        if (a_won) ++result.wins_a;
        if (b_won) ++result.wins_b;
        if (o == Outcome::Draw) ++result.draws;
        if (a_white[i]) {
            ++result.games_a_white;
            result.wins_a_white += a_won;
        } else {
            ++result.games_a_black;
            result.wins_a_black += a_won;
        }
    }
    return result;
}

void write_matchup_header(std::ostream &out) {
    out << "agent_a,agent_b,level,board,a_color,games,a_wins,b_wins,draws,a_win_rate\n";
}

void write_matchup_row(std::ostream &out, const MatchupResult &r, const std::string &a_color) {
    out << r.agent_a << ',' << r.agent_b << ',' << r.level << ',' << r.size << ',' << a_color << ',' << r.games
        << ',' << r.wins_a << ',' << r.wins_b << ',' << r.draws << ',' << r.win_rate_a() << '\n';
}

std::vector<std::pair<int, int>> tournament_schedule(int agents, int games_per_agent, Rng &rng) {
    if (agents < 2) throw std::invalid_argument("a tournament needs at least two agents");
    if (games_per_agent < 0) throw std::invalid_argument("games_per_agent must be non-negative");
    if (static_cast<long long>(agents) * games_per_agent % 2 != 0)
        throw std::invalid_argument("agents * games_per_agent must be even");
    std::vector<int> slots;
    for (int a = 0; a < agents; ++a) slots.insert(slots.end(), games_per_agent, a);
    for (size_t i = slots.size(); i > 1; --i) std::swap(slots[i - 1], slots[rng.below(i)]);
    // Repair self-pairings by swapping with a slot from another pair.
    size_t pairs = slots.size() / 2;
    for (size_t p = 0; p < pairs; ++p) {
        if (slots[2 * p] != slots[2 * p + 1]) continue;
        bool fixed = false;
        for (size_t q = 0; q < pairs && !fixed; ++q) {
            if (q == p) continue;
            for (size_t k = 0; k < 2 && !fixed; ++k) {
                size_t j = 2 * q + k;
                int other = slots[2 * q + 1 - k];
                if (slots[j] != slots[2 * p] && other != slots[2 * p + 1]) {
                    std::swap(slots[2 * p], slots[j]);
                    fixed = true;
                }
            }
        }
        if (!fixed) throw std::invalid_argument("cannot schedule: one agent needs more than half the games");
    }
    std::vector<std::pair<int, int>> schedule;
    for (size_t p = 0; p < pairs; ++p) {
        int x = slots[2 * p];
        int y = slots[2 * p + 1];
        if (rng.below(2) == 0) std::swap(x, y);
        schedule.emplace_back(x, y);
    }
    return schedule;
}

TournamentResult run_tournament(const std::vector<AgentSpec> &agents, int games_per_agent, const GameSetup &setup,
                                const TrueSkillParams &params, uint64_t seed, int threads, int ply_limit) {
    Rng rng(derive_seed(seed, 0));
    auto schedule = tournament_schedule(static_cast<int>(agents.size()), games_per_agent, rng);
    TournamentResult result;
    for (const auto &a : agents) result.agents.push_back(a.to_string());
    result.ratings.assign(agents.size(), Rating{});
    result.games_played.assign(agents.size(), 0);
    result.size = setup.size;
    result.level = to_int(setup.level);
    result.games.resize(schedule.size());
    parallel_for(static_cast<int>(schedule.size()), threads, [&](int i) {
        auto [w, b] = schedule[i];
        uint64_t game_seed = derive_seed(seed, static_cast<uint64_t>(i) + 1);
        auto white = make_agent(agents[w], agent_seed(game_seed, Color::White));
        auto black = make_agent(agents[b], agent_seed(game_seed, Color::Black));
        result.games[i] = {w, b, play_game(setup, *white, *black, game_seed, ply_limit)};
    });
    for (const auto &g : result.games) {
        GameResult r = g.game.outcome == Outcome::WhiteWins   ? GameResult::AWins
                       : g.game.outcome == Outcome::BlackWins ? GameResult::BWins
                                                              : GameResult::Draw;
        auto [nw, nb] = trueskill_update(result.ratings[g.white], result.ratings[g.black], r, params);
        result.ratings[g.white] = nw;
        result.ratings[g.black] = nb;
        ++result.games_played[g.white];
        ++result.games_played[g.black];
    }
    return result;
}

void write_tournament_header(std::ostream &out) {
    out << "agent,level,board,games,mu,sigma\n";
}

void write_tournament_rows(std::ostream &out, const TournamentResult &r) {
    for (size_t i = 0; i < r.agents.size(); ++i) {
        out << r.agents[i] << ',' << r.level << ',' << r.size << ',' << r.games_played[i] << ','
            << r.ratings[i].mu << ',' << r.ratings[i].sigma << '\n';
    }
}

}  // namespace cheqqers
