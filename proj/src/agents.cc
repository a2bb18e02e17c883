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

#include "cheqqers/agents.h"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cheqqers {

namespace {

int parse_int(std::string_view s, std::string_view what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument("bad " + std::string(what) + " '" + std::string(s) + "'");
    }
    return value;
}

std::vector<int> signature(const TurnRecord &rec) {
    std::vector<int> sig;
    for (const auto &m : rec.measurements) {
        for (const auto &[sq, bit] : m.bits) {
            sig.push_back(sq * 2 + (bit ? 1 : 0));
        }
    }
    return sig;
}

}  // namespace

AgentSpec AgentSpec::parse(std::string_view text) {
    AgentSpec spec;
    if (text == "random") {
        return spec;
    }
    if (!text.starts_with("mcts:")) {
        throw std::invalid_argument("unknown agent spec '" + std::string(text) + "'");
    }
    spec.kind = Kind::Mcts;
    std::string_view rest = text.substr(5);
    auto colon = rest.find(':');
    spec.mcts.rollouts = parse_int(rest.substr(0, colon), "rollout count");
    if (spec.mcts.rollouts <= 0) {
        throw std::invalid_argument("rollout count must be positive");
    }
    if (colon != std::string_view::npos) {
        std::string_view suffix = rest.substr(colon + 1);
        if (!suffix.starts_with("c=")) {
            throw std::invalid_argument("unknown agent option '" + std::string(suffix) + "'");
        }
        std::string value(suffix.substr(2));
        size_t used = 0;
        try {
            spec.mcts.c = std::stod(value, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != value.size() || value.empty() || !std::isfinite(spec.mcts.c) || spec.mcts.c < 0) {
            throw std::invalid_argument("bad exploration constant '" + value + "'");
        }
    }
    return spec;
}

std::string AgentSpec::to_string() const {
    if (kind == Kind::Random) {
        return "random";
    }
    std::ostringstream out;
    out << "mcts:" << mcts.rollouts;
    if (mcts.c != std::sqrt(2.0)) {
        out << ":c=" << mcts.c;
    }
    return out.str();
}

Move random_move(const GameState &state, Rng &rng) {
    auto moves = legal_moves(state);
    if (moves.empty()) {
        throw std::logic_error("no legal moves: game is over");
    }
    return moves[rng.below(moves.size())];
}

MctsSearch::MctsSearch(const GameState &root, MctsConfig config, Rng &rng)
    : root_state_(root), config_(config), rng_(rng), root_player_(root.to_move()) {
    if (root.outcome != Outcome::Ongoing) {
        throw std::logic_error("cannot search from a finished game");
    }
    nodes_.emplace_back();
}

double MctsSearch::terminal_value(Outcome outcome) const {
    switch (outcome) {
        case Outcome::WhiteWins:
            return root_player_ == Color::White ? 1.0 : 0.0;
        case Outcome::BlackWins:
            return root_player_ == Color::Black ? 1.0 : 0.0;
        default:
            return 0.5;
    }
}

double MctsSearch::rollout(GameState &state, Rng &rng) const {
    int plies = 0;
    while (state.outcome == Outcome::Ongoing) {
        if (plies >= config_.rollout_cap) {
            return 0.5;
        }
        auto moves = legal_moves(state.position, state.level);
        apply_legal_move(state, moves[rng.below(moves.size())], rng);
        plies++;
    }
    return terminal_value(state.outcome);
}

int MctsSearch::select(const Node &node, Color mover) const {
    const double log_parent = std::log(static_cast<double>(node.visits));
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (size_t e = 0; e < node.edges.size(); e++) {
        const Edge &edge = node.edges[e];
        if (edge.visits == 0) {
            return static_cast<int>(e);
        }
        double mean = edge.score / edge.visits;
        if (mover != root_player_) {
            mean = 1.0 - mean;
        }
        double value = mean + config_.c * std::sqrt(log_parent / edge.visits);
        if (value > best_value) {
            best_value = value;
            best = static_cast<int>(e);
        }
    }
    return best;
}

double MctsSearch::iterate() {
    GameState state = root_state_;
    Rng sim_rng(rng_.next());
    std::vector<int> path_nodes{0};
    std::vector<std::pair<int, int>> path_edges;  // (node, edge)
    int current = 0;
    double value = 0.5;

    while (true) {
        if (state.outcome != Outcome::Ongoing) {
            value = terminal_value(state.outcome);
            break;
        }
        if (!nodes_[current].expanded) {
            auto moves = legal_moves(state.position, state.level);
            Node &node = nodes_[current];
            node.expanded = true;
            for (const auto &m : moves) {
                node.edges.push_back(Edge{m, 0, 0.0, {}});
            }
            node.untried.resize(moves.size());
            for (size_t i = 0; i < moves.size(); i++) {
                node.untried[i] = static_cast<int>(moves.size() - 1 - i);
            }
            // Fisher-Yates so untried moves are expanded in random order.
            for (size_t i = node.untried.size(); i > 1; i--) {
                std::swap(node.untried[i - 1], node.untried[rng_.below(i)]);
            }
        }

        int e;
        bool fresh = false;
        {
            Node &node = nodes_[current];
            if (!node.untried.empty()) {
                e = node.untried.back();
                node.untried.pop_back();
                fresh = true;
            } else {
                e = select(node, state.to_move());
            }
        }
        const Move move = nodes_[current].edges[e].move;
        TurnRecord rec = apply_legal_move(state, move, sim_rng);
        auto sig = signature(rec);

        int child = -1;
        for (const auto &[s, index] : nodes_[current].edges[e].children) {
            if (s == sig) {
                child = index;
                break;
            }
        }
        if (child < 0) {
            child = static_cast<int>(nodes_.size());
            nodes_.emplace_back();
            nodes_[current].edges[e].children.emplace_back(std::move(sig), child);
            fresh = true;
        }
        path_edges.emplace_back(current, e);
        path_nodes.push_back(child);
        current = child;

        if (fresh) {
            value = state.outcome != Outcome::Ongoing ? terminal_value(state.outcome) : rollout(state, sim_rng);
            break;
        }
    }

    for (int n : path_nodes) {
        nodes_[n].visits++;
        nodes_[n].score += value;
    }
    for (auto [n, e] : path_edges) {
        nodes_[n].edges[e].visits++;
        nodes_[n].edges[e].score += value;
    }
    return value;
}

void MctsSearch::run() {
    for (int i = 0; i < config_.rollouts; i++) {
        iterate();
    }
}

Move MctsSearch::best_move() {
    const Node &root = nodes_[0];
    if (root.edges.empty()) {
        throw std::logic_error("search has not expanded the root");
    }
    int most = -1;
    std::vector<int> tied;
    for (size_t e = 0; e < root.edges.size(); e++) {
        int v = root.edges[e].visits;
        if (v > most) {
            most = v;
            tied.clear();
        }
        if (v == most) {
            tied.push_back(static_cast<int>(e));
        }
    }
    int pick = tied.size() == 1 ? tied[0] : tied[rng_.below(tied.size())];
    return root.edges[pick].move;
}

Move mcts_move(const GameState &state, const MctsConfig &config, Rng &rng) {
    if (state.outcome != Outcome::Ongoing) {
        throw std::logic_error("no legal moves: game is over");
    }
    auto moves = legal_moves(state);
    if (moves.size() == 1) {
        return moves[0];
    }
    MctsSearch search(state, config, rng);
    search.run();
    return search.best_move();
}

namespace {

class RandomAgent : public Agent {
   public:
    explicit RandomAgent(uint64_t seed) : rng_(seed) {
    }
    Move choose(const GameState &state) override {
        return random_move(state, rng_);
    }
    std::string name() const override {
        return "random";
    }

   private:
    Rng rng_;
};

class MctsAgent : public Agent {
   public:
    MctsAgent(AgentSpec spec, uint64_t seed) : spec_(std::move(spec)), rng_(seed) {
    }
    Move choose(const GameState &state) override {
        return mcts_move(state, spec_.mcts, rng_);
    }
    std::string name() const override {
        return spec_.to_string();
    }

   private:
    AgentSpec spec_;
    Rng rng_;
};

}  // namespace

std::unique_ptr<Agent> make_agent(const AgentSpec &spec, uint64_t seed) {
    if (spec.kind == AgentSpec::Kind::Random) {
        return std::make_unique<RandomAgent>(seed);
    }
    return std::make_unique<MctsAgent>(spec, seed);
}

}  // namespace cheqqers
