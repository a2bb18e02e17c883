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

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cheqqers/game.h"
#include "cheqqers/rng.h"

namespace cheqqers {

struct MctsConfig {
    int rollouts = 800;
    double c = std::sqrt(2.0);
    /// Simulation plies before a rollout is scored as a draw.
    int rollout_cap = 200;
};

/// Parsed agent spec string: "random" or "mcts:<rollouts>[:c=<float>]".
struct AgentSpec {
    enum class Kind { Random, Mcts };
    Kind kind = Kind::Random;
    MctsConfig mcts;

    static AgentSpec parse(std::string_view text);
    std::string to_string() const;
};

/// Uniform choice over legal_moves. Throws std::logic_error at terminal states.
Move random_move(const GameState &state, Rng &rng);

/// UCT search over the stochastic game tree.
///
/// Decision nodes hold one edge per legal move; an edge fans out into chance
/// children keyed by the measurement outcomes its move produced, and every
/// traversal re-applies the move with fresh randomness. Scores are stored
/// from the root player's viewpoint (win 1, draw 0.5, loss 0); selection at
/// opponent nodes uses 1 - mean.
class MctsSearch {
   public:
    struct Edge {
        Move move;
        int visits = 0;
        double score = 0;
        /// (outcome signature, child node index)
        std::vector<std::pair<std::vector<int>, int>> children;
    };
    struct Node {
        int visits = 0;
        double score = 0;
        bool expanded = false;
        std::vector<Edge> edges;
        std::vector<int> untried;
    };

    MctsSearch(const GameState &root, MctsConfig config, Rng &rng);

    /// One select/expand/simulate/backpropagate pass; returns the simulation
    /// result credited to the root player.
    double iterate();
    void run();
    /// Most-visited root move, ties broken with the search generator.
    Move best_move();

    const Node &root() const {
        return nodes_[0];
    }
    size_t node_count() const {
        return nodes_.size();
    }

   private:
    double rollout(GameState &state, Rng &rng) const;
    double terminal_value(Outcome outcome) const;
    int select(const Node &node, Color mover) const;

    const GameState &root_state_;
    MctsConfig config_;
    Rng &rng_;
    Color root_player_;
    std::vector<Node> nodes_;
};

/// Runs config.rollouts iterations from `state` and returns the chosen move.
/// Throws std::logic_error at terminal states. Never mutates `state`.
Move mcts_move(const GameState &state, const MctsConfig &config, Rng &rng);

class Agent {
   public:
    virtual ~Agent() = default;
    virtual Move choose(const GameState &state) = 0;
    virtual std::string name() const = 0;
};

std::unique_ptr<Agent> make_agent(const AgentSpec &spec, uint64_t seed);

}  // namespace cheqqers
