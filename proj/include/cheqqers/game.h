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
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cheqqers/qstate.h"
#include "cheqqers/rng.h"
#include "cheqqers/rules.h"

namespace cheqqers {

enum class Outcome : uint8_t { Ongoing, WhiteWins, BlackWins, Draw };

const char *to_string(Outcome outcome);
Outcome outcome_from_string(const std::string &s);

struct RuleOptions {
    /// Draw once more than `draw_plies` plies pass without a successful capture.
    bool draw_rule = true;
    int draw_plies = 40;

    bool operator==(const RuleOptions &other) const = default;
};

struct GameState {
    Position position;
    Level level = Level::Classical;
    RuleOptions rules;
    int no_capture_plies = 0;
    int ply_count = 0;
    Outcome outcome = Outcome::Ongoing;
    /// Game generator; measurement sampling draws from it unless the caller
    /// injects another one.
    Rng rng;

    const BoardGeometry &geometry() const {
        return *position.geometry;
    }
    Color to_move() const {
        return position.to_move;
    }

    bool operator==(const GameState &other) const = default;
};

/// One gate or measurement applied to the occupancy state during a turn.
struct QuantumOp {
    enum class Kind : uint8_t { Move, Split, Merge, Capture, Measure, Clear };
    Kind kind;
    /// Gate squares in gate argument order (Move: source, target; Split:
    /// source, t1, t2; Merge: target, s1, s2; Capture: defender, attacker,
    /// landing; Clear: square).
    std::array<Square, 3> squares{-1, -1, -1};
    MeasurementOutcome measured;
};

struct TurnRecord {
    Color mover = Color::White;
    Move move;
    /// Set when a capture attempt resolved as a pass.
    bool passed = false;
    PassReason pass_reason = PassReason::None;
    std::vector<MeasurementOutcome> measurements;
    std::vector<int> captured;
    std::vector<int> crowned;
    std::vector<QuantumOp> ops;
    /// The mover must continue capturing from the landing square.
    bool chain_continues = false;
};

class IllegalMoveError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
   public:
    ParseError(const std::string &location, const std::string &message)
        : std::runtime_error("parse error at " + location + ": " + message), location_(location) {
    }
    const std::string &location() const {
        return location_;
    }

   private:
    std::string location_;
};

GameState new_game(std::shared_ptr<const BoardGeometry> geometry, Level level, uint64_t seed,
                   RuleOptions rules = {});
GameState new_game(int side, int setup_rows, Level level, uint64_t seed, RuleOptions rules = {});

/// Game around an arbitrary position (tests, analysis).
GameState game_from_position(Position position, Level level, uint64_t seed, RuleOptions rules = {});

std::vector<Move> legal_moves(const GameState &state);

/// Validates and applies a move using the game's own generator. Throws
/// IllegalMoveError and leaves the state untouched for illegal moves.
TurnRecord step(GameState &state, const Move &move);
/// Same, with an injected generator for measurement sampling.
TurnRecord step(GameState &state, const Move &move, Rng &rng);
/// Applies a move already known to be legal (no validation).
TurnRecord apply_legal_move(GameState &state, const Move &move, Rng &rng);

Outcome evaluate_outcome(const GameState &state);

/// Bit-exact text form (JSON) of the full state, including amplitudes and
/// the generator's seed and position.
std::string serialize(const GameState &state);
/// Throws ParseError on malformed input; never returns a partial state.
GameState deserialize(std::string_view text);

/// Display schema: geometry, level, toMove, outcome, noCapturePlies, pieces
/// with per-square probabilities, and entanglement groups. Probabilities are
/// rounded to 4 decimals unless `exact` is set.
nlohmann::json to_view_json(const GameState &state, bool exact = false);
nlohmann::json to_json(const TurnRecord &record);
nlohmann::json to_json(const MeasurementOutcome &outcome);

/// Groups of >= 2 pieces whose supports share an entangled component.
std::vector<std::vector<int>> entanglement_groups(const Position &position);

}  // namespace cheqqers
