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

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "cheqqers/qstate.h"

namespace cheqqers {

enum class Color : uint8_t { White = 0, Black = 1 };

inline Color opponent(Color c) {
    return c == Color::White ? Color::Black : Color::White;
}
const char *to_string(Color c);
Color color_from_string(const std::string &s);

/// Quantumness level. Each level's legal-move set contains the previous one's.
enum class Level : uint8_t {
    Classical = 0,
    Superposition = 1,
    Entanglement = 2,
    Interference = 3,
};

Level level_from_int(int level);
inline int to_int(Level level) {
    return static_cast<int>(level);
}

struct Coord {
    int row;
    int col;
    bool operator==(const Coord &other) const = default;
};

/// Diagonal directions, as (row delta, col delta) from White's side.
inline constexpr std::array<Coord, 4> kDirections{{{+1, -1}, {+1, +1}, {-1, -1}, {-1, +1}}};

/// Square board whose playable squares are the dark squares, (row + col)
/// even, so each player has a dark square at their bottom-left. Indices run
/// row-major from White's bottom-left.
class BoardGeometry {
   public:
    static constexpr int kMinSide = 4;
    static constexpr int kMaxSide = 10;

    BoardGeometry(int side, int setup_rows);

    int side() const {
        return side_;
    }
    int setup_rows() const {
        return setup_rows_;
    }
    int num_squares() const {
        return static_cast<int>(coords_.size());
    }

    Coord coord(Square sq) const;
    /// Playable square at (row, col), or -1 when off-board or light.
    Square square_at(int row, int col) const;

    /// Diagonal neighbour in direction d (index into kDirections), or -1.
    Square neighbor(Square sq, int dir) const {
        return neighbor_[sq][dir];
    }
    /// Square two steps away in direction d, or -1.
    Square jump(Square sq, int dir) const {
        return jump_[sq][dir];
    }

    bool is_crowning_square(Square sq, Color c) const;
    /// Number of playable squares in the given row.
    int row_capacity(int row) const;

    bool operator==(const BoardGeometry &other) const {
        return side_ == other.side_ && setup_rows_ == other.setup_rows_;
    }

   private:
    int side_;
    int setup_rows_;
    std::vector<Coord> coords_;
    std::vector<std::array<Square, 4>> neighbor_;
    std::vector<std::array<Square, 4>> jump_;
};

/// Whether a piece of this color and type may move in direction d.
bool direction_allowed(Color color, bool crowned, int dir);

struct Piece {
    int id = -1;
    Color color = Color::White;
    bool crowned = false;
    /// Id of the original piece; merges need matching lineage.
    int lineage = -1;
    bool alive = true;

    bool operator==(const Piece &other) const = default;
};

enum class MoveKind : uint8_t { Step, Capture, Split, Merge, Pass };
enum class PassReason : uint8_t { None, AttackerAbsent, DefenderAbsent };

const char *to_string(MoveKind kind);
const char *to_string(PassReason reason);

/// Squares are stored in the field order of each kind:
///   Step {from, to}, Capture {from, over, landing}, Split {from, to1, to2},
///   Merge {from1, from2, to}, Pass {}.
struct Move {
    MoveKind kind = MoveKind::Pass;
    int piece = -1;
    std::array<Square, 3> squares{-1, -1, -1};
    PassReason reason = PassReason::None;

    static Move step(int piece, Square from, Square to);
    static Move capture(int piece, Square from, Square over, Square landing);
    static Move split(int piece, Square from, Square to1, Square to2);
    static Move merge(int piece, Square from1, Square from2, Square to);
    static Move pass(int piece, PassReason reason);

    int num_squares() const;
    std::string to_string() const;

    auto operator<=>(const Move &other) const = default;
};

nlohmann::json to_json(const Move &move);
Move move_from_json(const nlohmann::json &j);

/// Board contents independent of turn counters: pieces, per-square
/// ownership of occupancy support, and the quantum occupancy state.
struct Position {
    std::shared_ptr<const BoardGeometry> geometry;
    std::vector<Piece> pieces;
    /// Piece owning each square's support, or -1 when the square is empty.
    std::vector<int> piece_at;
    QuantumBoardState qstate;
    Color to_move = Color::White;
    /// Landing square of a capture that must be continued, or -1.
    Square chain_square = -1;

    std::vector<Square> support(int piece) const;
    double total_probability(int piece) const;
    int alive_count(Color c) const;

    bool operator==(const Position &other) const;
};

/// White fills the lowest setup_rows rows, Black the mirrored top rows;
/// White to move.
Position initial_position(std::shared_ptr<const BoardGeometry> geometry);

/// Piece placement used to build arbitrary classical positions.
struct Placement {
    Square square;
    Color color;
    bool crowned = false;
};
Position position_from_placements(std::shared_ptr<const BoardGeometry> geometry,
                                  const std::vector<Placement> &placements, Color to_move);

/// True iff the attacker has support at `from`, an opposing piece has support
/// at `over`, `landing` carries no support, and the direction is legal for
/// the attacker.
bool capture_legality(const Position &position, const Move &attempt);

/// Capture attempts available to the piece whose support includes `from`.
std::vector<Move> captures_from(const Position &position, Square from);

std::vector<Move> legal_moves(const Position &position, Level level);
bool has_legal_move(const Position &position, Level level);

}  // namespace cheqqers
