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

#include "cheqqers/rules.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cheqqers {

const char *to_string(Color c) {
    return c == Color::White ? "white" : "black";
}

Color color_from_string(const std::string &s) {
    if (s == "white") {
        return Color::White;
    }
    if (s == "black") {
        return Color::Black;
    }
    throw std::invalid_argument("unknown color '" + s + "'");
}

Level level_from_int(int level) {
    if (level < 0 || level > 3) {
        throw std::invalid_argument("quantumness level must be 0..3, got " + std::to_string(level));
    }
    return static_cast<Level>(level);
}

BoardGeometry::BoardGeometry(int side, int setup_rows) : side_(side), setup_rows_(setup_rows) {
    if (side < kMinSide || side > kMaxSide) {
        throw std::invalid_argument("board side must be in [" + std::to_string(kMinSide) + ", " +
                                    std::to_string(kMaxSide) + "], got " + std::to_string(side));
    }
    if (setup_rows < 1 || 2 * setup_rows > side) {
        throw std::invalid_argument("setup rows must be in [1, side/2], got " + std::to_string(setup_rows));
    }
    for (int r = 0; r < side; r++) {
        for (int c = 0; c < side; c++) {
            if ((r + c) % 2 == 0) {
                coords_.push_back({r, c});
            }
        }
    }
    int per_side = 0;
    for (int r = 0; r < setup_rows; r++) {
        per_side += row_capacity(r);
    }
    if (2 * per_side > num_squares()) {
        throw std::invalid_argument("setup does not fit on the board");
    }
    neighbor_.resize(coords_.size());
    jump_.resize(coords_.size());
    for (Square sq = 0; sq < num_squares(); sq++) {
        for (int d = 0; d < 4; d++) {
            auto [r, c] = coords_[sq];
            neighbor_[sq][d] = square_at(r + kDirections[d].row, c + kDirections[d].col);
            jump_[sq][d] = square_at(r + 2 * kDirections[d].row, c + 2 * kDirections[d].col);
        }
    }
}

Coord BoardGeometry::coord(Square sq) const {
    if (sq < 0 || sq >= num_squares()) {
        throw std::out_of_range("square " + std::to_string(sq) + " is outside the board");
    }
    return coords_[sq];
}

Square BoardGeometry::square_at(int row, int col) const {
    if (row < 0 || row >= side_ || col < 0 || col >= side_ || (row + col) % 2 != 0) {
        return -1;
    }
    // Rows alternate between starting at column 0 and column 1.
    int before = 0;
    for (int r = 0; r < row; r++) {
        before += row_capacity(r);
    }
    return before + col / 2;
}

bool BoardGeometry::is_crowning_square(Square sq, Color c) const {
    int row = coord(sq).row;
    return c == Color::White ? row == side_ - 1 : row == 0;
}

int BoardGeometry::row_capacity(int row) const {
    return row % 2 == 0 ? (side_ + 1) / 2 : side_ / 2;
}

bool direction_allowed(Color color, bool crowned, int dir) {
    if (crowned) {
        return true;
    }
    bool forward = kDirections[dir].row > 0;
    return color == Color::White ? forward : !forward;
}

const char *to_string(MoveKind kind) {
    switch (kind) {
        case MoveKind::Step:
            return "step";
        case MoveKind::Capture:
            return "capture";
        case MoveKind::Split:
            return "split";
        case MoveKind::Merge:
            return "merge";
        case MoveKind::Pass:
            return "pass";
    }
    return "?";
}

const char *to_string(PassReason reason) {
    switch (reason) {
        case PassReason::None:
            return "none";
        case PassReason::AttackerAbsent:
            return "attacker_absent";
        case PassReason::DefenderAbsent:
            return "defender_absent";
    }
    return "?";
}

Move Move::step(int piece, Square from, Square to) {
    return Move{MoveKind::Step, piece, {from, to, -1}};
}

Move Move::capture(int piece, Square from, Square over, Square landing) {
    return Move{MoveKind::Capture, piece, {from, over, landing}};
}

Move Move::split(int piece, Square from, Square to1, Square to2) {
    return Move{MoveKind::Split, piece, {from, to1, to2}};
}

Move Move::merge(int piece, Square from1, Square from2, Square to) {
    return Move{MoveKind::Merge, piece, {from1, from2, to}};
}

Move Move::pass(int piece, PassReason reason) {
    return Move{MoveKind::Pass, piece, {-1, -1, -1}, reason};
}

int Move::num_squares() const {
    switch (kind) {
        case MoveKind::Step:
            return 2;
        case MoveKind::Capture:
        case MoveKind::Split:
        case MoveKind::Merge:
            return 3;
        case MoveKind::Pass:
            return 0;
    }
    return 0;
}

std::string Move::to_string() const {
    std::ostringstream out;
    out << cheqqers::to_string(kind) << " #" << piece;
    for (int i = 0; i < num_squares(); i++) {
        out << (i == 0 ? " " : ",") << squares[i];
    }
    if (kind == MoveKind::Pass) {
        out << " (" << cheqqers::to_string(reason) << ")";
    }
    return out.str();
}

nlohmann::json to_json(const Move &move) {
    nlohmann::json squares = nlohmann::json::array();
    for (int i = 0; i < move.num_squares(); i++) {
        squares.push_back(move.squares[i]);
    }
    nlohmann::json j{{"type", to_string(move.kind)}, {"piece", move.piece}, {"squares", squares}};
    if (move.kind == MoveKind::Pass) {
        j["reason"] = to_string(move.reason);
    }
    return j;
}

Move move_from_json(const nlohmann::json &j) {
    const auto type = j.at("type").get<std::string>();
    Move m;
    if (type == "step") {
        m.kind = MoveKind::Step;
    } else if (type == "capture") {
        m.kind = MoveKind::Capture;
    } else if (type == "split") {
        m.kind = MoveKind::Split;
    } else if (type == "merge") {
        m.kind = MoveKind::Merge;
    } else if (type == "pass") {
        m.kind = MoveKind::Pass;
    } else {
        throw std::invalid_argument("unknown move type '" + type + "'");
    }
    m.piece = j.at("piece").get<int>();
    const auto squares = j.at("squares").get<std::vector<Square>>();
    if (static_cast<int>(squares.size()) != m.num_squares()) {
        throw std::invalid_argument("move '" + type + "' needs " + std::to_string(m.num_squares()) + " squares");
    }
    std::copy(squares.begin(), squares.end(), m.squares.begin());
    if (m.kind == MoveKind::Pass && j.contains("reason")) {
        const auto reason = j.at("reason").get<std::string>();
        m.reason = reason == "attacker_absent"   ? PassReason::AttackerAbsent
                   : reason == "defender_absent" ? PassReason::DefenderAbsent
                                                 : PassReason::None;
    }
    return m;
}

std::vector<Square> Position::support(int piece) const {
    std::vector<Square> out;
    for (Square sq = 0; sq < static_cast<Square>(piece_at.size()); sq++) {
        if (piece_at[sq] == piece) {
            out.push_back(sq);
        }
    }
    return out;
}

double Position::total_probability(int piece) const {
    double total = 0;
    for (Square sq : support(piece)) {
        total += qstate.marginal(sq);
    }
    return total;
}

int Position::alive_count(Color c) const {
    return static_cast<int>(
        std::count_if(pieces.begin(), pieces.end(), [&](const Piece &p) { return p.alive && p.color == c; }));
}

bool Position::operator==(const Position &other) const {
    bool same_geometry = (geometry == nullptr) == (other.geometry == nullptr) &&
                         (geometry == nullptr || *geometry == *other.geometry);
    return same_geometry && pieces == other.pieces && piece_at == other.piece_at && qstate == other.qstate &&
           to_move == other.to_move && chain_square == other.chain_square;
}

Position initial_position(std::shared_ptr<const BoardGeometry> geometry) {
    const int side = geometry->side();
    const int rows = geometry->setup_rows();
    std::vector<Placement> placements;
    for (int r = 0; r < rows; r++) {
        for (int c = 0; c < side; c++) {
            Square sq = geometry->square_at(r, c);
            if (sq >= 0) {
                placements.push_back({sq, Color::White});
            }
        }
    }
    for (int r = side - rows; r < side; r++) {
        for (int c = 0; c < side; c++) {
            Square sq = geometry->square_at(r, c);
            if (sq >= 0) {
                placements.push_back({sq, Color::Black});
            }
        }
    }
    return position_from_placements(std::move(geometry), placements, Color::White);
}

Position position_from_placements(std::shared_ptr<const BoardGeometry> geometry,
                                  const std::vector<Placement> &placements, Color to_move) {
    Position pos;
    const int n = geometry->num_squares();
    pos.piece_at.assign(n, -1);
    std::vector<Square> occupied;
    for (const auto &p : placements) {
        if (p.square < 0 || p.square >= n) {
            throw std::out_of_range("placement square " + std::to_string(p.square) + " is outside the board");
        }
        if (pos.piece_at[p.square] >= 0) {
            throw std::invalid_argument("two pieces placed on square " + std::to_string(p.square));
        }
        int id = static_cast<int>(pos.pieces.size());
        pos.pieces.push_back(Piece{id, p.color, p.crowned, id, true});
        pos.piece_at[p.square] = id;
        occupied.push_back(p.square);
    }
    pos.qstate = QuantumBoardState::init(occupied, n);
    pos.geometry = std::move(geometry);
    pos.to_move = to_move;
    return pos;
}

namespace {

template <typename Emit>
void for_each_capture_from(const Position &pos, Square from, Emit &&emit) {
    const int id = pos.piece_at[from];
    if (id < 0) {
        return;
    }
    const Piece &piece = pos.pieces[id];
    const auto &geo = *pos.geometry;
    for (int d = 0; d < 4; d++) {
        if (!direction_allowed(piece.color, piece.crowned, d)) {
            continue;
        }
        Square over = geo.neighbor(from, d);
        Square landing = geo.jump(from, d);
        if (over < 0 || landing < 0) {
            continue;
        }
        int victim = pos.piece_at[over];
        if (victim < 0 || pos.pieces[victim].color == piece.color || pos.piece_at[landing] >= 0) {
            continue;
        }
        emit(Move::capture(id, from, over, landing));
    }
}

/// Empty squares one legal step away from `from`, in direction order.
int step_targets(const Position &pos, Square from, std::array<Square, 4> &out) {
    const Piece &piece = pos.pieces[pos.piece_at[from]];
    int count = 0;
    for (int d = 0; d < 4; d++) {
        if (!direction_allowed(piece.color, piece.crowned, d)) {
            continue;
        }
        Square to = pos.geometry->neighbor(from, d);
        if (to >= 0 && pos.piece_at[to] < 0) {
            out[count++] = to;
        }
    }
    std::sort(out.begin(), out.begin() + count);
    return count;
}

bool owned_by_mover(const Position &pos, Square sq) {
    int id = pos.piece_at[sq];
    return id >= 0 && pos.pieces[id].color == pos.to_move;
}

}  // namespace

bool capture_legality(const Position &position, const Move &attempt) {
    if (attempt.kind != MoveKind::Capture) {
        return false;
    }
    const int n = static_cast<int>(position.piece_at.size());
    for (Square sq : attempt.squares) {
        if (sq < 0 || sq >= n) {
            return false;
        }
    }
    const Square from = attempt.squares[0];
    int id = position.piece_at[from];
    if (id < 0 || id != attempt.piece) {
        return false;
    }
    bool found = false;
    for_each_capture_from(position, from, [&](const Move &m) { found = found || m == attempt; });
    return found;
}

std::vector<Move> captures_from(const Position &position, Square from) {
    std::vector<Move> out;
    for_each_capture_from(position, from, [&](const Move &m) { out.push_back(m); });
    return out;
}

std::vector<Move> legal_moves(const Position &pos, Level level) {
    std::vector<Move> moves;
    const int n = pos.geometry->num_squares();

    if (pos.chain_square >= 0) {
        return captures_from(pos, pos.chain_square);
    }

    for (Square sq = 0; sq < n; sq++) {
        if (owned_by_mover(pos, sq)) {
            for_each_capture_from(pos, sq, [&](const Move &m) { moves.push_back(m); });
        }
    }
    if (!moves.empty()) {
        return moves;
    }

    std::array<Square, 4> targets;
    for (Square sq = 0; sq < n; sq++) {
        if (!owned_by_mover(pos, sq)) {
            continue;
        }
        const int id = pos.piece_at[sq];
        int count = step_targets(pos, sq, targets);
        for (int i = 0; i < count; i++) {
            moves.push_back(Move::step(id, sq, targets[i]));
        }
        if (level >= Level::Superposition) {
            for (int i = 0; i < count; i++) {
                for (int j = i + 1; j < count; j++) {
                    moves.push_back(Move::split(id, sq, targets[i], targets[j]));
                }
            }
        }
    }

    if (level >= Level::Interference) {
        std::array<Square, 4> other;
        for (Square s1 = 0; s1 < n; s1++) {
            if (!owned_by_mover(pos, s1)) {
                continue;
            }
            const int id = pos.piece_at[s1];
            int c1 = step_targets(pos, s1, targets);
            if (c1 == 0) {
                continue;
            }
            for (Square s2 = s1 + 1; s2 < n; s2++) {
                if (pos.piece_at[s2] != id) {
                    continue;
                }
                int c2 = step_targets(pos, s2, other);
                for (int i = 0; i < c1; i++) {
                    if (std::find(other.begin(), other.begin() + c2, targets[i]) != other.begin() + c2) {
                        moves.push_back(Move::merge(id, s1, s2, targets[i]));
                    }
                }
            }
        }
    }
    return moves;
}

bool has_legal_move(const Position &pos, Level level) {
    (void)level;  // every level offers a superset of level 0's moves
    if (pos.chain_square >= 0) {
        return !captures_from(pos, pos.chain_square).empty();
    }
    const int n = pos.geometry->num_squares();
    std::array<Square, 4> targets;
    for (Square sq = 0; sq < n; sq++) {
        if (!owned_by_mover(pos, sq)) {
            continue;
        }
        if (step_targets(pos, sq, targets) > 0) {
            return true;
        }
        bool capture = false;
        for_each_capture_from(pos, sq, [&](const Move &) { capture = true; });
        if (capture) {
            return true;
        }
    }
    return false;
}

}  // namespace cheqqers
