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

#include "cheqqers/game.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace cheqqers {

const char *to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::Ongoing:
            return "ongoing";
        case Outcome::WhiteWins:
            return "white_wins";
        case Outcome::BlackWins:
            return "black_wins";
        case Outcome::Draw:
            return "draw";
    }
    return "?";
}

Outcome outcome_from_string(const std::string &s) {
    for (Outcome o : {Outcome::Ongoing, Outcome::WhiteWins, Outcome::BlackWins, Outcome::Draw}) {
        if (s == to_string(o)) {
            return o;
        }
    }
    throw std::invalid_argument("unknown outcome '" + s + "'");
}

GameState game_from_position(Position position, Level level, uint64_t seed, RuleOptions rules) {
    GameState g;
    g.position = std::move(position);
    g.level = level;
    g.rules = rules;
    g.rng = Rng(seed);
    g.outcome = evaluate_outcome(g);
    return g;
}

GameState new_game(std::shared_ptr<const BoardGeometry> geometry, Level level, uint64_t seed, RuleOptions rules) {
    return game_from_position(initial_position(std::move(geometry)), level, seed, rules);
}

GameState new_game(int side, int setup_rows, Level level, uint64_t seed, RuleOptions rules) {
    return new_game(std::make_shared<const BoardGeometry>(side, setup_rows), level, seed, rules);
}

std::vector<Move> legal_moves(const GameState &state) {
    if (state.outcome != Outcome::Ongoing) {
        return {};
    }
    return legal_moves(state.position, state.level);
}

Outcome evaluate_outcome(const GameState &state) {
    const Position &pos = state.position;
    if (!has_legal_move(pos, state.level)) {
        return pos.to_move == Color::White ? Outcome::BlackWins : Outcome::WhiteWins;
    }
    if (state.rules.draw_rule && state.no_capture_plies > state.rules.draw_plies) {
        return Outcome::Draw;
    }
    return Outcome::Ongoing;
}

namespace {

QuantumOp gate_op(QuantumOp::Kind kind, Square a, Square b, Square c = -1) {
    return QuantumOp{kind, {a, b, c}, {}};
}

/// Drops ownership of squares that lost all occupancy and retires pieces
/// left without support.
void sync_supports(Position &pos, TurnRecord &rec) {
    const int n = static_cast<int>(pos.piece_at.size());
    std::vector<int> support_count(pos.pieces.size(), 0);
    for (Square sq = 0; sq < n; sq++) {
        int id = pos.piece_at[sq];
        if (id < 0) {
            continue;
        }
        if (pos.qstate.is_classical(sq) && !pos.qstate.classical_bit(sq)) {
            pos.piece_at[sq] = -1;
        } else {
            support_count[id]++;
        }
    }
    for (auto &piece : pos.pieces) {
        if (piece.alive && support_count[piece.id] == 0) {
            piece.alive = false;
            rec.captured.push_back(piece.id);
        }
    }
}

MeasurementOutcome measure_piece(Position &pos, int piece, Rng &rng, TurnRecord &rec) {
    auto support = pos.support(piece);
    auto outcome = pos.qstate.measure(support, rng);
    rec.measurements.push_back(outcome);
    rec.ops.push_back(QuantumOp{QuantumOp::Kind::Measure, {-1, -1, -1}, outcome});
    sync_supports(pos, rec);
    return outcome;
}

void record_pass(TurnRecord &rec, PassReason reason) {
    rec.passed = true;
    rec.pass_reason = reason;
}

/// Returns true when the capture succeeded with a definite jump.
bool resolve_capture(GameState &g, const Move &m, Rng &rng, TurnRecord &rec) {
    Position &pos = g.position;
    const Square from = m.squares[0];
    const Square over = m.squares[1];
    const Square landing = m.squares[2];
    const int defender = pos.piece_at[over];
    const bool attacker_classical = pos.qstate.is_classical(from);
    const bool defender_classical = pos.qstate.is_classical(over);

    if (g.level >= Level::Entanglement && attacker_classical && !defender_classical) {
        pos.qstate.apply_capture(over, from, landing);
        rec.ops.push_back(gate_op(QuantumOp::Kind::Capture, over, from, landing));
        pos.piece_at[landing] = m.piece;
        sync_supports(pos, rec);
        return false;
    }

    if (!attacker_classical) {
        auto outcome = measure_piece(pos, m.piece, rng, rec);
        if (!outcome.bit(from)) {
            record_pass(rec, PassReason::AttackerAbsent);
            return false;
        }
    }
    // The attacker's collapse may already have decided the defender.
    if (pos.piece_at[over] != defender) {
        record_pass(rec, PassReason::DefenderAbsent);
        return false;
    }
    if (!pos.qstate.is_classical(over)) {
        auto outcome = measure_piece(pos, defender, rng, rec);
        if (!outcome.bit(over)) {
            record_pass(rec, PassReason::DefenderAbsent);
            return false;
        }
    }

    pos.qstate.apply_move(from, landing);
    rec.ops.push_back(gate_op(QuantumOp::Kind::Move, from, landing));
    pos.piece_at[landing] = m.piece;
    pos.qstate.clear_square(over);
    rec.ops.push_back(gate_op(QuantumOp::Kind::Clear, over, -1));
    sync_supports(pos, rec);
    return true;
}

}  // namespace

TurnRecord apply_legal_move(GameState &g, const Move &m, Rng &rng) {
    Position &pos = g.position;
    TurnRecord rec;
    rec.mover = pos.to_move;
    rec.move = m;
    bool captured = false;

    switch (m.kind) {
        case MoveKind::Step:
            pos.qstate.apply_move(m.squares[0], m.squares[1]);
            rec.ops.push_back(gate_op(QuantumOp::Kind::Move, m.squares[0], m.squares[1]));
            pos.piece_at[m.squares[1]] = m.piece;
            sync_supports(pos, rec);
            break;
        case MoveKind::Split:
            pos.qstate.apply_split(m.squares[0], m.squares[1], m.squares[2]);
            rec.ops.push_back(gate_op(QuantumOp::Kind::Split, m.squares[0], m.squares[1], m.squares[2]));
            pos.piece_at[m.squares[1]] = m.piece;
            pos.piece_at[m.squares[2]] = m.piece;
            sync_supports(pos, rec);
            break;
        case MoveKind::Merge:
            pos.qstate.apply_merge(m.squares[2], m.squares[0], m.squares[1]);
            rec.ops.push_back(gate_op(QuantumOp::Kind::Merge, m.squares[2], m.squares[0], m.squares[1]));
            pos.piece_at[m.squares[2]] = m.piece;
            sync_supports(pos, rec);
            break;
        case MoveKind::Capture:
            captured = resolve_capture(g, m, rng, rec);
            break;
        case MoveKind::Pass:
            throw IllegalMoveError("pass is not a playable move");
    }

    bool mover_crowned = false;
    for (Square sq = 0; sq < static_cast<Square>(pos.piece_at.size()); sq++) {
        int id = pos.piece_at[sq];
        if (id < 0) {
            continue;
        }
        Piece &piece = pos.pieces[id];
        if (!piece.crowned && pos.geometry->is_crowning_square(sq, piece.color)) {
            piece.crowned = true;
            rec.crowned.push_back(id);
            mover_crowned = mover_crowned || id == m.piece;
        }
    }

    g.no_capture_plies = captured ? 0 : g.no_capture_plies + 1;
    g.ply_count++;

    // A man crowned by a capture ends its move.
    const Square landing = m.squares[2];
    if (captured && !mover_crowned && !captures_from(pos, landing).empty()) {
        pos.chain_square = landing;
        rec.chain_continues = true;
    } else {
        pos.chain_square = -1;
        pos.to_move = opponent(pos.to_move);
    }
    g.outcome = evaluate_outcome(g);
    return rec;
}

TurnRecord step(GameState &state, const Move &move, Rng &rng) {
    if (state.outcome != Outcome::Ongoing) {
        throw IllegalMoveError("game is over (" + std::string(to_string(state.outcome)) + ")");
    }
    auto moves = legal_moves(state.position, state.level);
    if (std::find(moves.begin(), moves.end(), move) == moves.end()) {
        throw IllegalMoveError("illegal move: " + move.to_string());
    }
    GameState next = state;
    TurnRecord rec = apply_legal_move(next, move, rng);
    state = std::move(next);
    return rec;
}

TurnRecord step(GameState &state, const Move &move) {
    Rng rng = state.rng;
    TurnRecord rec = step(state, move, rng);
    state.rng = rng;
    return rec;
}

nlohmann::json to_json(const MeasurementOutcome &outcome) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto &[sq, bit] : outcome.bits) {
        out.push_back({{"square", sq}, {"bit", bit ? 1 : 0}});
    }
    return out;
}

nlohmann::json to_json(const TurnRecord &record) {
    nlohmann::json measurements = nlohmann::json::array();
    for (const auto &m : record.measurements) {
        measurements.push_back(to_json(m));
    }
    nlohmann::json j{{"mover", to_string(record.mover)},
                     {"move", to_json(record.move)},
                     {"pass", record.passed},
                     {"measurements", measurements},
                     {"captured", record.captured},
                     {"crowned", record.crowned},
                     {"chainContinues", record.chain_continues}};
    if (record.passed) {
        j["passReason"] = to_string(record.pass_reason);
    }
    return j;
}

std::vector<std::vector<int>> entanglement_groups(const Position &pos) {
    std::vector<std::vector<int>> groups;
    for (const auto &comp : pos.qstate.components()) {
        std::set<int> ids;
        for (Square sq : comp.squares) {
            if (pos.piece_at[sq] >= 0) {
                ids.insert(pos.piece_at[sq]);
            }
        }
        if (ids.size() >= 2) {
            groups.emplace_back(ids.begin(), ids.end());
        }
    }
    // Pieces in different components can still be linked through a third.
    bool merged = true;
    while (merged) {
        merged = false;
        for (size_t a = 0; a < groups.size() && !merged; a++) {
            for (size_t b = a + 1; b < groups.size() && !merged; b++) {
                std::vector<int> common;
                std::set_intersection(groups[a].begin(), groups[a].end(), groups[b].begin(), groups[b].end(),
                                      std::back_inserter(common));
                if (!common.empty()) {
                    std::set<int> u(groups[a].begin(), groups[a].end());
                    u.insert(groups[b].begin(), groups[b].end());
                    groups[a].assign(u.begin(), u.end());
                    groups.erase(groups.begin() + static_cast<long>(b));
                    merged = true;
                }
            }
        }
    }
    std::sort(groups.begin(), groups.end());
    return groups;
}

nlohmann::json to_view_json(const GameState &state, bool exact) {
    const Position &pos = state.position;
    const auto &geo = *pos.geometry;
    auto round4 = [&](double p) { return exact ? p : std::round(p * 1e4) / 1e4; };

    nlohmann::json squares = nlohmann::json::array();
    for (Square sq = 0; sq < geo.num_squares(); sq++) {
        auto c = geo.coord(sq);
        squares.push_back({{"index", sq}, {"row", c.row}, {"col", c.col}});
    }
    nlohmann::json pieces = nlohmann::json::array();
    for (const auto &piece : pos.pieces) {
        if (!piece.alive) {
            continue;
        }
        nlohmann::json support = nlohmann::json::array();
        for (Square sq : pos.support(piece.id)) {
            support.push_back({{"square", sq}, {"probability", round4(pos.qstate.marginal(sq))}});
        }
        pieces.push_back({{"id", piece.id},
                          {"color", to_string(piece.color)},
                          {"crowned", piece.crowned},
                          {"lineage", piece.lineage},
                          {"squares", support}});
    }
    nlohmann::json j{{"geometry", {{"size", geo.side()}, {"setupRows", geo.setup_rows()}, {"squares", squares}}},
                     {"level", to_int(state.level)},
                     {"toMove", to_string(pos.to_move)},
                     {"outcome", to_string(state.outcome)},
                     {"noCapturePlies", state.no_capture_plies},
                     {"plyCount", state.ply_count},
                     {"pieces", pieces},
                     {"entanglement", entanglement_groups(pos)}};
    if (pos.chain_square >= 0) {
        j["chainSquare"] = pos.chain_square;
    }
    return j;
}

std::string serialize(const GameState &state) {
    const Position &pos = state.position;
    nlohmann::json pieces = nlohmann::json::array();
    for (const auto &p : pos.pieces) {
        pieces.push_back({{"id", p.id},
                          {"color", to_string(p.color)},
                          {"crowned", p.crowned},
                          {"lineage", p.lineage},
                          {"alive", p.alive}});
    }
    nlohmann::json j{
        {"format", 1},
        {"size", pos.geometry->side()},
        {"setupRows", pos.geometry->setup_rows()},
        {"level", to_int(state.level)},
        {"drawRule", state.rules.draw_rule},
        {"drawPlies", state.rules.draw_plies},
        {"toMove", to_string(pos.to_move)},
        {"chainSquare", pos.chain_square},
        {"outcome", to_string(state.outcome)},
        {"noCapturePlies", state.no_capture_plies},
        {"plyCount", state.ply_count},
        {"rng", {{"seed", state.rng.seed()}, {"position", state.rng.position()}}},
        {"pieces", pieces},
        {"pieceAt", pos.piece_at},
        {"qstate", pos.qstate.to_json()},
    };
    return j.dump();
}

namespace {

template <typename T>
T field(const nlohmann::json &j, const char *key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("/") + key, e.what());
    }
}

}  // namespace

GameState deserialize(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError("byte " + std::to_string(e.byte), e.what());
    }
    if (!j.is_object()) {
        throw ParseError("/", "expected an object");
    }
    if (field<int>(j, "format") != 1) {
        throw ParseError("/format", "unsupported format version");
    }

    GameState g;
    try {
        auto geometry = std::make_shared<const BoardGeometry>(field<int>(j, "size"), field<int>(j, "setupRows"));
        g.level = level_from_int(field<int>(j, "level"));
        g.rules.draw_rule = field<bool>(j, "drawRule");
        g.rules.draw_plies = field<int>(j, "drawPlies");
        g.no_capture_plies = field<int>(j, "noCapturePlies");
        g.ply_count = field<int>(j, "plyCount");
        g.outcome = outcome_from_string(field<std::string>(j, "outcome"));
        const auto &rng = j.at("rng");
        g.rng = Rng::at_position(field<uint64_t>(rng, "seed"), field<uint64_t>(rng, "position"));

        Position &pos = g.position;
        pos.to_move = color_from_string(field<std::string>(j, "toMove"));
        pos.chain_square = field<int>(j, "chainSquare");
        const auto pieces = j.at("pieces");
        for (size_t i = 0; i < pieces.size(); i++) {
            const auto &jp = pieces[i];
            Piece p{field<int>(jp, "id"), color_from_string(field<std::string>(jp, "color")),
                    field<bool>(jp, "crowned"), field<int>(jp, "lineage"), field<bool>(jp, "alive")};
            if (p.id != static_cast<int>(i)) {
                throw ParseError("/pieces/" + std::to_string(i) + "/id", "piece ids must be dense and ordered");
            }
            pos.pieces.push_back(p);
        }
        pos.piece_at = field<std::vector<int>>(j, "pieceAt");
        if (static_cast<int>(pos.piece_at.size()) != geometry->num_squares()) {
            throw ParseError("/pieceAt", "length does not match the board");
        }
        for (int id : pos.piece_at) {
            if (id < -1 || id >= static_cast<int>(pos.pieces.size())) {
                throw ParseError("/pieceAt", "unknown piece id " + std::to_string(id));
            }
        }
        try {
            pos.qstate = QuantumBoardState::from_json(j.at("qstate"));
        } catch (const std::exception &e) {
            throw ParseError("/qstate", e.what());
        }
        if (pos.qstate.num_squares() != geometry->num_squares()) {
            throw ParseError("/qstate/numSquares", "does not match the board");
        }
        for (Square sq = 0; sq < geometry->num_squares(); sq++) {
            if ((pos.piece_at[sq] >= 0) == pos.qstate.is_empty(sq)) {
                throw ParseError("/pieceAt/" + std::to_string(sq), "ownership disagrees with occupancy");
            }
        }
        if (pos.chain_square < -1 || pos.chain_square >= geometry->num_squares()) {
            throw ParseError("/chainSquare", "out of range");
        }
        pos.geometry = std::move(geometry);
    } catch (const ParseError &) {
        throw;
    } catch (const std::exception &e) {
        throw ParseError("/", e.what());
    }
    return g;
}

}  // namespace cheqqers
