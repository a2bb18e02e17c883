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

#include <algorithm>
#include <set>

#include "cheqqers/game.h"
#include "cheqqers/rules.h"
#include "doctest.h"
#include "oracles/reference_checkers.h"

using namespace cheqqers;

namespace {

std::shared_ptr<const BoardGeometry> board(int side, int rows = 1) {
    return std::make_shared<const BoardGeometry>(side, rows);
}

int count_kind(const std::vector<Move> &moves, MoveKind kind) {
    return static_cast<int>(std::count_if(moves.begin(), moves.end(), [&](const Move &m) { return m.kind == kind; }));
}

// Random legal play, used to reach positions with superposition.
std::vector<GameState> reachable_states(Level level, int side, uint64_t seed, int games, int plies) {
    std::vector<GameState> out;
    Rng rng(seed);
    for (int g = 0; g < games; ++g) {
        GameState state = new_game(side, 1, level, rng.next());
        for (int p = 0; p < plies && state.outcome == Outcome::Ongoing; ++p) {
            auto moves = legal_moves(state);
            step(state, moves[rng.below(moves.size())]);
            out.push_back(state);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("geometry indexes dark squares row-major from white's corner") {
    BoardGeometry g(5, 1);
    CHECK(g.num_squares() == 13);
    CHECK(g.square_at(0, 0) == 0);
    CHECK(g.square_at(0, 1) == -1);
    CHECK(g.square_at(0, 2) == 1);
    CHECK(g.square_at(1, 1) == 3);
    CHECK(g.coord(3) == Coord{1, 1});
    CHECK(g.row_capacity(0) == 3);
    CHECK(g.row_capacity(1) == 2);
    BoardGeometry eight(8, 3);
    CHECK(eight.num_squares() == 32);
    CHECK(eight.square_at(7, 7) == 31);
    CHECK(eight.is_crowning_square(31, Color::White));
    CHECK(eight.is_crowning_square(0, Color::Black));
    CHECK_FALSE(eight.is_crowning_square(0, Color::White));
}

TEST_CASE("geometry validates its size") {
    CHECK_THROWS_AS(BoardGeometry(3, 1), std::invalid_argument);
    CHECK_THROWS_AS(BoardGeometry(11, 1), std::invalid_argument);
    CHECK_THROWS_AS(BoardGeometry(4, 3), std::invalid_argument);
    CHECK_THROWS_AS(BoardGeometry(6, 0), std::invalid_argument);
}

TEST_CASE("initial positions") {
    auto eight = initial_position(board(8, 3));
    CHECK(eight.alive_count(Color::White) == 12);
    CHECK(eight.alive_count(Color::Black) == 12);
    CHECK(eight.to_move == Color::White);
    auto five = initial_position(board(5, 1));
    CHECK(five.alive_count(Color::White) == 3);
    CHECK(five.alive_count(Color::Black) == 3);
    auto four = initial_position(board(4, 1));
    CHECK(four.alive_count(Color::White) == 2);
    CHECK(four.alive_count(Color::Black) == 2);
    for (Square sq : {0, 1, 2}) CHECK(five.pieces[five.piece_at[sq]].color == Color::White);
    for (Square sq : {10, 11, 12}) CHECK(five.pieces[five.piece_at[sq]].color == Color::Black);
}

TEST_CASE("standard opening has seven white steps") {
    auto pos = initial_position(board(8, 3));
    auto moves = legal_moves(pos, Level::Classical);
    CHECK(moves.size() == 7);
    CHECK(count_kind(moves, MoveKind::Step) == 7);
}

TEST_CASE("a lone man mid-board can step twice or split") {
    auto geo = board(8);
    Square from = geo->square_at(3, 3);
    auto pos = position_from_placements(geo, {{from, Color::White}}, Color::White);
    auto l0 = legal_moves(pos, Level::Classical);
    CHECK(l0.size() == 2);
    auto l1 = legal_moves(pos, Level::Superposition);
    CHECK(count_kind(l1, MoveKind::Step) == 2);
    REQUIRE(count_kind(l1, MoveKind::Split) == 1);
    auto split = *std::find_if(l1.begin(), l1.end(), [](const Move &m) { return m.kind == MoveKind::Split; });
    CHECK(split.squares[0] == from);
    CHECK(split.squares[1] == geo->square_at(4, 2));
    CHECK(split.squares[2] == geo->square_at(4, 4));
}

TEST_CASE("a crowned piece splits over any pair of its free targets") {
    auto geo = board(8);
    Square from = geo->square_at(3, 3);
    auto pos = position_from_placements(geo, {{from, Color::White, true}}, Color::White);
    auto moves = legal_moves(pos, Level::Superposition);
    CHECK(count_kind(moves, MoveKind::Step) == 4);
    CHECK(count_kind(moves, MoveKind::Split) == 6);
    auto corner = position_from_placements(geo, {{0, Color::White, true}}, Color::White);
    auto corner_moves = legal_moves(corner, Level::Interference);
    CHECK(count_kind(corner_moves, MoveKind::Step) == 1);
    CHECK(count_kind(corner_moves, MoveKind::Split) == 0);
}

TEST_CASE("capture is forced and preempts quantum moves") {
    auto geo = board(8);
    Square w = geo->square_at(2, 2);
    Square b = geo->square_at(3, 3);
    Square other = geo->square_at(0, 6);
    auto pos = position_from_placements(geo, {{w, Color::White}, {b, Color::Black}, {other, Color::White}},
                                        Color::White);
    for (Level level : {Level::Classical, Level::Superposition, Level::Entanglement, Level::Interference}) {
        auto moves = legal_moves(pos, level);
        REQUIRE(moves.size() == 1);
        CHECK(moves[0] == Move::capture(pos.piece_at[w], w, b, geo->square_at(4, 4)));
    }
}

TEST_CASE("men only move forward, kings both ways") {
    auto geo = board(8);
    Square sq = geo->square_at(4, 4);
    auto black = position_from_placements(geo, {{sq, Color::Black}}, Color::Black);
    for (const auto &m : legal_moves(black, Level::Classical))
        CHECK(geo->coord(m.squares[1]).row == 3);
    auto king = position_from_placements(geo, {{sq, Color::Black, true}}, Color::Black);
    std::set<int> rows;
    for (const auto &m : legal_moves(king, Level::Classical)) rows.insert(geo->coord(m.squares[1]).row);
    CHECK(rows == std::set<int>{3, 5});
}

TEST_CASE("capture legality") {
    auto geo = board(6);
    Square a = geo->square_at(1, 1), d = geo->square_at(2, 2), l = geo->square_at(3, 3);
    auto pos = position_from_placements(geo, {{a, Color::White}, {d, Color::Black}}, Color::White);
    CHECK(capture_legality(pos, Move::capture(0, a, d, l)));
    CHECK_FALSE(capture_legality(pos, Move::capture(0, d, a, geo->square_at(0, 0))));
    auto blocked = position_from_placements(geo, {{a, Color::White}, {d, Color::Black}, {l, Color::Black}},
                                            Color::White);
    CHECK_FALSE(capture_legality(blocked, Move::capture(0, a, d, l)));
    // a man cannot capture backwards
    auto back = position_from_placements(geo, {{l, Color::White}, {d, Color::Black}}, Color::White);
    CHECK_FALSE(capture_legality(back, Move::capture(0, l, d, a)));
}

TEST_CASE("capture legality with superposed pieces") {
    auto geo = board(6);
    Square w = geo->square_at(0, 2);
    Square b = geo->square_at(3, 3);
    auto state = game_from_position(position_from_placements(geo, {{w, Color::White}, {b, Color::Black}},
                                                             Color::White),
                                    Level::Superposition, 1);
    step(state, Move::split(0, w, geo->square_at(1, 1), geo->square_at(1, 3)));
    step(state, Move::step(1, b, geo->square_at(2, 2)));
    // both halves of the white man may attempt the capture, and must
    auto moves = legal_moves(state);
    REQUIRE(moves.size() == 2);
    Square b2 = geo->square_at(2, 2);
    CHECK(moves[0].kind == MoveKind::Capture);
    CHECK(moves[1].kind == MoveKind::Capture);
    std::set<Square> froms{moves[0].squares[0], moves[1].squares[0]};
    CHECK(froms == std::set<Square>{geo->square_at(1, 1), geo->square_at(1, 3)});
    CHECK(moves[0].squares[1] == b2);
}

TEST_CASE("capture legality uses support, not certainty") {
    auto geo = board(6);
    Square a = geo->square_at(1, 1), d = geo->square_at(2, 2), l = geo->square_at(3, 3);
    Square far = geo->square_at(4, 4);
    auto pos = position_from_placements(geo, {{a, Color::White}, {d, Color::Black}, {far, Color::White}},
                                        Color::White);
    // half of the defender sits at `over`
    Square d2 = geo->square_at(3, 1);
    Square d1 = geo->square_at(4, 2);
    pos.qstate.apply_split(d, d1, d2);
    pos.qstate.apply_move(d1, d);
    pos.piece_at[d1] = -1;
    pos.piece_at[d2] = 1;
    CHECK(pos.qstate.marginal(d) == doctest::Approx(0.5));
    CHECK(capture_legality(pos, Move::capture(0, a, d, l)));
    // half of another piece on the landing square blocks the capture
    pos.qstate.apply_split(far, l, geo->square_at(3, 5));
    pos.piece_at[far] = -1;
    pos.piece_at[l] = 2;
    pos.piece_at[geo->square_at(3, 5)] = 2;
    CHECK(pos.qstate.marginal(l) == doctest::Approx(0.5));
    CHECK_FALSE(capture_legality(pos, Move::capture(0, a, d, l)));
}

TEST_CASE("merge moves for two parts of the same piece") {
    auto geo = board(8);
    Square from = geo->square_at(1, 3);
    auto state = game_from_position(position_from_placements(geo, {{from, Color::White}, {31, Color::Black, true}},
                                                             Color::White),
                                    Level::Interference, 5);
    Square t1 = geo->square_at(2, 2), t2 = geo->square_at(2, 4);
    step(state, Move::split(0, from, t1, t2));
    CHECK(count_kind(legal_moves(state), MoveKind::Merge) == 0);
    step(state, Move::step(1, 31, geo->square_at(6, 6)));
    auto moves = legal_moves(state);
    REQUIRE(count_kind(moves, MoveKind::Merge) == 1);
    auto merge = *std::find_if(moves.begin(), moves.end(), [](const Move &m) { return m.kind == MoveKind::Merge; });
    CHECK(merge == Move::merge(0, t1, t2, geo->square_at(3, 3)));
    // level 2 never merges
    auto level2 = state;
    level2.level = Level::Entanglement;
    CHECK(count_kind(legal_moves(level2), MoveKind::Merge) == 0);
}

TEST_CASE("move json round trip") {
    for (const Move &m : {Move::step(1, 2, 3), Move::capture(4, 5, 6, 7), Move::split(2, 3, 6, 7),
                          Move::merge(1, 2, 3, 4), Move::pass(3, PassReason::DefenderAbsent)}) {
        CHECK(move_from_json(to_json(m)) == m);
    }
    auto j = to_json(Move::split(2, 3, 6, 7));
    CHECK(j["type"] == "split");
    CHECK(j["squares"] == nlohmann::json::array({3, 6, 7}));
}

TEST_CASE("legal move sets grow with the level") {
    for (Level level : {Level::Superposition, Level::Entanglement, Level::Interference}) {
        for (const auto &state : reachable_states(level, 6, 17 + to_int(level), 30, 40)) {
            std::set<Move> prev;
            for (int l = 0; l <= 3; ++l) {
                auto moves = legal_moves(state.position, level_from_int(l));
                std::set<Move> cur(moves.begin(), moves.end());
                CHECK(cur.size() == moves.size());
                CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
                prev = std::move(cur);
            }
        }
    }
}

TEST_CASE("generated moves stay on empty playable squares") {
    for (Level level : {Level::Superposition, Level::Interference}) {
        for (const auto &state : reachable_states(level, 5, 99, 30, 60)) {
            const auto &pos = state.position;
            for (const auto &m : legal_moves(state)) {
                for (int i = 0; i < m.num_squares(); ++i) {
                    CHECK(m.squares[i] >= 0);
                    CHECK(m.squares[i] < pos.geometry->num_squares());
                }
                Square dest = m.kind == MoveKind::Capture ? m.squares[2]
                              : m.kind == MoveKind::Merge ? m.squares[2]
                                                          : m.squares[1];
                CHECK(pos.piece_at[dest] == -1);
                if (m.kind == MoveKind::Split) CHECK(pos.piece_at[m.squares[2]] == -1);
            }
        }
    }
}

TEST_CASE("level 0 matches the reference generator") {
    Rng rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        int side = 4 + static_cast<int>(rng.below(5));
        auto geo = board(side);
        std::vector<Placement> placements;
        std::vector<oracle::RefPiece> ref;
        for (Square sq = 0; sq < geo->num_squares(); ++sq) {
            if (rng.below(3) != 0) continue;
            Color c = rng.below(2) ? Color::White : Color::Black;
            bool crowned = geo->is_crowning_square(sq, c) || rng.below(4) == 0;
            placements.push_back({sq, c, crowned});
            auto rc = geo->coord(sq);
            ref.push_back({rc.row, rc.col, c == Color::White, crowned});
        }
        Color mover = rng.below(2) ? Color::White : Color::Black;
        auto pos = position_from_placements(geo, placements, mover);
        std::vector<oracle::RefMove> mine;
        for (const auto &m : legal_moves(pos, Level::Classical)) {
            auto f = geo->coord(m.squares[0]);
            if (m.kind == MoveKind::Capture) {
                auto o = geo->coord(m.squares[1]);
                auto t = geo->coord(m.squares[2]);
                mine.push_back({true, f.row, f.col, t.row, t.col, o.row, o.col});
            } else {
                REQUIRE(m.kind == MoveKind::Step);
                auto t = geo->coord(m.squares[1]);
                mine.push_back({false, f.row, f.col, t.row, t.col});
            }
        }
        std::sort(mine.begin(), mine.end());
        CHECK(mine == oracle::reference_moves(side, ref, mover == Color::White));
    }
}
