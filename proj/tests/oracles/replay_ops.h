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

// Mirrors a game's recorded quantum operations on a dense statevector.

#include "cheqqers/game.h"
#include "oracles/dense_statevector.h"

namespace oracle {

inline DenseState dense_from(const cheqqers::Position &pos) {
    uint64_t occupied = 0;
    for (int sq = 0; sq < pos.qstate.num_squares(); ++sq) {
        if (!pos.qstate.is_classical(sq)) throw std::logic_error("start position must be classical");
        if (pos.qstate.classical_bit(sq)) occupied |= uint64_t{1} << sq;
    }
    return DenseState(pos.qstate.num_squares(), occupied);
}

inline void apply_record(DenseState &dense, const cheqqers::TurnRecord &record) {
    using Kind = cheqqers::QuantumOp::Kind;
    for (const auto &op : record.ops) {
        const auto &s = op.squares;
        switch (op.kind) {
            case Kind::Move:
                dense.move(s[0], s[1]);
                break;
            case Kind::Split:
                dense.split(s[0], s[1], s[2]);
                break;
            case Kind::Merge:
                dense.merge(s[0], s[1], s[2]);
                break;
            case Kind::Capture:
                dense.capture(s[0], s[1], s[2]);
                break;
            case Kind::Measure:
                for (auto [sq, bit] : op.measured.bits) dense.postselect(sq, bit);
                break;
            case Kind::Clear:
                dense.clear(s[0]);
                break;
        }
    }
}

inline double max_marginal_gap(const DenseState &dense, const cheqqers::QuantumBoardState &q) {
    double worst = 0;
    for (int sq = 0; sq < q.num_squares(); ++sq) worst = std::max(worst, std::abs(dense.marginal(sq) - q.marginal(sq)));
    return worst;
}

}  // namespace oracle
