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
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cheqqers/rng.h"

namespace cheqqers {

using Amplitude = std::complex<double>;
using Square = int;

/// Raised when a gate's occupancy preconditions do not hold (e.g. the
/// target square already carries piece support).
class IllegalGateError : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

/// Dense unitary over two or three occupancy qubits.
///
/// Basis index bit i is the occupancy of the i-th square passed to the
/// gate, so for a move gate applied to (s, t) the state "|10>" (piece on s,
/// t empty) is index 1.
struct GateMatrix {
    int arity = 0;
    std::array<Amplitude, 64> entries{};

    int dim() const {
        return 1 << arity;
    }
    Amplitude at(int row, int col) const {
        return entries[row * dim() + col];
    }
    Amplitude &at(int row, int col) {
        return entries[row * dim() + col];
    }
};

/// iSWAP on (source, target): |10> -> i|01>, |01> -> i|10>.
const GateMatrix &move_gate();
/// Square-root-iSWAP based split on (source, target1, target2).
///
/// Fixes the vacuum and the two- and three-excitation sectors; on the
/// single-excitation sector (e_s, e_t1, e_t2) it acts as the symmetric matrix
///   [0, (1+i)/2, (1-i)/2; (1+i)/2, -i/2, 1/2; (1-i)/2, 1/2, i/2].
const GateMatrix &split_gate();
/// Conjugate transpose of split_gate(), applied to (target, source1, source2).
const GateMatrix &merge_gate();
/// Entangling capture on (defender, attacker, landing): |110> <-> i|001>.
const GateMatrix &capture_gate();

/// max |(U^dagger U - I)_{jk}|.
double unitarity_error(const GateMatrix &gate);

struct Term {
    uint64_t bits = 0;
    Amplitude amp;

    bool operator==(const Term &other) const = default;
};

/// A set of squares whose joint occupancy state is simulated as one sparse
/// amplitude map. Local bit i of a term refers to squares[i]; terms are kept
/// sorted by bits with no duplicates.
struct EntangledComponent {
    std::vector<Square> squares;
    std::vector<Term> terms;

    int local_index(Square sq) const;
    double norm_squared() const;
    double marginal_local(int local) const;

    bool operator==(const EntangledComponent &other) const = default;
};

struct MeasurementOutcome {
    /// (square, bit) for every measured square, sorted by square.
    std::vector<std::pair<Square, bool>> bits;

    bool bit(Square sq) const;
    bool operator==(const MeasurementOutcome &other) const = default;
};

/// Occupancy state of every playable square, factored into independent
/// entangled components. Squares outside all components are classical.
///
/// Every gate and measurement leaves the state canonical: terms with
/// |amp| < kPruneThreshold are dropped, squares whose bit is the same in all
/// remaining terms of a component are demoted to classical occupancy, and
/// components that factor over disjoint square sets are split apart.
class QuantumBoardState {
   public:
    static constexpr double kPruneThreshold = 1e-12;

    QuantumBoardState() = default;
    explicit QuantumBoardState(int num_squares);

    /// Classical board with the given squares occupied.
    static QuantumBoardState init(std::span<const Square> occupied, int num_squares);

    int num_squares() const {
        return static_cast<int>(classical_.size());
    }
    bool is_classical(Square sq) const;
    /// Definite bit of a classical square.
    bool classical_bit(Square sq) const;
    /// True when the square has zero probability of being occupied.
    bool is_empty(Square sq) const;
    double marginal(Square sq) const;

    /// Index into components(), or -1 for a classical square.
    int component_of(Square sq) const;
    const std::vector<EntangledComponent> &components() const {
        return components_;
    }

    /// Tensors together the components (and classical bits) of the listed
    /// squares; returns the index of the resulting component. The result is
    /// not canonicalized.
    int join_components(std::span<const Square> squares);

    void apply_move(Square source, Square target);
    void apply_split(Square source, Square target1, Square target2);
    void apply_merge(Square target, Square source1, Square source2);
    void apply_capture(Square defender, Square attacker, Square landing);

    /// Samples a joint assignment for the squares with Born probabilities and
    /// collapses the state onto it. Classical squares are read without
    /// consuming randomness; each involved component consumes one draw.
    MeasurementOutcome measure(std::span<const Square> squares, Rng &rng);

    /// Projects onto a given outcome (no sampling). Throws if the outcome
    /// has zero probability.
    void postselect(const MeasurementOutcome &outcome);

    /// Empties a classically occupied square (removal of a captured piece).
    void clear_square(Square sq);

    /// Largest |sum |amp|^2 - 1| over all components.
    double max_normalization_error() const;

    nlohmann::json to_json() const;
    static QuantumBoardState from_json(const nlohmann::json &j);

    bool operator==(const QuantumBoardState &other) const = default;

   private:
    void check_square(Square sq) const;
    void apply_gate(const GateMatrix &gate, std::span<const Square> squares);
    void canonicalize(int comp);
    void factor(int comp);
    void compact();

    std::vector<uint8_t> classical_;
    std::vector<int> component_of_;
    std::vector<EntangledComponent> components_;
};

}  // namespace cheqqers
