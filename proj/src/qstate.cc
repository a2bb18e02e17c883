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

#include "cheqqers/qstate.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cheqqers {

namespace {

constexpr Amplitude kI{0.0, 1.0};

GateMatrix identity_gate(int arity) {
    GateMatrix g;
    g.arity = arity;
    for (int k = 0; k < g.dim(); k++) {
        g.at(k, k) = 1.0;
    }
    return g;
}

GateMatrix make_move_gate() {
    GateMatrix g = identity_gate(2);
    g.at(1, 1) = 0.0;
    g.at(2, 2) = 0.0;
    g.at(2, 1) = kI;  // |10> -> i|01>
    g.at(1, 2) = kI;  // |01> -> i|10>
    return g;
}

GateMatrix make_split_gate() {
    const Amplitude a{0.5, 0.5};   // (1+i)/2
    const Amplitude b{0.5, -0.5};  // (1-i)/2
    const Amplitude sector[3][3] = {
        {0.0, a, b},
        {a, Amplitude{0.0, -0.5}, 0.5},
        {b, 0.5, Amplitude{0.0, 0.5}},
    };
    // Single-excitation basis states (s, t1, t2) are indices 1, 2, 4.
    const int index[3] = {1, 2, 4};
    GateMatrix g = identity_gate(3);
    for (int r = 0; r < 3; r++) {
        for (int c = 0; c < 3; c++) {
            g.at(index[r], index[c]) = sector[r][c];
        }
    }
    return g;
}

GateMatrix conjugate_transpose(const GateMatrix &g) {
    GateMatrix out;
    out.arity = g.arity;
    for (int r = 0; r < g.dim(); r++) {
        for (int c = 0; c < g.dim(); c++) {
            out.at(r, c) = std::conj(g.at(c, r));
        }
    }
    return out;
}

GateMatrix make_capture_gate() {
    GateMatrix g = identity_gate(3);
    // Basis bit 0 = defender, bit 1 = attacker, bit 2 = landing.
    g.at(3, 3) = 0.0;
    g.at(4, 4) = 0.0;
    g.at(4, 3) = kI;
    g.at(3, 4) = kI;
    return g;
}

bool bit_of(uint64_t bits, int i) {
    return (bits >> i) & 1;
}

std::string bits_to_string(uint64_t bits, size_t n) {
    std::string s(n, '0');
    for (size_t i = 0; i < n; i++) {
        if (bit_of(bits, static_cast<int>(i))) {
            s[i] = '1';
        }
    }
    return s;
}

void sort_and_combine(std::vector<Term> &terms) {
    std::sort(terms.begin(), terms.end(), [](const Term &x, const Term &y) { return x.bits < y.bits; });
    size_t w = 0;
    for (size_t r = 0; r < terms.size(); r++) {
        if (w > 0 && terms[w - 1].bits == terms[r].bits) {
            terms[w - 1].amp += terms[r].amp;
        } else {
            terms[w++] = terms[r];
        }
    }
    terms.resize(w);
}

const Term *find_term(const std::vector<Term> &terms, uint64_t bits) {
    auto it = std::lower_bound(
        terms.begin(), terms.end(), bits, [](const Term &t, uint64_t b) { return t.bits < b; });
    if (it == terms.end() || it->bits != bits) {
        return nullptr;
    }
    return &*it;
}

/// Packs the bits of `bits` at the given positions into the low bits.
uint64_t gather(uint64_t bits, const std::vector<int> &positions) {
    uint64_t out = 0;
    for (size_t k = 0; k < positions.size(); k++) {
        out |= static_cast<uint64_t>(bit_of(bits, positions[k])) << k;
    }
    return out;
}

}  // namespace

const GateMatrix &move_gate() {
    static const GateMatrix g = make_move_gate();
    return g;
}

const GateMatrix &split_gate() {
    static const GateMatrix g = make_split_gate();
    return g;
}

const GateMatrix &merge_gate() {
    static const GateMatrix g = conjugate_transpose(split_gate());
    return g;
}

const GateMatrix &capture_gate() {
    static const GateMatrix g = make_capture_gate();
    return g;
}

double unitarity_error(const GateMatrix &gate) {
    double worst = 0;
    for (int r = 0; r < gate.dim(); r++) {
        for (int c = 0; c < gate.dim(); c++) {
            Amplitude sum = 0;
            for (int k = 0; k < gate.dim(); k++) {
                sum += std::conj(gate.at(k, r)) * gate.at(k, c);
            }
            if (r == c) {
                sum -= 1.0;
            }
            worst = std::max(worst, std::abs(sum));
        }
    }
    return worst;
}

int EntangledComponent::local_index(Square sq) const {
    for (size_t i = 0; i < squares.size(); i++) {
        if (squares[i] == sq) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

double EntangledComponent::norm_squared() const {
    double total = 0;
    for (const auto &t : terms) {
        total += std::norm(t.amp);
    }
    return total;
}

double EntangledComponent::marginal_local(int local) const {
    double total = 0;
    for (const auto &t : terms) {
        if (bit_of(t.bits, local)) {
            total += std::norm(t.amp);
        }
    }
    return std::clamp(total, 0.0, 1.0);
}

bool MeasurementOutcome::bit(Square sq) const {
    for (const auto &[s, b] : bits) {
        if (s == sq) {
            return b;
        }
    }
    throw std::out_of_range("square " + std::to_string(sq) + " was not measured");
}

QuantumBoardState::QuantumBoardState(int num_squares)
    : classical_(static_cast<size_t>(num_squares), 0), component_of_(static_cast<size_t>(num_squares), -1) {
    if (num_squares < 0) {
        throw std::invalid_argument("negative square count");
    }
}

QuantumBoardState QuantumBoardState::init(std::span<const Square> occupied, int num_squares) {
    QuantumBoardState state(num_squares);
    for (Square sq : occupied) {
        state.check_square(sq);
        state.classical_[sq] = 1;
    }
    return state;
}

void QuantumBoardState::check_square(Square sq) const {
    if (sq < 0 || sq >= num_squares()) {
        throw std::out_of_range("square " + std::to_string(sq) + " is outside the board");
    }
}

bool QuantumBoardState::is_classical(Square sq) const {
    check_square(sq);
    return component_of_[sq] < 0;
}

bool QuantumBoardState::classical_bit(Square sq) const {
    if (!is_classical(sq)) {
        throw std::logic_error("square " + std::to_string(sq) + " is not classical");
    }
    return classical_[sq] != 0;
}

bool QuantumBoardState::is_empty(Square sq) const {
    check_square(sq);
    int c = component_of_[sq];
    if (c < 0) {
        return classical_[sq] == 0;
    }
    const auto &comp = components_[c];
    int local = comp.local_index(sq);
    for (const auto &t : comp.terms) {
        if (bit_of(t.bits, local)) {
            return false;
        }
    }
    return true;
}

double QuantumBoardState::marginal(Square sq) const {
    check_square(sq);
    int c = component_of_[sq];
    if (c < 0) {
        return classical_[sq] ? 1.0 : 0.0;
    }
    const auto &comp = components_[c];
    return comp.marginal_local(comp.local_index(sq));
}

int QuantumBoardState::component_of(Square sq) const {
    check_square(sq);
    return component_of_[sq];
}

int QuantumBoardState::join_components(std::span<const Square> squares) {
    std::vector<int> comps;
    std::vector<Square> loose;
    for (Square sq : squares) {
        check_square(sq);
        int c = component_of_[sq];
        if (c >= 0) {
            if (std::find(comps.begin(), comps.end(), c) == comps.end()) {
                comps.push_back(c);
            }
        } else if (std::find(loose.begin(), loose.end(), sq) == loose.end()) {
            loose.push_back(sq);
        }
    }
    if (comps.size() == 1 && loose.empty()) {
        return comps[0];
    }

    EntangledComponent joined;
    joined.terms.push_back(Term{0, 1.0});
    for (int c : comps) {
        auto &part = components_[c];
        int shift = static_cast<int>(joined.squares.size());
        if (shift + part.squares.size() > 64) {
            throw std::length_error("entangled component exceeds 64 squares");
        }
        std::vector<Term> product;
        product.reserve(joined.terms.size() * part.terms.size());
        for (const auto &a : joined.terms) {
            for (const auto &b : part.terms) {
                product.push_back(Term{a.bits | (b.bits << shift), a.amp * b.amp});
            }
        }
        joined.terms = std::move(product);
        joined.squares.insert(joined.squares.end(), part.squares.begin(), part.squares.end());
        part.squares.clear();
        part.terms.clear();
    }
    for (Square sq : loose) {
        int shift = static_cast<int>(joined.squares.size());
        if (shift >= 64) {
            throw std::length_error("entangled component exceeds 64 squares");
        }
        if (classical_[sq]) {
            for (auto &t : joined.terms) {
                t.bits |= uint64_t{1} << shift;
            }
        }
        classical_[sq] = 0;
        joined.squares.push_back(sq);
    }
    sort_and_combine(joined.terms);

    components_.push_back(std::move(joined));
    compact();
    return component_of_[squares[0]];
}

void QuantumBoardState::apply_gate(const GateMatrix &gate, std::span<const Square> squares) {
    const int n = gate.arity;
    bool all_classical = true;
    for (int i = 0; i < n; i++) {
        check_square(squares[i]);
        for (int j = 0; j < i; j++) {
            if (squares[i] == squares[j]) {
                throw std::invalid_argument("gate squares must be distinct");
            }
        }
        all_classical = all_classical && component_of_[squares[i]] < 0;
    }

    if (all_classical) {
        // A permutation-with-phase column keeps the board classical; the
        // phase is global and is dropped.
        int col = 0;
        for (int i = 0; i < n; i++) {
            col |= classical_[squares[i]] << i;
        }
        int image = -1;
        int nonzero = 0;
        for (int r = 0; r < gate.dim(); r++) {
            if (std::abs(gate.at(r, col)) > kPruneThreshold) {
                image = r;
                nonzero++;
            }
        }
        if (nonzero == 1) {
            for (int i = 0; i < n; i++) {
                classical_[squares[i]] = (image >> i) & 1;
            }
            return;
        }
    }

    int c = join_components(squares);
    auto &comp = components_[c];
    std::vector<int> local(n);
    uint64_t mask = 0;
    for (int i = 0; i < n; i++) {
        local[i] = comp.local_index(squares[i]);
        mask |= uint64_t{1} << local[i];
    }

    std::vector<Term> out;
    out.reserve(comp.terms.size() * 2);
    for (const auto &t : comp.terms) {
        int col = static_cast<int>(gather(t.bits, local));
        uint64_t base = t.bits & ~mask;
        for (int r = 0; r < gate.dim(); r++) {
            Amplitude u = gate.at(r, col);
            if (u == 0.0) {
                continue;
            }
            uint64_t bits = base;
            for (int i = 0; i < n; i++) {
                if ((r >> i) & 1) {
                    bits |= uint64_t{1} << local[i];
                }
            }
            out.push_back(Term{bits, t.amp * u});
        }
    }
    sort_and_combine(out);
    comp.terms = std::move(out);
    canonicalize(c);
    compact();
}

void QuantumBoardState::apply_move(Square source, Square target) {
    check_square(source);
    check_square(target);
    if (!is_empty(target)) {
        throw IllegalGateError("move target " + std::to_string(target) + " is occupied");
    }
    if (is_empty(source)) {
        throw IllegalGateError("move source " + std::to_string(source) + " is empty");
    }
    const Square squares[2] = {source, target};
    apply_gate(move_gate(), squares);
}

void QuantumBoardState::apply_split(Square source, Square target1, Square target2) {
    check_square(source);
    check_square(target1);
    check_square(target2);
    if (target1 == target2 || source == target1 || source == target2) {
        throw std::invalid_argument("split squares must be distinct");
    }
    if (!is_empty(target1) || !is_empty(target2)) {
        throw IllegalGateError("split target is occupied");
    }
    if (is_empty(source)) {
        throw IllegalGateError("split source " + std::to_string(source) + " is empty");
    }
    const Square squares[3] = {source, target1, target2};
    apply_gate(split_gate(), squares);
}

void QuantumBoardState::apply_merge(Square target, Square source1, Square source2) {
    check_square(target);
    check_square(source1);
    check_square(source2);
    if (source1 == source2 || target == source1 || target == source2) {
        throw std::invalid_argument("merge squares must be distinct");
    }
    if (!is_empty(target)) {
        throw IllegalGateError("merge target " + std::to_string(target) + " is occupied");
    }
    const Square squares[3] = {target, source1, source2};
    apply_gate(merge_gate(), squares);
}

void QuantumBoardState::apply_capture(Square defender, Square attacker, Square landing) {
    check_square(defender);
    check_square(attacker);
    check_square(landing);
    if (!is_empty(landing)) {
        throw IllegalGateError("capture landing " + std::to_string(landing) + " is occupied");
    }
    const Square squares[3] = {defender, attacker, landing};
    apply_gate(capture_gate(), squares);
}

MeasurementOutcome QuantumBoardState::measure(std::span<const Square> squares, Rng &rng) {
    std::vector<Square> sorted(squares.begin(), squares.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    MeasurementOutcome outcome;
    // Squares grouped by the component they sit in, in order of the smallest
    // member square.
    std::vector<std::vector<Square>> groups;
    std::vector<int> group_comp;
    for (Square sq : sorted) {
        check_square(sq);
        int c = component_of_[sq];
        if (c < 0) {
            continue;
        }
        auto it = std::find(group_comp.begin(), group_comp.end(), c);
        if (it == group_comp.end()) {
            group_comp.push_back(c);
            groups.push_back({sq});
        } else {
            groups[it - group_comp.begin()].push_back(sq);
        }
    }

    for (size_t g = 0; g < groups.size(); g++) {
        int c = group_comp[g];
        auto &comp = components_[c];
        uint64_t mask = 0;
        for (Square sq : groups[g]) {
            mask |= uint64_t{1} << comp.local_index(sq);
        }

        std::vector<std::pair<uint64_t, double>> dist;
        for (const auto &t : comp.terms) {
            dist.emplace_back(t.bits & mask, std::norm(t.amp));
        }
        std::sort(dist.begin(), dist.end());
        size_t w = 0;
        for (size_t r = 0; r < dist.size(); r++) {
            if (w > 0 && dist[w - 1].first == dist[r].first) {
                dist[w - 1].second += dist[r].second;
            } else {
                dist[w++] = dist[r];
            }
        }
        dist.resize(w);

        double total = 0;
        for (const auto &d : dist) {
            total += d.second;
        }
        double draw = rng.uniform() * total;
        uint64_t chosen = dist.back().first;
        double cumulative = 0;
        for (const auto &d : dist) {
            cumulative += d.second;
            if (draw < cumulative) {
                chosen = d.first;
                break;
            }
        }

        for (Square sq : groups[g]) {
            outcome.bits.emplace_back(sq, bit_of(chosen, comp.local_index(sq)));
        }
        std::erase_if(comp.terms, [&](const Term &t) { return (t.bits & mask) != chosen; });
        canonicalize(c);
    }

    for (Square sq : sorted) {
        if (std::none_of(outcome.bits.begin(), outcome.bits.end(), [&](const auto &p) { return p.first == sq; })) {
            outcome.bits.emplace_back(sq, classical_[sq] != 0);
        }
    }
    std::sort(outcome.bits.begin(), outcome.bits.end());
    compact();
    return outcome;
}

void QuantumBoardState::postselect(const MeasurementOutcome &outcome) {
    std::vector<int> touched;
    for (const auto &[sq, bit] : outcome.bits) {
        check_square(sq);
        int c = component_of_[sq];
        if (c < 0) {
            if ((classical_[sq] != 0) != bit) {
                throw std::invalid_argument("postselected outcome has zero probability");
            }
            continue;
        }
        auto &comp = components_[c];
        int local = comp.local_index(sq);
        std::erase_if(comp.terms, [&](const Term &t) { return bit_of(t.bits, local) != bit; });
        if (comp.terms.empty()) {
            throw std::invalid_argument("postselected outcome has zero probability");
        }
        if (std::find(touched.begin(), touched.end(), c) == touched.end()) {
            touched.push_back(c);
        }
    }
    for (int c : touched) {
        canonicalize(c);
    }
    compact();
}

void QuantumBoardState::clear_square(Square sq) {
    check_square(sq);
    if (component_of_[sq] >= 0 || !classical_[sq]) {
        throw IllegalGateError("square " + std::to_string(sq) + " is not classically occupied");
    }
    classical_[sq] = 0;
}

double QuantumBoardState::max_normalization_error() const {
    double worst = 0;
    for (const auto &comp : components_) {
        if (!comp.squares.empty()) {
            worst = std::max(worst, std::abs(comp.norm_squared() - 1.0));
        }
    }
    return worst;
}

void QuantumBoardState::canonicalize(int c) {
    auto &comp = components_[c];
    std::erase_if(comp.terms, [](const Term &t) { return std::abs(t.amp) < kPruneThreshold; });
    double norm = std::sqrt(comp.norm_squared());
    if (comp.terms.empty() || norm == 0) {
        throw std::logic_error("component lost all amplitude");
    }
    for (auto &t : comp.terms) {
        t.amp /= norm;
    }

    const size_t n = comp.squares.size();
    uint64_t all = ~uint64_t{0};
    uint64_t any = 0;
    for (const auto &t : comp.terms) {
        all &= t.bits;
        any |= t.bits;
    }
    uint64_t full = n == 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
    uint64_t varying = (all ^ any) & full;
    if (varying != full) {
        std::vector<int> keep;
        std::vector<Square> kept_squares;
        for (size_t i = 0; i < n; i++) {
            Square sq = comp.squares[i];
            if ((varying >> i) & 1) {
                keep.push_back(static_cast<int>(i));
                kept_squares.push_back(sq);
            } else {
                classical_[sq] = bit_of(all, static_cast<int>(i));
                component_of_[sq] = -1;
            }
        }
        // Dropping bits that are constant across all terms preserves both
        // uniqueness and ordering.
        for (auto &t : comp.terms) {
            t.bits = gather(t.bits, keep);
        }
        comp.squares = std::move(kept_squares);
        if (comp.squares.empty()) {
            comp.terms.clear();
            return;
        }
    }
    factor(c);
}

void QuantumBoardState::factor(int c) {
    const size_t n = components_[c].squares.size();
    if (n < 2) {
        return;
    }
    const auto &terms = components_[c].terms;

    // Candidate partition: union bits whose occupancies are correlated.
    std::vector<double> p1(n, 0.0);
    std::vector<double> p11(n * n, 0.0);
    for (const auto &t : terms) {
        double p = std::norm(t.amp);
        for (size_t i = 0; i < n; i++) {
            if (!bit_of(t.bits, static_cast<int>(i))) {
                continue;
            }
            p1[i] += p;
            for (size_t j = i + 1; j < n; j++) {
                if (bit_of(t.bits, static_cast<int>(j))) {
                    p11[i * n + j] += p;
                }
            }
        }
    }
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (size_t i = 0; i < n; i++) {
        for (size_t j = i + 1; j < n; j++) {
            if (std::abs(p11[i * n + j] - p1[i] * p1[j]) > 1e-12) {
                parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
            }
        }
    }
    std::vector<std::vector<int>> groups;
    std::vector<int> root_group(n, -1);
    for (size_t i = 0; i < n; i++) {
        int r = find(static_cast<int>(i));
        if (root_group[r] < 0) {
            root_group[r] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        groups[root_group[r]].push_back(static_cast<int>(i));
    }
    if (groups.size() < 2) {
        return;
    }

    // Verify the state is exactly the tensor product over the candidate
    // groups; pairwise independence alone does not guarantee it.
    const Term *ref = &terms[0];
    for (const auto &t : terms) {
        if (std::abs(t.amp) > std::abs(ref->amp)) {
            ref = &t;
        }
    }
    const size_t k = groups.size();
    std::vector<uint64_t> masks(k, 0);
    for (size_t g = 0; g < k; g++) {
        for (int i : groups[g]) {
            masks[g] |= uint64_t{1} << i;
        }
    }
    std::vector<std::vector<std::pair<uint64_t, Amplitude>>> factors(k);
    size_t product_size = 1;
    for (size_t g = 0; g < k; g++) {
        std::vector<uint64_t> projections;
        for (const auto &t : terms) {
            projections.push_back(t.bits & masks[g]);
        }
        std::sort(projections.begin(), projections.end());
        projections.erase(std::unique(projections.begin(), projections.end()), projections.end());
        product_size *= projections.size();
        if (product_size > terms.size()) {
            return;
        }
        for (uint64_t x : projections) {
            const Term *hit = find_term(terms, (ref->bits & ~masks[g]) | x);
            if (hit == nullptr) {
                return;
            }
            factors[g].emplace_back(x, hit->amp);
        }
    }
    if (product_size != terms.size()) {
        return;
    }
    const Amplitude ref_power = std::pow(ref->amp, static_cast<double>(k - 1));
    for (const auto &t : terms) {
        Amplitude predicted = 1.0;
        for (size_t g = 0; g < k; g++) {
            uint64_t x = t.bits & masks[g];
            auto it = std::lower_bound(factors[g].begin(), factors[g].end(), x,
                                       [](const auto &f, uint64_t b) { return f.first < b; });
            predicted *= it->second;
        }
        if (std::abs(predicted / ref_power - t.amp) > 1e-10) {
            return;
        }
    }

    std::vector<EntangledComponent> parts(k);
    for (size_t g = 0; g < k; g++) {
        auto &part = parts[g];
        for (int i : groups[g]) {
            part.squares.push_back(components_[c].squares[i]);
        }
        double norm = 0;
        for (const auto &f : factors[g]) {
            norm += std::norm(f.second);
        }
        norm = std::sqrt(norm);
        for (const auto &f : factors[g]) {
            part.terms.push_back(Term{gather(f.first, groups[g]), f.second / norm});
        }
        sort_and_combine(part.terms);
    }
    components_[c] = std::move(parts[0]);
    for (size_t g = 1; g < k; g++) {
        int index = static_cast<int>(components_.size());
        for (Square sq : parts[g].squares) {
            component_of_[sq] = index;
        }
        components_.push_back(std::move(parts[g]));
    }
}

void QuantumBoardState::compact() {
    std::erase_if(components_, [](const EntangledComponent &comp) { return comp.squares.empty(); });
    std::fill(component_of_.begin(), component_of_.end(), -1);
    for (size_t c = 0; c < components_.size(); c++) {
        for (Square sq : components_[c].squares) {
            component_of_[sq] = static_cast<int>(c);
            classical_[sq] = 0;
        }
    }
}

nlohmann::json QuantumBoardState::to_json() const {
    std::string classical(classical_.size(), '0');
    for (size_t i = 0; i < classical_.size(); i++) {
        if (classical_[i]) {
            classical[i] = '1';
        }
    }
    nlohmann::json comps = nlohmann::json::array();
    for (const auto &comp : components_) {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto &t : comp.terms) {
            terms.push_back({{"bits", bits_to_string(t.bits, comp.squares.size())},
                             {"re", t.amp.real()},
                             {"im", t.amp.imag()}});
        }
        comps.push_back({{"squares", comp.squares}, {"terms", std::move(terms)}});
    }
    return {{"numSquares", num_squares()}, {"classical", classical}, {"components", std::move(comps)}};
}

QuantumBoardState QuantumBoardState::from_json(const nlohmann::json &j) {
    int n = j.at("numSquares").get<int>();
    QuantumBoardState state(n);
    const auto classical = j.at("classical").get<std::string>();
    if (classical.size() != static_cast<size_t>(n)) {
        throw std::invalid_argument("classical occupancy length does not match numSquares");
    }
    for (int i = 0; i < n; i++) {
        if (classical[i] != '0' && classical[i] != '1') {
            throw std::invalid_argument("classical occupancy must be a 0/1 string");
        }
        state.classical_[i] = classical[i] == '1';
    }
    for (const auto &jc : j.at("components")) {
        EntangledComponent comp;
        comp.squares = jc.at("squares").get<std::vector<Square>>();
        if (comp.squares.empty() || comp.squares.size() > 64) {
            throw std::invalid_argument("component must hold 1..64 squares");
        }
        for (Square sq : comp.squares) {
            state.check_square(sq);
            if (state.component_of_[sq] >= 0) {
                throw std::invalid_argument("square " + std::to_string(sq) + " is in two components");
            }
            state.component_of_[sq] = static_cast<int>(state.components_.size());
        }
        for (const auto &jt : jc.at("terms")) {
            auto bits = jt.at("bits").get<std::string>();
            if (bits.size() != comp.squares.size()) {
                throw std::invalid_argument("term bit string length does not match component");
            }
            Term t;
            for (size_t i = 0; i < bits.size(); i++) {
                if (bits[i] == '1') {
                    t.bits |= uint64_t{1} << i;
                } else if (bits[i] != '0') {
                    throw std::invalid_argument("term bits must be a 0/1 string");
                }
            }
            t.amp = Amplitude(jt.at("re").get<double>(), jt.at("im").get<double>());
            if (!std::isfinite(t.amp.real()) || !std::isfinite(t.amp.imag())) {
                throw std::invalid_argument("amplitude is not finite");
            }
            comp.terms.push_back(t);
        }
        auto sorted = comp.terms;
        sort_and_combine(sorted);
        if (sorted.size() != comp.terms.size() || sorted != comp.terms) {
            throw std::invalid_argument("component terms must be sorted and unique");
        }
        if (std::abs(comp.norm_squared() - 1.0) > 1e-9) {
            throw std::invalid_argument("component is not normalized");
        }
        state.components_.push_back(std::move(comp));
    }
    for (const auto &comp : state.components_) {
        for (Square sq : comp.squares) {
            state.classical_[sq] = 0;
        }
    }
    return state;
}

}  // namespace cheqqers
