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

#include <utility>

namespace cheqqers {

struct Rating {
    double mu = 25.0;
    double sigma = 25.0 / 3.0;
};

struct TrueSkillParams {
    double beta = 25.0 / 6.0;
    double tau = 25.0 / 300.0;
    double draw_probability = 0.10;

    /// Performance-difference margin inside which a game counts as a draw:
    /// Phi^-1((1 + p) / 2) * sqrt(2) * beta.
    double draw_margin() const;
};

enum class GameResult { AWins, BWins, Draw };

/// Additive (v) and multiplicative (w) correction factors of the two-player
/// update, i.e. the mean and one minus the variance of a standard normal
/// truncated to the region consistent with the observed result:
///   win:  v = phi(t - eps) / Phi(t - eps),  w = v (v + t - eps)
///   draw: truncated to [-eps - t, eps - t].
struct TruncatedMoments {
    double v;
    double w;
};
TruncatedMoments truncated_gaussian_moments(double t, double eps, bool is_draw);

std::pair<Rating, Rating> trueskill_update(const Rating &a, const Rating &b, GameResult result,
                                           const TrueSkillParams &params = {});

}  // namespace cheqqers
