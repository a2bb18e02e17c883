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

#include <cmath>

#include "cheqqers/rating.h"
#include "cheqqers/rng.h"
#include "doctest.h"
#include "oracles/trueskill_quadrature.h"

using namespace cheqqers;

namespace {

oracle::Observed observed(GameResult r) {
    switch (r) {
        case GameResult::AWins:
            return oracle::Observed::AWins;
        case GameResult::BWins:
            return oracle::Observed::BWins;
        case GameResult::Draw:
            return oracle::Observed::Draw;
    }
    return oracle::Observed::Draw;
}

}  // namespace

TEST_CASE("draw margin") {
    TrueSkillParams p;
    // inverse normal cdf of 0.55 is 0.125661346855074
    CHECK(p.draw_margin() == doctest::Approx(0.125661346855074 * std::sqrt(2.0) * 25.0 / 6.0).epsilon(1e-12));
    p.draw_probability = 0;
    CHECK(p.draw_margin() == 0);
}

TEST_CASE("fresh ratings after a win") {
    auto [winner, loser] = trueskill_update(Rating{}, Rating{}, GameResult::AWins);
    CHECK(winner.mu > 25);
    CHECK(loser.mu < 25);
    CHECK(winner.sigma < 25.0 / 3);
    CHECK(loser.sigma < 25.0 / 3);
    CHECK(winner.mu - 25 == doctest::Approx(25 - loser.mu).epsilon(1e-12));
    CHECK(winner.sigma == doctest::Approx(loser.sigma).epsilon(1e-12));
}

TEST_CASE("a draw between equals moves nobody") {
    auto [a, b] = trueskill_update(Rating{}, Rating{}, GameResult::Draw);
    CHECK(a.mu == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(b.mu == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(a.sigma < 25.0 / 3);
}

TEST_CASE("swapping players mirrors the update") {
    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
        Rating a{rng.uniform() * 50, 0.5 + rng.uniform() * 8};
        Rating b{rng.uniform() * 50, 0.5 + rng.uniform() * 8};
        for (auto [r, mirrored] : {std::pair{GameResult::AWins, GameResult::BWins},
                                   std::pair{GameResult::BWins, GameResult::AWins},
                                   std::pair{GameResult::Draw, GameResult::Draw}}) {
            auto [a1, b1] = trueskill_update(a, b, r);
            auto [b2, a2] = trueskill_update(b, a, mirrored);
            CHECK(a1.mu == doctest::Approx(a2.mu).epsilon(1e-12));
            CHECK(a1.sigma == doctest::Approx(a2.sigma).epsilon(1e-12));
            CHECK(b1.mu == doctest::Approx(b2.mu).epsilon(1e-12));
            CHECK(b1.sigma == doctest::Approx(b2.sigma).epsilon(1e-12));
        }
    }
}

TEST_CASE("truncated gaussian moments") {
    // at t = 0, eps = 0: v = pdf(0) / cdf(0), w = v^2
    auto m = truncated_gaussian_moments(0, 0, false);
    double v = std::sqrt(2 / M_PI);
    CHECK(m.v == doctest::Approx(v).epsilon(1e-14));
    CHECK(m.w == doctest::Approx(v * v).epsilon(1e-14));
    // deep tail stays finite and near the asymptote v ~ -x, w ~ 1
    auto tail = truncated_gaussian_moments(-30, 0, false);
    CHECK(tail.v == doctest::Approx(30 + 1.0 / 30).epsilon(1e-4));
    CHECK(tail.w < 1);
    CHECK(tail.w > 0.99);
    for (double t = -12; t <= 12; t += 0.37) {
        for (bool draw : {false, true}) {
            auto mm = truncated_gaussian_moments(t, 0.4, draw);
            CHECK(std::isfinite(mm.v));
            CHECK(mm.w > 0);
            CHECK(mm.w < 1);
        }
    }
}

TEST_CASE("updates match numerical integration") {
    Rng rng(12);
    TrueSkillParams p;
    for (int i = 0; i < 150; ++i) {
        Rating a{rng.uniform() * 50, 0.8 + rng.uniform() * 8};
        Rating b{rng.uniform() * 50, 0.8 + rng.uniform() * 8};
        GameResult r = static_cast<GameResult>(rng.below(3));
        auto [na, nb] = trueskill_update(a, b, r, p);
        auto [mean_a, sd_a] =
            oracle::posterior_a(a.mu, a.sigma, b.mu, b.sigma, p.beta, p.tau, p.draw_margin(), observed(r));
        CHECK(std::abs(na.mu - mean_a) < 1e-6);
        CHECK(std::abs(na.sigma - sd_a) < 1e-6);
        GameResult flipped = r == GameResult::AWins   ? GameResult::BWins
                             : r == GameResult::BWins ? GameResult::AWins
                                                      : GameResult::Draw;
        auto [mean_b, sd_b] =
            oracle::posterior_a(b.mu, b.sigma, a.mu, a.sigma, p.beta, p.tau, p.draw_margin(), observed(flipped));
        CHECK(std::abs(nb.mu - mean_b) < 1e-6);
        CHECK(std::abs(nb.sigma - sd_b) < 1e-6);
    }
}
