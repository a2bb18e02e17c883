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

#include "cheqqers/rating.h"

#include <cmath>

#include <boost/math/distributions/normal.hpp>

namespace cheqqers {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double pdf(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// 1 / (z + 2 / (z + 3 / (z + ...))), the tail of Laplace's continued
/// fraction for the Mills ratio; accurate for z >= 5 at this depth.
double mills_tail(double z) {
    double tail = 0;
    for (int k = 200; k >= 2; k--) {
        tail = k / (z + tail);
    }
    return 1.0 / (z + tail);
}

TruncatedMoments win_moments(double x) {
    if (x < -5.0) {
        // phi(x)/Phi(x) = z + K(z) with z = -x, so v + x = K(z) exactly.
        double z = -x;
        double k = mills_tail(z);
        double v = z + k;
        return {v, v * k};
    }
    double v = pdf(x) / cdf(x);
    return {v, v * (v + x)};
}

TruncatedMoments draw_moments(double t, double eps) {
    double abs_t = std::abs(t);
    double a = eps - abs_t;
    double b = -eps - abs_t;
    double denom = cdf(a) - cdf(b);
    double v;
    double w;
    if (denom < 1e-300) {
        v = a;
        w = 1.0;
    } else {
        v = (pdf(b) - pdf(a)) / denom;
        w = v * v + (a * pdf(a) - b * pdf(b)) / denom;
    }
    return {t < 0 ? -v : v, w};
}

}  // namespace

double TrueSkillParams::draw_margin() const {
    boost::math::normal standard;
    return boost::math::quantile(standard, (1.0 + draw_probability) / 2.0) * std::sqrt(2.0) * beta;
}

TruncatedMoments truncated_gaussian_moments(double t, double eps, bool is_draw) {
    return is_draw ? draw_moments(t, eps) : win_moments(t - eps);
}

std::pair<Rating, Rating> trueskill_update(const Rating &a, const Rating &b, GameResult result,
                                           const TrueSkillParams &params) {
    const double tau2 = params.tau * params.tau;
    const double var_a = a.sigma * a.sigma + tau2;
    const double var_b = b.sigma * b.sigma + tau2;
    const double c2 = 2 * params.beta * params.beta + (var_a + var_b);
    const double c = std::sqrt(c2);
    const double eps = params.draw_margin() / c;

    double delta_a;
    double delta_b;
    double w;
    switch (result) {
        case GameResult::AWins: {
            auto m = truncated_gaussian_moments((a.mu - b.mu) / c, eps, false);
            delta_a = m.v;
            delta_b = -m.v;
            w = m.w;
            break;
        }
        case GameResult::BWins: {
            auto m = truncated_gaussian_moments((b.mu - a.mu) / c, eps, false);
            delta_a = -m.v;
            delta_b = m.v;
            w = m.w;
            break;
        }
        default: {
            auto m = truncated_gaussian_moments((a.mu - b.mu) / c, eps, true);
            delta_a = m.v;
            delta_b = -m.v;
            w = m.w;
            break;
        }
    }

    Rating next_a{a.mu + var_a / c * delta_a, std::sqrt(var_a * (1 - var_a / c2 * w))};
    Rating next_b{b.mu + var_b / c * delta_b, std::sqrt(var_b * (1 - var_b / c2 * w))};
    return {next_a, next_b};
}

}  // namespace cheqqers
