#pragma once

#include <cstddef>

#include "dtks/model.hpp"

namespace dtks {

// Closed-rectangle empirical CDF, #{j : x_j <= p.x, t_j <= p.t} / m.
double empirical_cdf(const ObservationSet& obs, const Point& p);

// Lower-left limit F(x-, t-): strict counting on both coordinates.
double empirical_cdf_left(const ObservationSet& obs, const Point& p);

// Model CDF of an observation, expect_g / alpha. Defined on the bounding
// rectangle.
double theoretical_obs_cdf(const ModelParams& p, const StudyWindow& w, const Point& pt);

struct StatisticBreakdown {
    // The five partial maxima of the finite-candidate evaluation; delta2 and
    // delta3 are -inf when there are no discordant pairs.
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta3 = 0.0;
    double delta4 = 0.0;
    double delta5 = 0.0;
    double statistic = 0.0;  // sqrt(alpha) * sqrt(m) * max(delta1..delta5)
    std::size_t evaluation_count = 0;
};

// Two-sided KS distance between the empirical and model observation CDFs,
// computed exactly from the finite candidate sets (observations,
// discordant-pair crossings, edge projections, corners).
StatisticBreakdown ks_statistic(const ObservationSet& obs, const ModelParams& params);

// Dense-grid approximation of the same supremum, evaluating both the closed
// empirical CDF and its lower-left limit on an origin-aligned lattice of the
// given step. Test oracle; approaches ks_statistic from below as step -> 0.
double ks_statistic_bruteforce(const ObservationSet& obs, const ModelParams& params, double step);

}  // namespace dtks
