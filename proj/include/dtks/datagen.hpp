#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dtks/critval.hpp"
#include "dtks/model.hpp"

namespace dtks {

struct EmptySampleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lifetime marginal of the generator. weibull_shape2 keeps the copula and
// the mean but changes the shape; it is the misspecified alternative for
// power studies.
enum class LifetimeFamily { exponential, weibull_shape2 };

struct SimulationConfig {
    ModelParams params;
    StudyWindow window;
    long latent_n = 0;
    std::uint64_t seed = 0;
    int replications = 1;
    LifetimeFamily lifetime = LifetimeFamily::exponential;
};

// One latent sample of size latent_n, replication `rep` of the seeded
// stream. T is uniform on (0,G); X is drawn through the copula by the
// conditional inverse given T. Deterministic in (cfg, rep).
std::vector<Point> sample_latent(const SimulationConfig& cfg, int rep = 0);

// Keeps the points inside the support, preserving order. Throws
// EmptySampleError when nothing survives.
ObservationSet truncate(const std::vector<Point>& latent, const StudyWindow& w);

struct LevelPowerEntry {
    double level = 0.0;
    std::size_t rejections = 0;
    double rate = 0.0;
    double std_error = 0.0;  // binomial
};

struct LevelPowerResult {
    std::vector<LevelPowerEntry> rows;
    std::size_t valid_replications = 0;
    std::size_t failed_replications = 0;  // estimation failures, excluded from rates
};

// Full-pipeline rejection rates: per replication draw, truncate, estimate,
// compute the statistic, simulate the critical values (est_both mode) and
// decide at each level.
LevelPowerResult run_level_power_study(const SimulationConfig& cfg, const GridSpec& grid,
                                       int reps_cv, const std::vector<double>& levels);

}  // namespace dtks
