#include "dtks/datagen.hpp"

#include <atomic>
#include <cassert>
#include <cmath>

#include "dtks/estimation.hpp"
#include "dtks/ksstat.hpp"
#include "dtks/parallel.hpp"
#include "dtks/rng.hpp"

namespace dtks {

namespace {

// Inverse of the conditional copula CDF given the truncation-age margin:
// solve u [1 + a (1 - u)] = w with a = vartheta (1 - 2v); the "-sqrt"
// quadratic branch is the one inside [0,1].
double conditional_inverse(double vartheta, double v, double w) {
    const double a = vartheta * (1.0 - 2.0 * v);
    if (std::abs(a) < 1e-10) return w;
    const double disc = (1.0 + a) * (1.0 + a) - 4.0 * a * w;
    const double u = ((1.0 + a) - std::sqrt(disc)) / (2.0 * a);
    assert(u >= 0.0 && u <= 1.0);
    assert(std::abs(u * (1.0 + a * (1.0 - u)) - w) < 1e-9);
    return u;
}

double lifetime_quantile(const SimulationConfig& cfg, double u) {
    if (cfg.lifetime == LifetimeFamily::exponential) {
        return -std::log1p(-u) / cfg.params.theta;
    }
    // Weibull, shape 2, scaled so the mean matches 1/theta.
    constexpr double gamma_three_halves = 0.88622692545275801365;
    const double scale = 1.0 / (cfg.params.theta * gamma_three_halves);
    return scale * std::sqrt(-std::log1p(-u));
}

}  // namespace

std::vector<Point> sample_latent(const SimulationConfig& cfg, int rep) {
    require_valid(cfg.params);
    require_valid(cfg.window);
    if (cfg.latent_n < 1) throw std::invalid_argument("latent_n must be >= 1");
    Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(rep));
    const double vartheta = cfg.params.copula == Copula::fgm ? cfg.params.vartheta : 0.0;
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(cfg.latent_n));
    for (long i = 0; i < cfg.latent_n; ++i) {
        const double v = rng.uniform();
        const double w = rng.uniform();
        const double u = conditional_inverse(vartheta, v, w);
        out.push_back({lifetime_quantile(cfg, u), cfg.window.G * v});
    }
    return out;
}

ObservationSet truncate(const std::vector<Point>& latent, const StudyWindow& w) {
    std::vector<Point> kept;
    for (const Point& p : latent) {
        if (in_support(w, p)) kept.push_back(p);
    }
    if (kept.empty()) throw EmptySampleError("no latent point survives truncation");
    return ObservationSet(std::move(kept), w);
}

LevelPowerResult run_level_power_study(const SimulationConfig& cfg, const GridSpec& grid,
                                       int reps_cv, const std::vector<double>& levels) {
    if (cfg.replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (levels.empty()) throw std::invalid_argument("levels must not be empty");

    const std::size_t reps = static_cast<std::size_t>(cfg.replications);
    // per replication: -1 failed, otherwise bitmask of rejections by level
    std::vector<int> outcome(reps, -1);
    parallel_for(reps, [&](std::size_t b, std::size_t e) {
        for (std::size_t r = b; r < e; ++r) {
            try {
                const auto latent = sample_latent(cfg, static_cast<int>(r));
                const ObservationSet obs = truncate(latent, cfg.window);
                const EstimateResult est = estimate(obs, cfg.params.copula);
                const StatisticBreakdown stat = ks_statistic(obs, est.params);
                const CriticalValueResult cv =
                    critical_value(est.params, cfg.window, grid, CovarianceMode::est_both,
                                   levels, reps_cv, derive_seed(cfg.seed, r));
                int mask = 0;
                for (std::size_t li = 0; li < levels.size(); ++li) {
                    if (decide(stat.statistic, cv.quantiles.at(levels[li])) ==
                        Decision::reject) {
                        mask |= 1 << li;
                    }
                }
                outcome[r] = mask;
            } catch (const std::runtime_error&) {
                outcome[r] = -1;
            }
        }
    });

    LevelPowerResult res;
    for (int o : outcome) {
        if (o < 0) {
            ++res.failed_replications;
        } else {
            ++res.valid_replications;
        }
    }
    for (std::size_t li = 0; li < levels.size(); ++li) {
        LevelPowerEntry row;
        row.level = levels[li];
        for (int o : outcome) {
            if (o >= 0 && (o & (1 << li))) ++row.rejections;
        }
        const double n = static_cast<double>(res.valid_replications);
        if (n > 0) {
            row.rate = static_cast<double>(row.rejections) / n;
            row.std_error = std::sqrt(row.rate * (1.0 - row.rate) / n);
        }
        res.rows.push_back(row);
    }
    return res;
}

}  // namespace dtks
