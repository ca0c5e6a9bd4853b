#pragma once

#include <stdexcept>

#include "dtks/model.hpp"

namespace dtks {

// Score sum has no root in the parameter space (model misfit / degenerate data).
struct NoRootError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Root found at the parameter-space edge.
struct BoundaryHitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EstimateConfig {
    ParamBounds bounds;
    double score_tol_per_obs = 1e-8;  // |sum psi| <= tol * m at the root
    double step_tol = 1e-10;
    int max_iterations = 200;
};

struct EstimateResult {
    ModelParams params;
    double score_norm = 0.0;  // ||sum_j psi(x_j,t_j)|| at the root
    int iterations = 0;
    double latent_n = 0.0;    // m / alpha(params)
};

// Z-estimate from the truncated sample: the root of the summed score.
// Product copula: bracketed 1D root finding in theta. FGM: damped Newton on
// the two-dimensional score sum with finite-difference Jacobian and fixed
// multi-start order. Deterministic for fixed inputs.
EstimateResult estimate(const ObservationSet& obs, Copula copula, const EstimateConfig& cfg = {});

// Maximum likelihood estimate of the latent sample size.
double estimate_latent_n(std::size_t m, double alpha);

}  // namespace dtks
