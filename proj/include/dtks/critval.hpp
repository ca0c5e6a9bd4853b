#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <vector>

#include "dtks/model.hpp"

namespace dtks {

// Origin-aligned lattice over the bounding rectangle [0,G+s] x [0,G].
struct GridSpec {
    double step = 0.25;
    std::size_t max_points = 20000;
};

// Lattice points, x varying fastest. Throws std::invalid_argument when the
// point count exceeds the cap (dense factorization cost is cubic).
std::vector<Point> grid_points(const StudyWindow& w, const GridSpec& grid);

// Which limit process the critical value targets, by what is treated as
// estimated: neither, the parameter, the latent sample size, or both.
enum class CovarianceMode {
    known_both,
    est_theta_known_n,
    known_theta_est_n,
    est_both,
};

// Pointwise covariance of the selected limit process. The convenience
// overload recomputes alpha/information internally; batch callers should
// use CovarianceContext.
struct CovarianceContext {
    ModelParams params;
    StudyWindow window;
    double a = 0.0;
    ParamVector grad_a;
    ParamMatrix info;
    ParamMatrix info_inv;
};
CovarianceContext make_covariance_context(const ModelParams& p, const StudyWindow& w);

double covariance(const CovarianceContext& ctx, const Point& p1, const Point& p2,
                  CovarianceMode mode);
double covariance(const ModelParams& p, const StudyWindow& w, const Point& p1, const Point& p2,
                  CovarianceMode mode);

// Dense covariance matrix over the lattice (symmetric, no regularization).
Eigen::MatrixXd covariance_matrix(const ModelParams& p, const StudyWindow& w,
                                  const GridSpec& grid, CovarianceMode mode);

// Lower Cholesky factor with the smallest jitter from {0, 1e-12, 1e-10,
// 1e-8} * mean(diag) that makes the factorization succeed.
struct CholeskyFactor {
    Eigen::MatrixXd lower;
    double jitter = 0.0;  // absolute value added to the diagonal
};
CholeskyFactor factor_covariance(Eigen::MatrixXd cov);

// Monte-Carlo draws of max_i |Z_i| for Z ~ N(0, cov), sorted ascending.
// Replication r uses the (seed, r) substream, so the output is independent
// of the thread count.
std::vector<double> simulate_sup(const CholeskyFactor& factor, int reps, std::uint64_t seed);
std::vector<double> simulate_sup(const Eigen::MatrixXd& cov, int reps, std::uint64_t seed);

// Order statistic at rank ceil(level * reps) of a sorted sample.
double quantile_at(const std::vector<double>& sorted_sups, double level);

struct CriticalValueResult {
    std::map<double, double> quantiles;
    int reps = 0;
    std::uint64_t seed = 0;
    GridSpec grid;
    double jitter_used = 0.0;
};

CriticalValueResult critical_value(const ModelParams& p, const StudyWindow& w,
                                   const GridSpec& grid, CovarianceMode mode,
                                   const std::vector<double>& levels, int reps,
                                   std::uint64_t seed);

enum class Decision { accept, reject };

// Rejects when the statistic strictly exceeds the critical value.
Decision decide(double statistic, double critical);

}  // namespace dtks
